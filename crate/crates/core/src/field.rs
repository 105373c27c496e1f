use crate::error::Result;

/// A temperature field frozen at one instant, evaluable anywhere on
/// `[0, wall]`.
pub trait FieldSnapshot {
    fn time(&self) -> f64;

    /// Current wall position (domain is `[0, wall]`).
    fn wall(&self) -> f64;

    fn value(&self, x: f64) -> Result<f64>;

    /// Exact spatial derivative ∂u/∂x.
    fn gradient(&self, x: f64) -> Result<f64>;
}
