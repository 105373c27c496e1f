#ifndef FFHEAT_H
#define FFHEAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FfheatStatus {
  FFHEAT_STATUS_OK = 0,
  FFHEAT_STATUS_NULL_POINTER = 1,
  FFHEAT_STATUS_INVALID_ARGUMENT = 2,
  FFHEAT_STATUS_DOMAIN = 3,
  FFHEAT_STATUS_CONFIG = 4,
  FFHEAT_STATUS_PARSE = 5,
  FFHEAT_STATUS_SINGULARITY = 6,
  FFHEAT_STATUS_STEP_SIZE = 7,
  FFHEAT_STATUS_BLOWUP = 8,
  FFHEAT_STATUS_USAGE = 9,
  FFHEAT_STATUS_UNDEFINED_WIDTH = 10,
  FFHEAT_STATUS_IO = 11,
  FFHEAT_STATUS_BUFFER_TOO_SMALL = 12,
  FFHEAT_STATUS_PANIC = 13,
} FfheatStatus;

typedef enum FfheatClock {
  FFHEAT_CLOCK_STANDARD = 0,
  FFHEAT_CLOCK_FAST_FORWARD = 1,
} FfheatClock;

typedef enum FfheatShape {
  FFHEAT_SHAPE_COSINE = 0,
  FFHEAT_SHAPE_CONSTANT = 1,
} FfheatShape;

typedef enum FfheatBasis {
  FFHEAT_BASIS_NORMALIZED = 0,
  FFHEAT_BASIS_RAW = 1,
} FfheatBasis;

typedef enum FfheatDecayModel {
  FFHEAT_DECAY_MODEL_LITERAL = 0,
  FFHEAT_DECAY_MODEL_INTEGRATED = 1,
} FfheatDecayModel;

typedef enum FfheatThetaExponent {
  FFHEAT_THETA_EXPONENT_EPSILON = 0,
  FFHEAT_THETA_EXPONENT_VELOCITY = 1,
} FfheatThetaExponent;

typedef enum FfheatMode {
  FFHEAT_MODE_STANDARD = 0,
  FFHEAT_MODE_FAST_FORWARD = 1,
  FFHEAT_MODE_BOTH = 2,
} FfheatMode;

typedef enum FfheatSolver {
  FFHEAT_SOLVER_SERIES = 0,
  FFHEAT_SOLVER_GRID = 1,
  FFHEAT_SOLVER_BOTH = 2,
} FfheatSolver;

/**
 * Resolved run configuration.
 */
typedef struct FfheatConfig FfheatConfig;

/**
 * Initial profile projected onto the sine modes of the initial box, bound
 * to a schedule and series options.
 */
typedef struct FfheatModel FfheatModel;

/**
 * Validated wall schedule.
 */
typedef struct FfheatSchedule FfheatSchedule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ffheat_version(void);

/**
 * Message of the last failed call on this thread, or NULL after a
 * successful call. Valid until the next call into the library.
 */
const char *ffheat_last_error_message(void);

enum FfheatStatus ffheat_schedule_new(double l0,
                                      double epsilon,
                                      double alpha_bar,
                                      double t_standard,
                                      uint32_t shape,
                                      struct FfheatSchedule **out);

void ffheat_schedule_free(struct FfheatSchedule *schedule);

enum FfheatStatus ffheat_schedule_t_ff(const struct FfheatSchedule *schedule, double *out);

enum FfheatStatus ffheat_schedule_alpha(const struct FfheatSchedule *schedule,
                                        double t,
                                        double *out);

enum FfheatStatus ffheat_schedule_alpha_rate(const struct FfheatSchedule *schedule,
                                             double t,
                                             double *out);

enum FfheatStatus ffheat_schedule_advanced_time(const struct FfheatSchedule *schedule,
                                                double t,
                                                double *out);

enum FfheatStatus ffheat_schedule_wall_position(const struct FfheatSchedule *schedule,
                                                double t,
                                                uint32_t clock,
                                                double *out);

enum FfheatStatus ffheat_schedule_wall_velocity(const struct FfheatSchedule *schedule,
                                                double t,
                                                uint32_t clock,
                                                double *out);

/**
 * `∂θ/∂x` for mode `n` on a box of length `l`; `x` must be interior.
 */
enum FfheatStatus ffheat_theta_gradient(double x,
                                        double l,
                                        uint32_t mode_n,
                                        uint32_t basis,
                                        double *out);

enum FfheatStatus ffheat_theta(double x, double l, double *out);

enum FfheatStatus ffheat_ff_potential(const struct FfheatSchedule *schedule,
                                      double x,
                                      double t,
                                      double *out);

/**
 * Projects the Gaussian `exp(−(x−x0)²/σ²)/(√(2π)σ)` onto `n_max` sine
 * modes of `[0, L0]`.
 */
enum FfheatStatus ffheat_model_new(const struct FfheatSchedule *schedule,
                                   double kappa,
                                   double x0,
                                   double sigma,
                                   size_t n_max,
                                   size_t quad_points,
                                   struct FfheatModel **out);

void ffheat_model_free(struct FfheatModel *model);

enum FfheatStatus ffheat_model_set_decay_model(struct FfheatModel *model, uint32_t decay);

enum FfheatStatus ffheat_model_set_theta_exponent(struct FfheatModel *model, uint32_t exponent);

enum FfheatStatus ffheat_model_n_max(const struct FfheatModel *model, size_t *out);

/**
 * Copies the sine coefficients into `coeffs[0..n_max]`.
 */
enum FfheatStatus ffheat_model_coefficients(const struct FfheatModel *model,
                                            double *coeffs,
                                            size_t len);

enum FfheatStatus ffheat_model_tail_bound(const struct FfheatModel *model, double *out);

/**
 * Field on the fixed initial box.
 */
enum FfheatStatus ffheat_model_eval_fixed(const struct FfheatModel *model,
                                          double x,
                                          double t,
                                          double *out);

/**
 * Standard (`clock = 0`) or fast-forwarded (`clock = 1`) field.
 */
enum FfheatStatus ffheat_model_eval(const struct FfheatModel *model,
                                    uint32_t clock,
                                    double x,
                                    double t,
                                    double *out);

/**
 * Heat flux `−κ² ∂u/∂x`.
 */
enum FfheatStatus ffheat_model_flux(const struct FfheatModel *model,
                                    uint32_t clock,
                                    double x,
                                    double t,
                                    double *out);

/**
 * Second central moment width of the positive part of the field.
 */
enum FfheatStatus ffheat_model_width(const struct FfheatModel *model,
                                     uint32_t clock,
                                     double t,
                                     double *out);

/**
 * Integrates nodal values `initial[0..len]` (`len = M + 1`, ends forced to
 * zero) from t = 0 to `t_end` in `steps` Crank–Nicolson steps and writes
 * the final nodal values to `out[0..len]`. The fast-forward clock includes
 * the driving potential.
 */
enum FfheatStatus ffheat_grid_run(const struct FfheatSchedule *schedule,
                                  double kappa,
                                  uint32_t clock,
                                  const double *initial,
                                  size_t len,
                                  double t_end,
                                  size_t steps,
                                  double *out,
                                  size_t out_len);

enum FfheatStatus ffheat_config_load(const char *path, struct FfheatConfig **out);

/**
 * Parses config text in the `key=value` format.
 */
enum FfheatStatus ffheat_config_parse(const char *text, struct FfheatConfig **out);

/**
 * Built-in preset `fig1`, `fig2` or `fig3`.
 */
enum FfheatStatus ffheat_config_preset(const char *name, struct FfheatConfig **out);

void ffheat_config_free(struct FfheatConfig *cfg);

enum FfheatStatus ffheat_config_set_mode(struct FfheatConfig *cfg, uint32_t mode);

enum FfheatStatus ffheat_config_set_solver(struct FfheatConfig *cfg, uint32_t solver);

/**
 * Runs the experiment and writes its CSV files and `manifest.txt` into
 * `out_dir`. The manifest is written on failure as well.
 */
enum FfheatStatus ffheat_run_experiment(const struct FfheatConfig *cfg, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FFHEAT_H */
