/* C interface to the beam-moment toolkit.
 *
 * All entry points return px_status; results come back through out
 * parameters. Complex values are written as {re, im} pairs. Handles are
 * opaque and must be released with the matching _free call. On any
 * failure px_last_error() returns a thread-local message describing it.
 */
#ifndef PARAX_H
#define PARAX_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum px_status {
    PX_OK = 0,
    PX_ERROR = 1,        /* unexpected failure */
    PX_INVALID = 2,      /* invalid model or arguments */
    PX_NO_CONVERGE = 3   /* numerical tolerance not reached */
} px_status;

typedef struct px_model px_model;
typedef struct px_wigner px_wigner;
typedef struct px_sim px_sim;
typedef struct px_probes px_probes;
typedef struct px_stats px_stats;

const char* px_version(void);
/* Message for the most recent failure on this thread; never NULL. */
const char* px_last_error(void);

/* ---- model: beam + medium ------------------------------------------- */

px_status px_model_create_gaussian(double k0, double r0, double c0, double lc,
                                   px_model** out);
px_status px_model_create_tabulated(double k0, double r0, double c0, double lc,
                                    const double* radius, const double* value,
                                    size_t count, px_model** out);
void px_model_free(px_model* m);

/* Numerical admissibility check of the covariance (nonnegative spectrum,
 * integrable tail). */
px_status px_model_check(const px_model* m);
px_status px_model_scales(const px_model* m, double* z_sca, double* z_c);

/* Default quadrature tolerances for all subsequent moment evaluations on
 * this thread. max_level in [3, 30]. */
px_status px_quad_defaults(double rel_tol, double abs_tol, int max_level);

px_status px_cov_value(const px_model* m, double x, double y, double* out);
px_status px_cov_spectrum(const px_model* m, double kx, double ky,
                          double* out);
px_status px_cov_curvature(const px_model* m, double* out);

/* ---- analytic moments (out_val is {re, im}) -------------------------- */

px_status px_mean_field(const px_model* m, double z, double x, double y,
                        double out_val[2]);
px_status px_mutual_coherence(const px_model* m, double z, double rx,
                              double ry, double qx, double qy,
                              double out_val[2], double* out_err);
px_status px_mean_wigner(const px_model* m, double z, double rx, double ry,
                         double xix, double xiy, double out_val[2],
                         double* out_err);
px_status px_transport_residual(const px_model* m, double z, double rx,
                                double ry, double xix, double xiy,
                                double* out_residual, double* out_scale);

/* Scaled-limit moments (order-one variables of the scintillation regime). */
px_status px_mu1_limit(const px_model* m, double z, double rx, double ry,
                       double out_val[2]);
px_status px_mu2_limit(const px_model* m, double z, double rx, double ry,
                       double x1, double y1, double x2, double y2,
                       double out_val[2], double* out_err);
px_status px_mu4_limit(const px_model* m, double z, double rx, double ry,
                       const double x1[2], const double x2[2],
                       const double y1[2], const double y2[2],
                       double out_val[2], double* out_err);
/* Scattering kernel A(z, xi, zeta). */
px_status px_kernel_a(const px_model* m, double z, double xix, double xiy,
                      double zx, double zy, double out_val[2],
                      double* out_err);
px_status px_gsr_residual(const px_model* m, double z, double rx, double ry,
                          const double x1[2], const double x2[2],
                          const double y1[2], const double y2[2],
                          double* out);

/* ---- scintillation --------------------------------------------------- */

px_status px_gamma2_limit(const px_model* m, double z, double rx, double ry,
                          double qx, double qy, double out_val[2],
                          double* out_err);
px_status px_gamma4_limit(const px_model* m, double z, double rx, double ry,
                          double qx, double qy, double out_val[2],
                          double* out_err);
px_status px_scint_index(const px_model* m, double z, double rx, double ry,
                         double* out);
/* Universal normalized scintillation curve (gaussian profile); zc_ratio is
 * Z_c/Z_sca and must be positive unless z_over_zsca is zero. */
px_status px_scint_index_normalized(double z_over_zsca, double zc_ratio,
                                    double* out);
px_status px_strong_stats(const px_model* m, double z, double* beam_radius,
                          double* correlation_radius);
px_status px_strong_gamma4(const px_model* m, double z, double rx, double ry,
                           double qx, double qy, double* out);

/* ---- smoothed Wigner statistics -------------------------------------- */

/* r_s = -1 selects the Husimi configuration r_s = 1/(2 xi_s). xi_ref
 * bounds |xi| of later evaluation points. */
px_status px_wigner_create(const px_model* m, double r_s, double xi_s,
                           double z, double xi_ref, px_wigner** out);
void px_wigner_free(px_wigner* w);
px_status px_wigner_mean(const px_wigner* w, double rx, double ry, double xix,
                         double xiy, double* out, double* out_err);
px_status px_wigner_second_moment(const px_wigner* w, double rx, double ry,
                                  double xix, double xiy, double* out,
                                  double* out_err);
px_status px_wigner_variance(const px_wigner* w, double rx, double ry,
                             double xix, double xiy, double* out,
                             double* out_err);
px_status px_strong_smoothed_mean(const px_model* m, double r_s, double xi_s,
                                  double z, double rx, double ry, double xix,
                                  double xiy, double* out);
px_status px_strong_variance_ratio(const px_model* m, double r_s, double xi_s,
                                   double z, double* out);
px_status px_cv_strong(double r_s, double xi_s, double rho, double* out);
/* Row-major n_r x n_xi table of CV over normalized smoothing widths. */
px_status px_fig2_contours(const double* r_s_bar, size_t n_r,
                           const double* xi_s_bar, size_t n_xi, double* out);

/* ---- Monte-Carlo ----------------------------------------------------- */

px_status px_sim_create(const px_model* m, double epsilon, double z_target,
                        double dz, int grid_n, double grid_h,
                        int n_realizations, uint64_t seed, int n_workers,
                        int edge_mask, px_sim** out);
void px_sim_free(px_sim* s);

px_status px_probes_create(px_probes** out);
void px_probes_free(px_probes* p);
px_status px_probes_set_center(px_probes* p, double x, double y);
px_status px_probes_add_mean(px_probes* p, double x, double y, size_t* index);
px_status px_probes_add_pair(px_probes* p, const double x[2],
                             const double y[2], size_t* index);
px_status px_probes_add_quad(px_probes* p, const double x1[2],
                             const double x2[2], const double y1[2],
                             const double y2[2], size_t* index);
px_status px_probes_add_intensity(px_probes* p, double x, double y,
                                  size_t* index);
px_status px_probes_add_wigner(px_probes* p, double r_s, double xi_s,
                               double rx, double ry, double xix, double xiy,
                               size_t* index);
px_status px_probes_add_checkpoint(px_probes* p, int step, size_t* index);

/* Flat record positions of each probe family (see px_stats_mean). */
px_status px_probes_mean_slot(const px_probes* p, size_t i, size_t* slot);
px_status px_probes_pair_slot(const px_probes* p, size_t i, size_t* slot);
px_status px_probes_quad_slot(const px_probes* p, size_t i, size_t* slot);
px_status px_probes_intensity2_slot(const px_probes* p, size_t i,
                                    size_t* slot);
px_status px_probes_intensity4_slot(const px_probes* p, size_t i,
                                    size_t* slot);
px_status px_probes_wigner_slot(const px_probes* p, size_t i, size_t* slot);
px_status px_probes_drift_slot(const px_probes* p, size_t* slot);
px_status px_probes_checkpoint_slot(const px_probes* p, size_t c, size_t i,
                                    size_t* slot);

px_status px_run_ensemble(const px_sim* s, const px_probes* p,
                          px_stats** out);
void px_stats_free(px_stats* st);
px_status px_stats_count(const px_stats* st, size_t* out);
px_status px_stats_record_len(const px_stats* st, size_t* out);
px_status px_stats_mean(const px_stats* st, size_t slot, double out_val[2]);
px_status px_stats_se(const px_stats* st, size_t slot, double* out);
/* Raw record of one realization (record_len {re, im} pairs). */
px_status px_stats_record(const px_stats* st, size_t i, double* out);
px_status px_stats_merge(px_stats* into, const px_stats* from);

px_status px_estimate_gsr(const px_stats* st, const size_t slots[9],
                          double* value, double* se);
px_status px_estimate_scint(const px_stats* st, const px_probes* p, size_t i,
                            double* value, double* se);

#ifdef __cplusplus
}
#endif

#endif /* PARAX_H */
