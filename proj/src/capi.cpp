#include "parax.h"

#include "covariance.hpp"
#include "errors.hpp"
#include "mc/ensemble.hpp"
#include "moments.hpp"
#include "scintillation.hpp"
#include "wigner_stats.hpp"

#include <cstring>
#include <string>

using namespace parax;

struct px_model {
    BeamMedium bm;
};
struct px_wigner {
    SmoothedWigner w;
};
struct px_sim {
    SimConfig cfg;
};
struct px_probes {
    ProbeSet ps;
};
struct px_stats {
    EnsembleStats st;
};

namespace {

thread_local std::string g_last_error = "no error";
thread_local QuadratureSpec g_spec{};

px_status fail(px_status code, const char* what) {
    g_last_error = what;
    return code;
}

template <typename F>
px_status guarded(F&& f) {
    try {
        f();
        return PX_OK;
    } catch (const InvalidModel& e) {
        return fail(PX_INVALID, e.what());
    } catch (const NonConvergence& e) {
        return fail(PX_NO_CONVERGE, e.what());
    } catch (const std::exception& e) {
        return fail(PX_ERROR, e.what());
    } catch (...) {
        return fail(PX_ERROR, "unknown failure");
    }
}

void put(double out[2], std::complex<double> v) {
    out[0] = v.real();
    out[1] = v.imag();
}

px_status require(bool ok, const char* what) {
    return ok ? PX_OK : fail(PX_INVALID, what);
}

SmoothingParams make_sp(double r_s, double xi_s) {
    if (r_s < 0.0)
        return SmoothingParams::husimi(xi_s);
    return SmoothingParams{r_s, xi_s};
}

} // namespace

extern "C" {

const char* px_version(void) { return "1.0.0"; }

const char* px_last_error(void) { return g_last_error.c_str(); }

px_status px_model_create_gaussian(double k0, double r0, double c0, double lc,
                                   px_model** out) {
    if (px_status s = require(out != nullptr, "null output handle"))
        return s;
    return guarded([&] {
        BeamMedium bm{k0, r0, Covariance::gaussian(c0, lc)};
        bm.validate();
        *out = new px_model{bm};
    });
}

px_status px_model_create_tabulated(double k0, double r0, double c0, double lc,
                                    const double* radius, const double* value,
                                    size_t count, px_model** out) {
    if (px_status s = require(out && radius && value, "null argument"))
        return s;
    return guarded([&] {
        std::vector<double> r(radius, radius + count);
        std::vector<double> v(value, value + count);
        BeamMedium bm{k0, r0,
                      Covariance::tabulated(c0, lc, std::move(r),
                                            std::move(v))};
        bm.validate();
        *out = new px_model{bm};
    });
}

void px_model_free(px_model* m) { delete m; }

px_status px_model_check(const px_model* m) {
    if (px_status s = require(m != nullptr, "null model"))
        return s;
    return guarded([&] { m->bm.cov.check_admissible(); });
}

px_status px_model_scales(const px_model* m, double* z_sca, double* z_c) {
    if (px_status s = require(m && z_sca && z_c, "null argument"))
        return s;
    return guarded([&] {
        *z_sca = m->bm.z_sca();
        *z_c = m->bm.z_c();
    });
}

px_status px_quad_defaults(double rel_tol, double abs_tol, int max_level) {
    return guarded([&] {
        QuadratureSpec spec;
        spec.rel_tol = rel_tol;
        spec.abs_tol = abs_tol;
        spec.max_level = max_level;
        spec.validate();
        g_spec = spec;
    });
}

px_status px_cov_value(const px_model* m, double x, double y, double* out) {
    if (px_status s = require(m && out, "null argument"))
        return s;
    return guarded([&] { *out = m->bm.cov(Vec2{x, y}); });
}

px_status px_cov_spectrum(const px_model* m, double kx, double ky,
                          double* out) {
    if (px_status s = require(m && out, "null argument"))
        return s;
    return guarded([&] { *out = m->bm.cov.spectrum(Vec2{kx, ky}); });
}

px_status px_cov_curvature(const px_model* m, double* out) {
    if (px_status s = require(m && out, "null argument"))
        return s;
    return guarded([&] { *out = m->bm.cov.curvature(); });
}

px_status px_mean_field(const px_model* m, double z, double x, double y,
                        double out_val[2]) {
    if (px_status s = require(m && out_val, "null argument"))
        return s;
    return guarded([&] { put(out_val, mean_field(m->bm, z, {x, y}).value); });
}

namespace {

px_status moment_out(const MomentValue& mv, double out_val[2],
                     double* out_err) {
    put(out_val, mv.value);
    if (out_err)
        *out_err = mv.err;
    if (!mv.converged)
        return fail(PX_NO_CONVERGE, "quadrature tolerance not reached");
    return PX_OK;
}

} // namespace

px_status px_mutual_coherence(const px_model* m, double z, double rx,
                              double ry, double qx, double qy,
                              double out_val[2], double* out_err) {
    if (px_status s = require(m && out_val, "null argument"))
        return s;
    MomentValue mv;
    if (px_status s = guarded(
            [&] { mv = mutual_coherence(m->bm, z, {rx, ry}, {qx, qy}, g_spec); }))
        return s;
    return moment_out(mv, out_val, out_err);
}

px_status px_mean_wigner(const px_model* m, double z, double rx, double ry,
                         double xix, double xiy, double out_val[2],
                         double* out_err) {
    if (px_status s = require(m && out_val, "null argument"))
        return s;
    MomentValue mv;
    if (px_status s = guarded(
            [&] { mv = mean_wigner(m->bm, z, {rx, ry}, {xix, xiy}, g_spec); }))
        return s;
    return moment_out(mv, out_val, out_err);
}

px_status px_transport_residual(const px_model* m, double z, double rx,
                                double ry, double xix, double xiy,
                                double* out_residual, double* out_scale) {
    if (px_status s = require(m && out_residual, "null argument"))
        return s;
    return guarded([&] {
        TransportResidual tr =
            transport_residual(m->bm, z, {rx, ry}, {xix, xiy}, g_spec);
        *out_residual = tr.residual;
        if (out_scale)
            *out_scale = tr.scale;
    });
}

px_status px_mu1_limit(const px_model* m, double z, double rx, double ry,
                       double out_val[2]) {
    if (px_status s = require(m && out_val, "null argument"))
        return s;
    return guarded([&] { put(out_val, mu1_limit(m->bm, z, {rx, ry}).value); });
}

px_status px_mu2_limit(const px_model* m, double z, double rx, double ry,
                       double x1, double y1, double x2, double y2,
                       double out_val[2], double* out_err) {
    if (px_status s = require(m && out_val, "null argument"))
        return s;
    MomentValue mv;
    if (px_status s = guarded([&] {
            mv = mu2_limit(m->bm, z, {rx, ry}, {x1, y1}, {x2, y2}, g_spec);
        }))
        return s;
    return moment_out(mv, out_val, out_err);
}

px_status px_mu4_limit(const px_model* m, double z, double rx, double ry,
                       const double x1[2], const double x2[2],
                       const double y1[2], const double y2[2],
                       double out_val[2], double* out_err) {
    if (px_status s =
            require(m && x1 && x2 && y1 && y2 && out_val, "null argument"))
        return s;
    MomentValue mv;
    if (px_status s = guarded([&] {
            mv = mu4_limit(m->bm, z, {rx, ry}, {x1[0], x1[1]}, {x2[0], x2[1]},
                           {y1[0], y1[1]}, {y2[0], y2[1]}, g_spec);
        }))
        return s;
    return moment_out(mv, out_val, out_err);
}

px_status px_kernel_a(const px_model* m, double z, double xix, double xiy,
                      double zx, double zy, double out_val[2],
                      double* out_err) {
    if (px_status s = require(m && out_val, "null argument"))
        return s;
    MomentValue mv;
    if (px_status s = guarded([&] {
            mv = kernel_A(m->bm, z, {xix, xiy}, {zx, zy}, g_spec);
        }))
        return s;
    return moment_out(mv, out_val, out_err);
}

px_status px_gsr_residual(const px_model* m, double z, double rx, double ry,
                          const double x1[2], const double x2[2],
                          const double y1[2], const double y2[2],
                          double* out) {
    if (px_status s =
            require(m && x1 && x2 && y1 && y2 && out, "null argument"))
        return s;
    return guarded([&] {
        *out = gaussian_summation_residual(
            m->bm, z, {rx, ry}, {x1[0], x1[1]}, {x2[0], x2[1]},
            {y1[0], y1[1]}, {y2[0], y2[1]}, g_spec);
    });
}

px_status px_gamma2_limit(const px_model* m, double z, double rx, double ry,
                          double qx, double qy, double out_val[2],
                          double* out_err) {
    if (px_status s = require(m && out_val, "null argument"))
        return s;
    MomentValue mv;
    if (px_status s = guarded(
            [&] { mv = gamma2_limit(m->bm, z, {rx, ry}, {qx, qy}, g_spec); }))
        return s;
    return moment_out(mv, out_val, out_err);
}

px_status px_gamma4_limit(const px_model* m, double z, double rx, double ry,
                          double qx, double qy, double out_val[2],
                          double* out_err) {
    if (px_status s = require(m && out_val, "null argument"))
        return s;
    MomentValue mv;
    if (px_status s = guarded(
            [&] { mv = gamma4_limit(m->bm, z, {rx, ry}, {qx, qy}, g_spec); }))
        return s;
    return moment_out(mv, out_val, out_err);
}

px_status px_scint_index(const px_model* m, double z, double rx, double ry,
                         double* out) {
    if (px_status s = require(m && out, "null argument"))
        return s;
    return guarded([&] { *out = scint_index_limit(m->bm, z, {rx, ry}, g_spec); });
}

px_status px_scint_index_normalized(double z_over_zsca, double zc_ratio,
                                    double* out) {
    if (px_status s = require(out != nullptr, "null argument"))
        return s;
    return guarded([&] {
        double z_over_zc = 0.0;
        if (z_over_zsca != 0.0) {
            if (!(zc_ratio > 0.0))
                throw InvalidModel("zc_ratio must be positive");
            z_over_zc = z_over_zsca / zc_ratio;
        }
        *out = scint_index_normalized(z_over_zsca, z_over_zc);
    });
}

px_status px_strong_stats(const px_model* m, double z, double* beam_radius,
                          double* correlation_radius) {
    if (px_status s = require(m && beam_radius && correlation_radius,
                              "null argument"))
        return s;
    return guarded([&] {
        StrongRegimeStats st = strong_regime_stats(m->bm, z);
        *beam_radius = st.beam_radius;
        *correlation_radius = st.correlation_radius;
    });
}

px_status px_strong_gamma4(const px_model* m, double z, double rx, double ry,
                           double qx, double qy, double* out) {
    if (px_status s = require(m && out, "null argument"))
        return s;
    return guarded(
        [&] { *out = strong_gamma4(m->bm, z, {rx, ry}, {qx, qy}); });
}

px_status px_wigner_create(const px_model* m, double r_s, double xi_s,
                           double z, double xi_ref, px_wigner** out) {
    if (px_status s = require(m && out, "null argument"))
        return s;
    return guarded([&] {
        *out = new px_wigner{
            SmoothedWigner(m->bm, make_sp(r_s, xi_s), z, xi_ref)};
    });
}

void px_wigner_free(px_wigner* w) { delete w; }

namespace {

px_status real_moment_out(const MomentValue& mv, double* out,
                          double* out_err) {
    *out = mv.value.real();
    if (out_err)
        *out_err = mv.err;
    if (!mv.converged)
        return fail(PX_NO_CONVERGE, "quadrature tolerance not reached");
    return PX_OK;
}

} // namespace

px_status px_wigner_mean(const px_wigner* w, double rx, double ry, double xix,
                         double xiy, double* out, double* out_err) {
    if (px_status s = require(w && out, "null argument"))
        return s;
    MomentValue mv;
    if (px_status s =
            guarded([&] { mv = w->w.mean({rx, ry}, {xix, xiy}); }))
        return s;
    return real_moment_out(mv, out, out_err);
}

px_status px_wigner_second_moment(const px_wigner* w, double rx, double ry,
                                  double xix, double xiy, double* out,
                                  double* out_err) {
    if (px_status s = require(w && out, "null argument"))
        return s;
    MomentValue mv;
    if (px_status s =
            guarded([&] { mv = w->w.second_moment({rx, ry}, {xix, xiy}); }))
        return s;
    return real_moment_out(mv, out, out_err);
}

px_status px_wigner_variance(const px_wigner* w, double rx, double ry,
                             double xix, double xiy, double* out,
                             double* out_err) {
    if (px_status s = require(w && out, "null argument"))
        return s;
    MomentValue mv;
    if (px_status s =
            guarded([&] { mv = w->w.variance({rx, ry}, {xix, xiy}); }))
        return s;
    return real_moment_out(mv, out, out_err);
}

px_status px_strong_smoothed_mean(const px_model* m, double r_s, double xi_s,
                                  double z, double rx, double ry, double xix,
                                  double xiy, double* out) {
    if (px_status s = require(m && out, "null argument"))
        return s;
    return guarded([&] {
        *out = strong_smoothed_mean(m->bm, make_sp(r_s, xi_s), z, {rx, ry},
                                    {xix, xiy});
    });
}

px_status px_strong_variance_ratio(const px_model* m, double r_s, double xi_s,
                                   double z, double* out) {
    if (px_status s = require(m && out, "null argument"))
        return s;
    return guarded([&] {
        *out = strong_variance_ratio(m->bm, make_sp(r_s, xi_s), z);
    });
}

px_status px_cv_strong(double r_s, double xi_s, double rho, double* out) {
    if (px_status s = require(out != nullptr, "null argument"))
        return s;
    return guarded([&] { *out = cv_strong(make_sp(r_s, xi_s), rho); });
}

px_status px_fig2_contours(const double* r_s_bar, size_t n_r,
                           const double* xi_s_bar, size_t n_xi, double* out) {
    if (px_status s = require(r_s_bar && xi_s_bar && out, "null argument"))
        return s;
    return guarded([&] {
        std::vector<double> rb(r_s_bar, r_s_bar + n_r);
        std::vector<double> xb(xi_s_bar, xi_s_bar + n_xi);
        std::vector<double> table = fig2_contours(rb, xb);
        std::copy(table.begin(), table.end(), out);
    });
}

px_status px_sim_create(const px_model* m, double epsilon, double z_target,
                        double dz, int grid_n, double grid_h,
                        int n_realizations, uint64_t seed, int n_workers,
                        int edge_mask, px_sim** out) {
    if (px_status s = require(m && out, "null argument"))
        return s;
    return guarded([&] {
        SimConfig cfg;
        cfg.bm = m->bm;
        cfg.epsilon = epsilon;
        cfg.z_target = z_target;
        cfg.dz = dz;
        cfg.grid = Grid2D{grid_n, grid_h};
        cfg.n_realizations = n_realizations;
        cfg.seed = seed;
        cfg.n_workers = n_workers;
        cfg.edge_mask = edge_mask != 0;
        cfg.validate();
        *out = new px_sim{cfg};
    });
}

void px_sim_free(px_sim* s) { delete s; }

px_status px_probes_create(px_probes** out) {
    if (px_status s = require(out != nullptr, "null argument"))
        return s;
    *out = new px_probes{};
    return PX_OK;
}

void px_probes_free(px_probes* p) { delete p; }

px_status px_probes_set_center(px_probes* p, double x, double y) {
    if (px_status s = require(p != nullptr, "null probes"))
        return s;
    p->ps.center = {x, y};
    return PX_OK;
}

px_status px_probes_add_mean(px_probes* p, double x, double y, size_t* index) {
    if (px_status s = require(p != nullptr, "null probes"))
        return s;
    if (index)
        *index = p->ps.mean_points.size();
    p->ps.mean_points.push_back({x, y});
    return PX_OK;
}

px_status px_probes_add_pair(px_probes* p, const double x[2],
                             const double y[2], size_t* index) {
    if (px_status s = require(p && x && y, "null argument"))
        return s;
    if (index)
        *index = p->ps.pair_probes.size();
    p->ps.pair_probes.push_back({Vec2{x[0], x[1]}, Vec2{y[0], y[1]}});
    return PX_OK;
}

px_status px_probes_add_quad(px_probes* p, const double x1[2],
                             const double x2[2], const double y1[2],
                             const double y2[2], size_t* index) {
    if (px_status s = require(p && x1 && x2 && y1 && y2, "null argument"))
        return s;
    if (index)
        *index = p->ps.quad_probes.size();
    p->ps.quad_probes.push_back({Vec2{x1[0], x1[1]}, Vec2{x2[0], x2[1]},
                                 Vec2{y1[0], y1[1]}, Vec2{y2[0], y2[1]}});
    return PX_OK;
}

px_status px_probes_add_intensity(px_probes* p, double x, double y,
                                  size_t* index) {
    if (px_status s = require(p != nullptr, "null probes"))
        return s;
    if (index)
        *index = p->ps.intensity_points.size();
    p->ps.intensity_points.push_back({x, y});
    return PX_OK;
}

px_status px_probes_add_wigner(px_probes* p, double r_s, double xi_s,
                               double rx, double ry, double xix, double xiy,
                               size_t* index) {
    if (px_status s = require(p != nullptr, "null probes"))
        return s;
    return guarded([&] {
        if (index)
            *index = p->ps.wigner_probes.size();
        p->ps.wigner_probes.push_back(
            {make_sp(r_s, xi_s), {rx, ry}, {xix, xiy}});
    });
}

px_status px_probes_add_checkpoint(px_probes* p, int step, size_t* index) {
    if (px_status s = require(p != nullptr, "null probes"))
        return s;
    if (index)
        *index = p->ps.checkpoints.size();
    p->ps.checkpoints.push_back(step);
    return PX_OK;
}

#define PX_SLOT_IMPL(fn, vecfield, slotfn)                                    \
    px_status fn(const px_probes* p, size_t i, size_t* slot) {                \
        if (px_status s = require(p && slot, "null argument"))               \
            return s;                                                         \
        if (i >= p->ps.vecfield.size())                                       \
            return fail(PX_INVALID, "probe index out of range");              \
        *slot = p->ps.slotfn(i);                                              \
        return PX_OK;                                                         \
    }

PX_SLOT_IMPL(px_probes_mean_slot, mean_points, mean_index)
PX_SLOT_IMPL(px_probes_pair_slot, pair_probes, pair_index)
PX_SLOT_IMPL(px_probes_quad_slot, quad_probes, quad_index)
PX_SLOT_IMPL(px_probes_intensity2_slot, intensity_points, i2_index)
PX_SLOT_IMPL(px_probes_intensity4_slot, intensity_points, i4_index)
PX_SLOT_IMPL(px_probes_wigner_slot, wigner_probes, wigner_index)

#undef PX_SLOT_IMPL

px_status px_probes_drift_slot(const px_probes* p, size_t* slot) {
    if (px_status s = require(p && slot, "null argument"))
        return s;
    *slot = p->ps.drift_index();
    return PX_OK;
}

px_status px_probes_checkpoint_slot(const px_probes* p, size_t c, size_t i,
                                    size_t* slot) {
    if (px_status s = require(p && slot, "null argument"))
        return s;
    if (c >= p->ps.checkpoints.size() || i >= p->ps.mean_points.size())
        return fail(PX_INVALID, "checkpoint index out of range");
    *slot = p->ps.checkpoint_index(c, i);
    return PX_OK;
}

px_status px_run_ensemble(const px_sim* s, const px_probes* p,
                          px_stats** out) {
    if (px_status st = require(s && p && out, "null argument"))
        return st;
    return guarded([&] { *out = new px_stats{run_ensemble(s->cfg, p->ps)}; });
}

void px_stats_free(px_stats* st) { delete st; }

px_status px_stats_count(const px_stats* st, size_t* out) {
    if (px_status s = require(st && out, "null argument"))
        return s;
    *out = st->st.count();
    return PX_OK;
}

px_status px_stats_record_len(const px_stats* st, size_t* out) {
    if (px_status s = require(st && out, "null argument"))
        return s;
    *out = st->st.record_len;
    return PX_OK;
}

px_status px_stats_mean(const px_stats* st, size_t slot, double out_val[2]) {
    if (px_status s = require(st && out_val, "null argument"))
        return s;
    if (st->st.count() == 0 || slot >= st->st.record_len)
        return fail(PX_INVALID, "stats slot out of range");
    put(out_val, st->st.mean(slot));
    return PX_OK;
}

px_status px_stats_se(const px_stats* st, size_t slot, double* out) {
    if (px_status s = require(st && out, "null argument"))
        return s;
    if (st->st.count() == 0 || slot >= st->st.record_len)
        return fail(PX_INVALID, "stats slot out of range");
    *out = st->st.se(slot);
    return PX_OK;
}

px_status px_stats_record(const px_stats* st, size_t i, double* out) {
    if (px_status s = require(st && out, "null argument"))
        return s;
    if (i >= st->st.count())
        return fail(PX_INVALID, "realization index out of range");
    const std::complex<double>* rec = st->st.record(i);
    for (size_t j = 0; j < st->st.record_len; ++j) {
        out[2 * j] = rec[j].real();
        out[2 * j + 1] = rec[j].imag();
    }
    return PX_OK;
}

px_status px_stats_merge(px_stats* into, const px_stats* from) {
    if (px_status s = require(into && from, "null argument"))
        return s;
    return guarded([&] { into->st.merge(from->st); });
}

px_status px_estimate_gsr(const px_stats* st, const size_t slots[9],
                          double* value, double* se) {
    if (px_status s = require(st && slots && value && se, "null argument"))
        return s;
    return guarded([&] {
        GsrIndices g{slots[0], slots[1], slots[2], slots[3], slots[4],
                     slots[5], slots[6], slots[7], slots[8]};
        for (int k = 0; k < 9; ++k)
            if (slots[k] >= st->st.record_len)
                throw InvalidModel("stats slot out of range");
        Estimate e = estimate_gsr_residual(st->st, g);
        *value = e.value;
        *se = e.se;
    });
}

px_status px_estimate_scint(const px_stats* st, const px_probes* p, size_t i,
                            double* value, double* se) {
    if (px_status s = require(st && p && value && se, "null argument"))
        return s;
    return guarded([&] {
        if (i >= p->ps.intensity_points.size() ||
            p->ps.record_len() != st->st.record_len)
            throw InvalidModel("probe set does not match the stats layout");
        Estimate e = estimate_scint_index(st->st, p->ps, i);
        *value = e.value;
        *se = e.se;
    });
}

} // extern "C"
