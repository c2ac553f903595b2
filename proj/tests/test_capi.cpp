#include <doctest.h>

#include <parax.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

namespace {
struct Model {
    px_model* m = nullptr;
    Model(double k0, double r0, double c0, double lc) {
        REQUIRE(px_model_create_gaussian(k0, r0, c0, lc, &m) == PX_OK);
    }
    ~Model() { px_model_free(m); }
};
} // namespace

TEST_CASE("version and error strings are always available") {
    CHECK(px_version() != nullptr);
    CHECK(px_last_error() != nullptr);
}

TEST_CASE("model lifecycle and argument validation") {
    px_model* m = nullptr;
    CHECK(px_model_create_gaussian(1.0, 1.0, 1.0, 1.0, &m) == PX_OK);
    REQUIRE(m != nullptr);
    CHECK(px_model_check(m) == PX_OK);
    double zs = 0.0, zc = 0.0;
    CHECK(px_model_scales(m, &zs, &zc) == PX_OK);
    CHECK(zs == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(zc == doctest::Approx(1.0).epsilon(1e-14));
    px_model_free(m);

    px_model* bad = nullptr;
    CHECK(px_model_create_gaussian(1.0, 1.0, -1.0, 1.0, &bad) == PX_INVALID);
    CHECK(bad == nullptr);
    CHECK(std::strlen(px_last_error()) > 0);
    CHECK(px_model_create_gaussian(1.0, 1.0, 1.0, 1.0, nullptr) ==
          PX_INVALID);
    CHECK(px_mean_field(nullptr, 0.0, 0.0, 0.0, nullptr) == PX_INVALID);
}

TEST_CASE("tabulated model") {
    std::vector<double> r, v;
    for (int i = 0; i < 100; ++i) {
        r.push_back(6.0 * i / 99.0);
        v.push_back(std::exp(-r.back() * r.back()));
    }
    px_model* m = nullptr;
    REQUIRE(px_model_create_tabulated(1.0, 1.0, 1.0, 1.0, r.data(), v.data(),
                                      r.size(), &m) == PX_OK);
    double c = 0.0;
    CHECK(px_cov_value(m, 1.0, 0.0, &c) == PX_OK);
    CHECK(c == doctest::Approx(std::exp(-1.0)).epsilon(1e-5));
    px_model_free(m);
}

TEST_CASE("covariance accessors") {
    Model m(1.0, 1.0, 1.0, 1.0);
    double out = 0.0;
    CHECK(px_cov_value(m.m, 0.0, 0.0, &out) == PX_OK);
    CHECK(out == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(px_cov_spectrum(m.m, 0.0, 0.0, &out) == PX_OK);
    CHECK(out == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(px_cov_curvature(m.m, &out) == PX_OK);
    CHECK(out == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("moment entry points") {
    Model m(1.0, 1.0, 1.0, 1.0);
    double val[2] = {0.0, 0.0};
    double err = 0.0;

    CHECK(px_mean_field(m.m, 0.0, 0.0, 0.0, val) == PX_OK);
    CHECK(val[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(val[1] == doctest::Approx(0.0).epsilon(1e-14));

    CHECK(px_mutual_coherence(m.m, 0.0, 0.0, 0.0, 0.4, 0.3, val, &err) ==
          PX_OK);
    CHECK(val[0] == doctest::Approx(std::exp(-0.25 / 4.0)).epsilon(1e-8));

    CHECK(px_mu1_limit(m.m, 1.0, 0.0, 0.0, val) == PX_OK);
    CHECK(val[0] == doctest::Approx(std::exp(-0.125)).epsilon(1e-12));

    double res = 0.0, scale = 0.0;
    CHECK(px_transport_residual(m.m, 0.8, 0.1, 0.0, 0.2, 0.0, &res, &scale) ==
          PX_OK);
    CHECK(res < 1e-4 * scale);

    double x1[2] = {0.1, 0.0}, x2[2] = {0.0, 0.2};
    double y1[2] = {-0.1, 0.1}, y2[2] = {0.2, -0.1};
    double gsr = 1.0;
    CHECK(px_gsr_residual(m.m, 0.0, 0.0, 0.0, x1, x2, y1, y2, &gsr) == PX_OK);
    CHECK(gsr < 1e-10);

    CHECK(px_kernel_a(m.m, 0.0, 1.0, 0.5, 0.3, -0.2, val, &err) == PX_OK);
    CHECK(val[0] == 0.0);
    CHECK(val[1] == 0.0);
}

TEST_CASE("scintillation entry points") {
    Model m(1.0, 1.0, 1.0, 1.0);
    double s = 1.0;
    CHECK(px_scint_index(m.m, 0.0, 0.0, 0.0, &s) == PX_OK);
    CHECK(std::abs(s) < 1e-10);

    CHECK(px_scint_index_normalized(0.0, 1.0, &s) == PX_OK);
    CHECK(std::abs(s) < 1e-12);
    CHECK(px_scint_index_normalized(10.0, 1.0, &s) == PX_OK);
    CHECK(s == doctest::Approx(1.0).epsilon(0.05));
    CHECK(px_scint_index_normalized(1.0, -1.0, &s) == PX_INVALID);

    Model strong(2.0, 1.0, 3.0, 1.0);
    double R = 0.0, rho = 0.0;
    CHECK(px_strong_stats(strong.m, 1.0, &R, &rho) == PX_OK);
    CHECK(R * R == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rho * rho == doctest::Approx(0.266667).epsilon(1e-5));
}

TEST_CASE("wigner entry points") {
    double cv = 0.0;
    CHECK(px_cv_strong(-1.0, 1.5, 0.7, &cv) == PX_OK); // -1 = husimi
    CHECK(cv == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(px_cv_strong(0.5, 1.0, 0.9, &cv) == PX_OK);
    CHECK(cv == doctest::Approx(1.0).epsilon(1e-12));

    double rs[2] = {0.0, 1.0}, xis[1] = {1.0}, table[2] = {0.0, 0.0};
    CHECK(px_fig2_contours(rs, 2, xis, 1, table) == PX_OK);
    CHECK(table[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(table[1] == doctest::Approx(std::sqrt(0.4)).epsilon(1e-12));

    Model m(1.0, 1.0, 1.0, 1.0);
    px_wigner* w = nullptr;
    REQUIRE(px_wigner_create(m.m, -1.0, 1.5, 0.0, 1.0, &w) == PX_OK);
    double mean = 0.0, err = 0.0;
    CHECK(px_wigner_mean(w, 0.0, 0.0, 0.0, 0.0, &mean, &err) == PX_OK);
    CHECK(mean == doctest::Approx(2.0 * M_PI / 2.25).epsilon(1e-5));
    px_wigner_free(w);

    double ratio = 0.0;
    Model strong(2.0, 1.0, 3.0, 1.0);
    CHECK(px_strong_variance_ratio(strong.m, -1.0, 1.2, 1.5, &ratio) == PX_OK);
    CHECK(ratio == doctest::Approx(1.0).epsilon(1e-10)); // husimi cv = 1
}

TEST_CASE("quadrature defaults validation") {
    CHECK(px_quad_defaults(1e-8, 1e-12, 12) == PX_OK);
    CHECK(px_quad_defaults(0.0, 1e-12, 12) == PX_INVALID);
    CHECK(px_quad_defaults(1e-8, 1e-12, 2) == PX_INVALID);
    CHECK(px_quad_defaults(1e-8, 1e-12, 12) == PX_OK);
}

TEST_CASE("ensemble round trip through the C surface") {
    Model m(1.0, 1.0, 1.0, 1.0);
    px_sim* sim = nullptr;
    REQUIRE(px_sim_create(m.m, 0.5, 0.5, 0.25, 64, 0.3, 12, 99, 2, 0,
                          &sim) == PX_OK);

    px_probes* p = nullptr;
    REQUIRE(px_probes_create(&p) == PX_OK);
    size_t im = 0, ii = 0, ip = 0;
    CHECK(px_probes_set_center(p, 0.0, 0.0) == PX_OK);
    CHECK(px_probes_add_mean(p, 0.0, 0.0, &im) == PX_OK);
    CHECK(px_probes_add_intensity(p, 0.0, 0.0, &ii) == PX_OK);
    double x[2] = {0.2, 0.0}, y[2] = {-0.2, 0.0};
    CHECK(px_probes_add_pair(p, x, y, &ip) == PX_OK);

    px_stats* st = nullptr;
    REQUIRE(px_run_ensemble(sim, p, &st) == PX_OK);
    size_t count = 0, len = 0;
    CHECK(px_stats_count(st, &count) == PX_OK);
    CHECK(count == 12);
    CHECK(px_stats_record_len(st, &len) == PX_OK);
    CHECK(len >= 5); // mean + pair + i2 + i4 + drift

    size_t slot = 0;
    REQUIRE(px_probes_mean_slot(p, 0, &slot) == PX_OK);
    double mv[2] = {0.0, 0.0};
    CHECK(px_stats_mean(st, slot, mv) == PX_OK);
    CHECK(mv[0] > 0.5); // weak damping at these parameters
    double se = 0.0;
    CHECK(px_stats_se(st, slot, &se) == PX_OK);
    CHECK(se >= 0.0);

    std::vector<double> rec(2 * len);
    CHECK(px_stats_record(st, 0, rec.data()) == PX_OK);
    REQUIRE(px_probes_drift_slot(p, &slot) == PX_OK);
    CHECK(rec[2 * slot] < 1e-10);

    double sval = 0.0, sse = 0.0;
    CHECK(px_estimate_scint(st, p, 0, &sval, &sse) == PX_OK);
    CHECK(std::isfinite(sval));

    // merging a stats object into itself must fail on duplicate ids
    CHECK(px_stats_merge(st, st) == PX_INVALID);

    px_stats_free(st);
    px_probes_free(p);
    px_sim_free(sim);
}
