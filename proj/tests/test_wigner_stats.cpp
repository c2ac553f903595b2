#include <doctest.h>

#include "scintillation.hpp"
#include "wigner_stats.hpp"

#include <cmath>
#include <random>

using namespace parax;

namespace {
const double PI = 3.14159265358979323846;
}

TEST_CASE("smoothing parameter validation") {
    SmoothingParams sp = SmoothingParams::husimi(2.0);
    CHECK(sp.r_s == doctest::Approx(0.25).epsilon(1e-14));
    CHECK_NOTHROW(sp.validate());
    sp.xi_s = 0.0;
    CHECK_THROWS_AS(sp.validate(), InvalidModel);
    sp = {-0.1, 1.0};
    CHECK_THROWS_AS(sp.validate(), InvalidModel);
}

TEST_CASE("cv closed form") {
    SUBCASE("critical smoothing gives unit cv for every rho") {
        for (double xis : {0.3, 1.0, 4.0})
            for (double rho : {0.05, 0.7, 3.0})
                CHECK(cv_strong(SmoothingParams::husimi(xis), rho) ==
                      doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("no spatial smoothing") {
        SmoothingParams sp{0.0, 2.0};
        double rho = 0.5;
        CHECK(cv_strong(sp, rho) ==
              doctest::Approx(std::sqrt(1.0 / (4.0 * 0.25) + 1.0))
                  .epsilon(1e-12));
    }
    SUBCASE("wide smoothing suppresses fluctuations") {
        SmoothingParams sp{10.0, 10.0};
        CHECK(cv_strong(sp, 1.0) < 0.1);
    }
}

TEST_CASE("cv contour table") {
    std::vector<double> rs = {0.0, 0.5, 1.0};
    std::vector<double> xis = {1.0};
    std::vector<double> cv = fig2_contours(rs, xis);
    REQUIRE(cv.size() == 3);
    CHECK(cv[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(cv[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cv[2] == doctest::Approx(std::sqrt(2.0 / 5.0)).epsilon(1e-12));

    // monotone decreasing along both axes
    std::vector<double> rr = {0.2, 0.4, 0.8, 1.6};
    std::vector<double> xx = {0.5, 1.0, 2.0, 4.0};
    std::vector<double> grid = fig2_contours(rr, xx);
    for (size_t i = 0; i < rr.size(); ++i)
        for (size_t j = 0; j + 1 < xx.size(); ++j)
            CHECK(grid[i * xx.size() + j] > grid[i * xx.size() + j + 1]);
    for (size_t j = 0; j < xx.size(); ++j)
        for (size_t i = 0; i + 1 < rr.size(); ++i)
            CHECK(grid[i * xx.size() + j] > grid[(i + 1) * xx.size() + j]);
}

TEST_CASE("smoothed mean at z=0") {
    BeamMedium bm{1.0, 1.0, Covariance::gaussian(1.0, 1.0)};
    SmoothingParams sp = SmoothingParams::husimi(1.5);
    for (auto [r, xi] : {std::pair{Vec2{0.0, 0.0}, Vec2{0.0, 0.0}},
                         std::pair{Vec2{0.6, -0.2}, Vec2{0.4, 0.3}}}) {
        MomentValue m = smoothed_mean(bm, sp, 0.0, r, xi);
        double ref = (2.0 * PI / (sp.xi_s * sp.xi_s)) *
                     std::exp(-norm2(xi) / (2.0 * sp.xi_s * sp.xi_s) -
                              norm2(r));
        CHECK(std::abs(m.value.real() - ref) < 1e-6 * ref + 1e-9);
        CHECK(std::abs(m.value.imag()) < 1e-9);
    }
}

TEST_CASE("mean does not depend on the spatial smoothing width") {
    BeamMedium bm{1.0, 1.0, Covariance::gaussian(1.0, 1.0)};
    Vec2 r{0.3, 0.0}, xi{0.2, -0.1};
    MomentValue a =
        smoothed_mean(bm, SmoothingParams::husimi(1.0), 1.0, r, xi);
    MomentValue b = smoothed_mean(bm, SmoothingParams{1.3, 1.0}, 1.0, r, xi);
    CHECK(std::abs(a.value - b.value) < 1e-10 * std::abs(a.value));
}

TEST_CASE("second moment at z=0 carries no fluctuations") {
    BeamMedium bm{1.0, 1.0, Covariance::gaussian(1.0, 1.0)};
    SmoothingParams sp = SmoothingParams::husimi(1.0);
    Vec2 r{0.2, 0.1}, xi{0.1, 0.0};
    MomentValue m = smoothed_mean(bm, sp, 0.0, r, xi);
    MomentValue m2 = smoothed_second_moment(bm, sp, 0.0, r, xi);
    double mean2 = std::norm(m.value);
    CHECK(std::abs(m2.value.real() - mean2) < 5e-3 * mean2 + 1e-6);
}

TEST_CASE("variance is nonnegative") {
    BeamMedium bm{1.0, 1.0, Covariance::gaussian(1.0, 1.0)};
    SmoothedWigner w(bm, SmoothingParams::husimi(1.0), 1.0, 1.0);
    for (auto [r, xi] : {std::pair{Vec2{0.0, 0.0}, Vec2{0.0, 0.0}},
                         std::pair{Vec2{0.4, 0.0}, Vec2{0.0, 0.5}}}) {
        MomentValue v = w.variance(r, xi);
        CHECK(v.value.real() >= -v.err);
    }
}

TEST_CASE("strong variance ratio equals the closed-form cv squared") {
    BeamMedium bm{2.0, 1.0, Covariance::gaussian(3.0, 1.0)};
    for (double z : {0.8, 2.0}) {
        double rho = strong_regime_stats(bm, z).correlation_radius;
        for (SmoothingParams sp :
             {SmoothingParams::husimi(1.2), SmoothingParams{0.9, 0.7}}) {
            double cv = cv_strong(sp, rho);
            CHECK(strong_variance_ratio(bm, sp, z) ==
                  doctest::Approx(cv * cv).epsilon(1e-12));
        }
    }
}

TEST_CASE("strong smoothed mean stays positive and peaked on axis") {
    BeamMedium bm{2.0, 1.0, Covariance::gaussian(3.0, 1.0)};
    SmoothingParams sp = SmoothingParams::husimi(1.0);
    double z = 2.0;
    double c = strong_smoothed_mean(bm, sp, z, {0.0, 0.0}, {0.0, 0.0});
    CHECK(c > 0.0);
    CHECK(strong_smoothed_mean(bm, sp, z, {1.0, 0.0}, {0.0, 0.0}) < c);
    CHECK(strong_smoothed_mean(bm, sp, z, {0.0, 0.0}, {1.0, 0.0}) < c);
}

TEST_CASE("strong regime closed forms match the quadrature evaluation") {
    // z = 10 Z_sca with short z/k0 so the oscillatory factors stay mild
    BeamMedium bm{8.0, 1.0, Covariance::gaussian(1.0, 2.0)};
    double z = 10.0 * bm.z_sca();
    SmoothingParams sp = SmoothingParams::husimi(1.0);
    SmoothedWigner w(bm, sp, z, 0.5);
    for (auto [r, xi] : {std::pair{Vec2{0.0, 0.0}, Vec2{0.0, 0.0}},
                         std::pair{Vec2{0.3, 0.0}, Vec2{0.0, 0.4}}}) {
        double ref = strong_smoothed_mean(bm, sp, z, r, xi);
        MomentValue m = w.mean(r, xi);
        CHECK(std::abs(m.value.real() - ref) < 0.05 * ref);
        // husimi smoothing: variance/mean^2 = 1, so m2 = 2 mean^2
        MomentValue m2 = w.second_moment(r, xi);
        CHECK(std::abs(m2.value.real() - 2.0 * ref * ref) <
              0.05 * 2.0 * ref * ref);
    }
}

TEST_CASE("second moment agrees with the moment-factorization quadrature") {
    // independent evaluation straight from the limit moments: the fourth
    // moment factorizes into mu2 products, so E[W_s^2] = |mean|^2 + T - t0
    // with T the crossed-pairing integral and t0 the coherent square.
    BeamMedium bm{1.0, 1.0, Covariance::gaussian(1.0, 1.0)};
    double z = 1.0, xs = 1.0, rs = 0.5;
    Vec2 r{0.4, 0.0}, xi{0.0, 0.5};

    int ng = 81;
    double dmax = 8.0, hd = 2.0 * dmax / (ng - 1);
    std::vector<std::complex<double>> G((size_t)ng * ng);
    for (int a = 0; a < ng; ++a)
        for (int b = 0; b < ng; ++b)
            G[(size_t)a * ng + b] =
                mu2_limit(bm, z, r, Vec2{-dmax + a * hd, -dmax + b * hd},
                          Vec2{0.0, 0.0})
                    .value;
    auto lookup = [&](Vec2 d) -> std::complex<double> {
        double fa = (d.x + dmax) / hd, fb = (d.y + dmax) / hd;
        int ia = (int)fa, ib = (int)fb;
        if (ia < 0 || ib < 0 || ia + 1 >= ng || ib + 1 >= ng)
            return {0.0, 0.0};
        double ta = fa - ia, tb = fb - ib;
        return (1 - ta) * (1 - tb) * G[(size_t)ia * ng + ib] +
               ta * (1 - tb) * G[(size_t)(ia + 1) * ng + ib] +
               (1 - ta) * tb * G[(size_t)ia * ng + ib + 1] +
               ta * tb * G[(size_t)(ia + 1) * ng + ib + 1];
    };
    int nq = 40;
    const auto& gn = gauss_nodes(nq);
    const auto& gw = gauss_weights(nq);
    double yh = 5.5;
    std::complex<double> mean_ref{0.0, 0.0};
    for (int a = 0; a < nq; ++a)
        for (int b = 0; b < nq; ++b) {
            Vec2 y{yh * gn[a], yh * gn[b]};
            double wgt = yh * yh * gw[a] * gw[b] *
                         std::exp(-xs * xs * norm2(y) / 2.0);
            mean_ref += wgt * std::exp(std::complex<double>(0, -dot(xi, y))) *
                        lookup(y);
        }
    double wh = 4.5, sh = 3.0;
    std::complex<double> crossed{0.0, 0.0};
    double snorm = 0.0;
    int ns = 16;
    const auto& sn = gauss_nodes(ns);
    const auto& sw = gauss_weights(ns);
    for (int a = 0; a < ns; ++a)
        for (int b = 0; b < ns; ++b) {
            Vec2 s{sh * sn[a], sh * sn[b]};
            double ws = sh * sh * sw[a] * sw[b] *
                        std::exp(-norm2(s) / (4.0 * rs * rs));
            snorm += ws;
            std::complex<double> inner{0.0, 0.0};
            for (int c = 0; c < nq; ++c)
                for (int d = 0; d < nq; ++d) {
                    Vec2 wv{wh * gn[c], wh * gn[d]};
                    double ww = wh * wh * gw[c] * gw[d] *
                                std::exp(-xs * xs * norm2(wv));
                    inner += ww *
                             std::exp(std::complex<double>(
                                 0, -2.0 * dot(xi, wv))) *
                             lookup(s + wv) * lookup(wv - s);
                }
            crossed += ws * inner;
        }
    crossed *= 4.0 * M_PI / (xs * xs) / snorm;
    double m1sq = std::norm(mu1_limit(bm, z, r).value);
    double t0 = std::pow(2.0 * M_PI / (xs * xs), 2) *
                std::exp(-norm2(xi) / (xs * xs)) * m1sq * m1sq;
    double m2_ref = std::norm(mean_ref) + crossed.real() - t0;

    SmoothedWigner w(bm, SmoothingParams::husimi(xs), z, norm(xi));
    MomentValue m = w.mean(r, xi);
    MomentValue m2 = w.second_moment(r, xi);
    CHECK(std::abs(m.value.real() - mean_ref.real()) < m.err + 0.01);
    CHECK(std::abs(m2.value.real() - m2_ref) <
          m2.err + 2.0 * std::abs(m.value) * m.err + 0.02 * m2_ref);
}
