#include <doctest.h>

#include "scintillation.hpp"

#include <cmath>

using namespace parax;

TEST_CASE("scaling scales") {
    BeamMedium bm{2.0, 3.0, Covariance::gaussian(0.5, 0.7)};
    ScalingScales s = scaling_scales(bm);
    CHECK(s.z_sca == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(s.z_c == doctest::Approx(4.2).epsilon(1e-14));
}

TEST_CASE("intensity correlation at z=0") {
    BeamMedium bm{1.0, 1.0, Covariance::gaussian(1.0, 1.0)};
    MomentValue g = gamma4_limit(bm, 0.0, {0.0, 0.0}, {0.5, 0.2});
    CHECK(std::abs(g.value - 1.0) < 1e-8);
}

TEST_CASE("gamma4 agrees with the four-point moment") {
    BeamMedium bm{1.0, 1.0, Covariance::gaussian(1.0, 1.0)};
    double z = 1.5;
    Vec2 r{0.2, 0.0}, q{0.6, -0.3};
    MomentValue g = gamma4_limit(bm, z, r, q);
    MomentValue m = mu4_limit(bm, z, r, 0.5 * q, -0.5 * q, 0.5 * q, -0.5 * q);
    CHECK(std::abs(g.value - m.value) < 1e-5 + 10.0 * (g.err + m.err));
}

TEST_CASE("scint index basics") {
    BeamMedium bm{1.0, 1.0, Covariance::gaussian(1.0, 1.0)};
    CHECK(std::abs(scint_index_limit(bm, 0.0, {0.0, 0.0})) < 1e-10);
    CHECK(std::abs(scint_index_limit(bm, 0.0, {0.7, -0.4})) < 1e-8);
    double prev = 0.0;
    for (double z : {1.0, 4.0, 16.0}) {
        double s = scint_index_limit(bm, z, {0.0, 0.0});
        CHECK(s > prev);
        CHECK(s <= 1.0);
        prev = s;
    }
}

TEST_CASE("normalized scint index") {
    CHECK(std::abs(scint_index_normalized(0.0, 0.0)) < 1e-12);
    CHECK(std::abs(scint_index_normalized(0.0, 3.0)) < 1e-12);
    // saturation toward full scintillation
    CHECK(scint_index_normalized(10.0, 10.0) ==
          doctest::Approx(1.0).epsilon(0.05));
    // monotone in propagation distance at fixed geometry
    double a = scint_index_normalized(0.5, 0.5);
    double b = scint_index_normalized(2.0, 2.0);
    CHECK(b > a);
    // custom profile must be normalized at the origin
    CHECK_THROWS_AS(
        scint_index_normalized(1.0, 1.0, [](double) { return 0.5; }),
        InvalidModel);
}

TEST_CASE("on-axis scint index reduces to the normalized family") {
    for (auto [k0, r0, c0, lc, z] :
         {std::tuple{1.0, 1.0, 1.0, 1.0, 2.0},
          std::tuple{2.0, 0.7, 0.4, 1.3, 3.5}}) {
        BeamMedium bm{k0, r0, Covariance::gaussian(c0, lc)};
        double s_full = scint_index_limit(bm, z, {0.0, 0.0});
        double s_norm =
            scint_index_normalized(z / bm.z_sca(), z / bm.z_c());
        CHECK(s_full == doctest::Approx(s_norm).epsilon(1e-8));
    }
}

TEST_CASE("strong regime radii") {
    BeamMedium bm{2.0, 1.0, Covariance::gaussian(3.0, 1.0)}; // gamma = 6
    StrongRegimeStats s = strong_regime_stats(bm, 1.0);
    CHECK(s.beam_radius * s.beam_radius ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.correlation_radius * s.correlation_radius ==
          doctest::Approx(0.266667).epsilon(1e-5));
    StrongRegimeStats s0 = strong_regime_stats(bm, 0.0);
    CHECK(s0.beam_radius == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::isinf(s0.correlation_radius));
}

TEST_CASE("strong closed forms") {
    BeamMedium bm{2.0, 1.0, Covariance::gaussian(3.0, 1.0)};
    double z = 1.5;
    StrongRegimeStats s = strong_regime_stats(bm, z);
    double R2 = s.beam_radius * s.beam_radius;
    SUBCASE("gamma2 at zero offset") {
        for (Vec2 r : {Vec2{0.0, 0.0}, Vec2{0.8, -0.5}}) {
            std::complex<double> g = strong_gamma2(bm, z, r, {0.0, 0.0});
            CHECK(std::abs(g - (1.0 / R2) * std::exp(-norm2(r) / R2)) <
                  1e-12);
        }
    }
    SUBCASE("gamma4 offset dependence") {
        double g0 = strong_gamma4(bm, z, {0.0, 0.0}, {0.0, 0.0});
        double ginf = strong_gamma4(bm, z, {0.0, 0.0}, {50.0, 0.0});
        CHECK(g0 == doctest::Approx(2.0 * ginf).epsilon(1e-10));
        // saturated scintillation: var(I)/E[I]^2 = 1
        std::complex<double> g2 = strong_gamma2(bm, z, {0.0, 0.0}, {0.0, 0.0});
        CHECK(g0 / std::norm(g2) - 1.0 == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("strong gamma2 matches the exact moment deep in the regime") {
    // k0^2 C(0) z = 64 while the coherence radius stays well below lc, so
    // the quadratic covariance expansion behind the closed form is valid
    BeamMedium bm{8.0, 1.0, Covariance::gaussian(1.0, 2.0)};
    double z = 1.0;
    for (Vec2 q : {Vec2{0.0, 0.0}, Vec2{0.15, 0.0}, Vec2{0.3, 0.0}}) {
        std::complex<double> s = strong_gamma2(bm, z, {0.0, 0.0}, q);
        MomentValue e = gamma2_limit(bm, z, {0.0, 0.0}, q);
        CHECK(std::abs(s - e.value) < 0.02 * std::abs(e.value));
    }
}
