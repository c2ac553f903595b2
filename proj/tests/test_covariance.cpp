#include <doctest.h>

#include "covariance.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <random>

using namespace parax;

namespace {
const double PI = 3.14159265358979323846;

// tabulated version of the gaussian profile for cross-kind checks
Covariance tabulated_gaussian(double c0, double lc, int samples = 200,
                              double rmax = 6.0) {
    std::vector<double> r(samples), v(samples);
    for (int i = 0; i < samples; ++i) {
        r[i] = rmax * i / (samples - 1);
        v[i] = std::exp(-r[i] * r[i]);
    }
    return Covariance::tabulated(c0, lc, r, v);
}
} // namespace

TEST_CASE("gaussian point values") {
    Covariance c = Covariance::gaussian(1.0, 1.0);
    CHECK(c(Vec2{0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c(Vec2{1.0, 0.0}) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    Covariance c2 = Covariance::gaussian(2.0, 0.5);
    CHECK(c2(Vec2{0.5, 0.0}) ==
          doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("gaussian spectrum closed form") {
    Covariance c = Covariance::gaussian(1.0, 1.0);
    CHECK(c.spectrum(Vec2{0.0, 0.0}) == doctest::Approx(PI).epsilon(1e-12));
    Covariance c2 = Covariance::gaussian(1.0, 2.0);
    CHECK(c2.spectrum(Vec2{1.0, 0.0}) ==
          doctest::Approx(4.0 * PI * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("spectrum matches numeric 2-D fourier transform") {
    Covariance c = Covariance::gaussian(1.3, 0.8);
    int n = 256;
    double h = 0.05;
    std::vector<std::complex<double>> s((size_t)n * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            s[(size_t)j * n + k] = c(Vec2{(j - n / 2) * h, (k - n / 2) * h});
    GridSpectrum g = grid_fourier_2d(s, n, h);
    for (int j = n / 2 - 16; j <= n / 2 + 16; j += 4)
        for (int k = n / 2 - 16; k <= n / 2 + 16; k += 4) {
            double ref = c.spectrum(g.freq(j, k));
            CHECK(std::abs(g.values[(size_t)j * n + k].real() - ref) <
                  1e-6 * c.spectrum_radial(0.0));
        }
}

TEST_CASE("spectrum nonnegative on a grid") {
    for (const Covariance& c :
         {Covariance::gaussian(2.0, 0.7), tabulated_gaussian(1.0, 1.0)}) {
        for (int j = 0; j < 64; ++j)
            for (int k = 0; k < 64; ++k) {
                Vec2 kk{(j - 32) * 0.4, (k - 32) * 0.4};
                // tolerance at the interpolation-sidelobe level of the
                // tabulated kind
                CHECK(c.spectrum(kk) >= -1e-7 * c.spectrum_radial(0.0));
            }
    }
}

TEST_CASE("curvature") {
    CHECK(Covariance::gaussian(1.0, 1.0).curvature() ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(Covariance::gaussian(4.0, 2.0).curvature() ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(Covariance::gaussian(1.0, 10.0).curvature() ==
          doctest::Approx(0.02).epsilon(1e-12));
    // node-aligned Richardson extrapolation, table-resolution limited
    CHECK(tabulated_gaussian(1.5, 0.5).curvature() ==
          doctest::Approx(2.0 * 1.5 / 0.25).epsilon(1e-3));
}

TEST_CASE("line average basics") {
    Covariance c = Covariance::gaussian(1.0, 1.0);
    // constant integrand when zeta = 0
    Vec2 q{0.7, -0.2};
    CHECK(c.line_average(q, Vec2{0.0, 0.0}, 2.5, 1.0) ==
          doctest::Approx(2.5 * c(q)).epsilon(1e-12));
    // q=0, zeta=(k0,0), z=1: \int_0^1 e^{-t^2} dt
    CHECK(c.line_average(Vec2{0.0, 0.0}, Vec2{3.0, 0.0}, 1.0, 3.0) ==
          doctest::Approx(0.746824132812427).epsilon(1e-10));
    CHECK(c.line_average(q, Vec2{1.0, 1.0}, 0.0, 1.0) == 0.0);
}

TEST_CASE("line average closed form vs quadrature at random samples") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    std::uniform_real_distribution<double> Z(0.01, 5.0);
    Covariance c = Covariance::gaussian(0.8, 1.3);
    double k0 = 2.0;
    for (int i = 0; i < 100; ++i) {
        Vec2 q{U(gen), U(gen)}, zeta{U(gen), U(gen)};
        double z = Z(gen);
        double closed = c.line_average(q, zeta, z, k0);
        QuadratureSpec spec;
        spec.rel_tol = 1e-13;
        spec.abs_tol = 1e-16;
        QuadResult ref = integrate_1d(
            [&](double zp) { return c(q + zeta * (zp / k0)); }, 0.0, z, spec);
        CHECK(std::abs(closed - ref.value.real()) <=
              1e-10 * std::max(1.0, std::abs(ref.value.real())));
        // monotone bound for nonnegative C
        CHECK(closed >= 0.0);
        CHECK(closed <= z * c.at_zero() * (1.0 + 1e-12));
    }
}

TEST_CASE("tabulated kind tracks its gaussian source") {
    Covariance t = tabulated_gaussian(2.0, 1.5, 400, 8.0);
    Covariance g = Covariance::gaussian(2.0, 1.5);
    for (double r : {0.0, 0.3, 1.0, 2.4, 5.0})
        CHECK(t.radial(r) == doctest::Approx(g.radial(r)).epsilon(1e-6));
    CHECK(t.radial(100.0) == 0.0); // clamped beyond the table
    CHECK(t.spectrum_radial(0.0) ==
          doctest::Approx(g.spectrum_radial(0.0)).epsilon(1e-5));
    CHECK(t.line_average(Vec2{0.5, 0.0}, Vec2{1.0, -0.5}, 2.0, 1.5) ==
          doctest::Approx(
              g.line_average(Vec2{0.5, 0.0}, Vec2{1.0, -0.5}, 2.0, 1.5))
              .epsilon(1e-5));
}

TEST_CASE("admissibility check") {
    CHECK_NOTHROW(Covariance::gaussian(1.0, 1.0).check_admissible());
    CHECK_NOTHROW(tabulated_gaussian(1.0, 1.0).check_admissible());
}

TEST_CASE("invalid construction") {
    CHECK_THROWS_AS(Covariance::gaussian(-1.0, 1.0), InvalidModel);
    CHECK_THROWS_AS(Covariance::gaussian(1.0, 0.0), InvalidModel);
    CHECK_THROWS_AS(Covariance::tabulated(1.0, 1.0, {0.0, 1.0}, {1.0, 0.5}),
                    InvalidModel); // too few samples
    CHECK_THROWS_AS(
        Covariance::tabulated(1.0, 1.0, {0.1, 1.0, 2.0, 3.0},
                              {1.0, 0.5, 0.2, 0.1}),
        InvalidModel); // radius must start at 0
}

TEST_CASE("scaled copy") {
    Covariance c = Covariance::gaussian(1.2, 0.9);
    Covariance s = c.scaled(0.25);
    CHECK(s.at_zero() == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(s.lc() == c.lc());
    CHECK(s(Vec2{0.5, 0.5}) ==
          doctest::Approx(0.25 * c(Vec2{0.5, 0.5})).epsilon(1e-14));
}
