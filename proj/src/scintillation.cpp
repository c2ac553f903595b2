#include "scintillation.hpp"

#include "errors.hpp"

#include <cmath>
#include <limits>

namespace parax {

ScalingScales scaling_scales(const BeamMedium& bm) {
    bm.validate();
    return {bm.z_sca(), bm.z_c()};
}

MomentValue gamma2_limit(const BeamMedium& bm, double z, Vec2 r, Vec2 q,
                         const QuadratureSpec& spec) {
    // offset y - x = -q matches the C(zeta z'/k0 - q) integrand
    return mu2_limit(bm, z, r, 0.5 * q, -0.5 * q, spec);
}

MomentValue gamma4_limit(const BeamMedium& bm, double z, Vec2 r, Vec2 q,
                         const QuadratureSpec& spec) {
    MomentValue i0 = gamma2_limit(bm, z, r, {0.0, 0.0}, spec);
    MomentValue iq = gamma2_limit(bm, z, r, q, spec);
    const double coh = std::exp(-bm.k0 * bm.k0 * bm.cov.at_zero() * z / 2.0) *
                       std::exp(-2.0 * norm2(r) / (bm.r0 * bm.r0));
    MomentValue mv;
    mv.value = -coh + std::norm(i0.value) + std::norm(iq.value);
    mv.err = 2.0 * (i0.err * std::abs(i0.value) + iq.err * std::abs(iq.value));
    mv.method = MomentValue::Method::Quadrature;
    mv.converged = i0.converged && iq.converged;
    return mv;
}

double scint_index_limit(const BeamMedium& bm, double z, Vec2 r,
                         const QuadratureSpec& spec) {
    bm.validate();
    if (z < 0.0)
        throw InvalidModel("scint_index_limit: z must be >= 0");
    const double k0 = bm.k0, r0 = bm.r0;

    QuadratureSpec wide = spec;
    wide.truncation_sigmas = std::max(spec.truncation_sigmas, 15.0);
    if (norm2(r) == 0.0) {
        // isotropic integrand: the u-integral is radial
        auto g = [&](double u) {
            double med = (k0 * k0 / 4.0) *
                         bm.cov.line_average({0.0, 0.0}, {u / r0, 0.0}, z, k0);
            return std::exp(med - u * u / 4.0) * u;
        };
        QuadResult qr = integrate_1d(g, 0.0, 2.0 * wide.truncation_sigmas,
                                     wide);
        if (!qr.converged)
            throw NonConvergence("scint_index_limit: radial integral");
        double j = 0.5 * qr.value.real();
        return 1.0 - 1.0 / (j * j);
    }
    auto f = [&](Vec2 u) {
        double med = (k0 * k0 / 4.0) *
                     bm.cov.line_average({0.0, 0.0}, u / r0, z, k0);
        return std::exp(std::complex<double>(med - norm2(u) / 4.0,
                                             dot(u, r) / r0));
    };
    QuadResult qr = integrate_2d(f, 2.0, wide);
    if (!qr.converged)
        throw NonConvergence("scint_index_limit: u-integral did not converge");
    const double j2 = std::norm(qr.value / (4.0 * M_PI));
    return 1.0 - std::exp(-2.0 * norm2(r) / (r0 * r0)) / j2;
}

double scint_index_normalized(double z_over_zsca, double z_over_zc,
                              const std::function<double(double)>& c_tilde,
                              const QuadratureSpec& spec) {
    if (z_over_zsca < 0.0 || z_over_zc < 0.0)
        throw InvalidModel("scint_index_normalized: arguments must be >= 0");
    if (c_tilde && std::abs(c_tilde(0.0) - 1.0) > 1e-10)
        throw InvalidModel("scint_index_normalized: c_tilde(0) must be 1");

    // ray average \int_0^1 c_tilde(a s) ds; gaussian default in closed form
    auto ray = [&](double a) {
        if (!c_tilde) {
            if (std::abs(a) < 1e-8)
                return 1.0 - a * a / 3.0;
            return std::sqrt(M_PI) * std::erf(a) / (2.0 * a);
        }
        QuadratureSpec inner = spec;
        inner.rel_tol = 1e-10;
        return integrate_1d([&](double s) { return c_tilde(a * s); }, 0.0, 1.0,
                            inner)
            .value.real();
    };

    const double U = 30.0; // tail beyond U bounded by e^{-U^2/4} e^{2 z/Z_sca}
    auto f = [&](double u) {
        return std::exp(2.0 * z_over_zsca * ray(u * z_over_zc) - u * u / 4.0) *
               u;
    };
    QuadResult qr = integrate_1d(f, 0.0, U, spec);
    if (!qr.converged)
        throw NonConvergence("scint_index_normalized: outer integral");
    double denom = std::norm(qr.value);
    return 1.0 - 4.0 / denom;
}

StrongRegimeStats strong_regime_stats(const BeamMedium& bm, double z) {
    bm.validate();
    if (z < 0.0)
        throw InvalidModel("strong_regime_stats: z must be >= 0");
    const double gamma = bm.cov.curvature();
    const double r02 = bm.r0 * bm.r0;
    StrongRegimeStats s;
    s.beam_radius = std::sqrt(r02 + gamma * z * z * z / 6.0);
    if (z == 0.0) {
        s.correlation_radius = std::numeric_limits<double>::infinity();
        return s;
    }
    double rho2 = 4.0 / (bm.k0 * bm.k0 * gamma * z) *
                  (r02 + gamma * z * z * z / 6.0) /
                  (r02 + gamma * z * z * z / 24.0);
    s.correlation_radius = std::sqrt(rho2);
    return s;
}

std::complex<double> strong_gamma2(const BeamMedium& bm, double z, Vec2 r,
                                   Vec2 q) {
    bm.validate();
    const double gamma = bm.cov.curvature();
    const double k0 = bm.k0, r02 = bm.r0 * bm.r0;
    const double Rz2 = r02 + gamma * z * z * z / 6.0;
    const double M = r02 + gamma * z * z * z / 24.0;
    double re = -norm2(r) / Rz2 - k0 * k0 * gamma * z * norm2(q) / 8.0 * M / Rz2;
    double im = k0 * gamma * z * z * dot(r, q) / (4.0 * Rz2);
    return (r02 / Rz2) * std::exp(std::complex<double>(re, im));
}

double strong_gamma4(const BeamMedium& bm, double z, Vec2 r, Vec2 q) {
    bm.validate();
    const double gamma = bm.cov.curvature();
    const double k0 = bm.k0, r02 = bm.r0 * bm.r0;
    const double Rz2 = r02 + gamma * z * z * z / 6.0;
    const double M = r02 + gamma * z * z * z / 24.0;
    return (r02 * r02 / (Rz2 * Rz2)) * std::exp(-2.0 * norm2(r) / Rz2) *
           (1.0 + std::exp(-k0 * k0 * gamma * z * norm2(q) / 4.0 * M / Rz2));
}

} // namespace parax
