#pragma once

#include "errors.hpp"
#include "vec2.hpp"

#include <string>
#include <vector>

namespace parax {

/// Isotropic transverse covariance C(x) of the medium fluctuations together
/// with its 2-D Fourier transform (power spectral density) and the line
/// integrals of C that the moment formulas reduce to.
///
/// Two kinds are supported:
///  - gaussian:  C(x) = c0 * exp(-|x|^2 / lc^2)
///  - tabulated: radial samples of the normalized profile Ct(|x|/lc),
///               C(x) = c0 * Ct(|x|/lc), monotone-cubic interpolated and
///               clamped to 0 beyond the table (approximation, C decays).
///
/// Only nonnegative integrable kernels are admitted. Immutable after
/// construction; safe for concurrent reads.
class Covariance {
  public:
    enum class Kind { Gaussian, Tabulated };

    static Covariance gaussian(double c0, double lc);
    /// radius: |x|/lc sample locations (strictly increasing, starting at 0),
    /// value: Ct at those radii with Ct(0) = 1 expected (scaled by c0).
    static Covariance tabulated(double c0, double lc,
                                std::vector<double> radius,
                                std::vector<double> value);

    Kind kind() const { return kind_; }
    double c0() const { return c0_; }
    double lc() const { return lc_; }

    double operator()(Vec2 x) const { return radial(norm(x)); }
    double at_zero() const { return c0_; }
    /// C as a function of |x|.
    double radial(double r) const;

    /// Spectrum C^(k) = \int C(x) e^{-i k.x} dx  (real, >= 0).
    double spectrum(Vec2 k) const { return spectrum_radial(norm(k)); }
    double spectrum_radial(double k) const;

    /// Curvature gamma in C(x) = C(0) - (gamma/2)|x|^2 + o(|x|^2).
    /// Gaussian kind: 2 c0 / lc^2.  Tabulated kind: Richardson-extrapolated
    /// second differences sampled at table nodes; throws InvalidModel if the
    /// extrapolation does not settle to 1e-3 relative.
    double curvature() const;

    /// \int_0^z C(q + zeta * z'/k0) dz'.  Gaussian kind in closed form via
    /// erf; tabulated kind by adaptive quadrature to 1e-10 relative.
    double line_average(Vec2 q, Vec2 zeta, double z, double k0) const;

    /// Same profile with the amplitude multiplied by factor > 0.
    Covariance scaled(double factor) const;

    /// Verifies the admissibility hypothesis numerically: spectrum >= 0 on a
    /// grid (Bochner) and the trapezoid estimate of \int |C| converging under
    /// domain doubling within 1%.  Throws InvalidModel on failure.
    void check_admissible() const;

  private:
    Covariance() = default;

    Kind kind_ = Kind::Gaussian;
    double c0_ = 1.0;
    double lc_ = 1.0;

    // tabulated kind
    std::vector<double> radius_; // in units of lc
    std::vector<double> value_;  // Ct samples
    std::vector<double> slope_;  // pchip slopes
    double radial_tabulated(double r) const;
};

} // namespace parax
