#pragma once

#include "covariance.hpp"
#include "quadrature.hpp"
#include "vec2.hpp"

#include <complex>
#include <memory>
#include <vector>

namespace parax {

/// Beam + medium parameter bundle shared by every moment evaluator.
struct BeamMedium {
    double k0 = 1.0;   // wavenumber
    double r0 = 1.0;   // initial beam radius
    Covariance cov = Covariance::gaussian(1.0, 1.0);

    void validate() const; // throws InvalidModel

    /// Scattering mean free path: e-folding distance of the mean field's
    /// intensity damping exp(-z/z_sca).
    double z_sca() const { return 8.0 / (k0 * k0 * cov.at_zero()); }
    /// Distance at which diffraction effects are order one.
    double z_c() const { return k0 * r0 * cov.lc(); }
};

struct MomentValue {
    enum class Method { ClosedForm, Quadrature, FourierGrid };

    std::complex<double> value{0.0, 0.0};
    double err = 0.0;
    Method method = Method::ClosedForm;
    bool converged = true;
};

/// E[u(z,x)] for the Gaussian source: (r0^2/r_z^2) e^{-k0^2 C(0) z/8}
/// e^{-|x|^2/(2 r_z^2)} with the complex width r_z^2 = r0^2 (1 + iz/(k0 r0^2)).
MomentValue mean_field(const BeamMedium& bm, double z, Vec2 x);

/// E[u(r+q/2) conj(u)(r-q/2)] via the 2-D zeta-integral representation.
MomentValue mutual_coherence(const BeamMedium& bm, double z, Vec2 r, Vec2 q,
                             const QuadratureSpec& spec = {});

/// Mean Wigner transform: 4-D (zeta, q) integral, real-valued.
MomentValue mean_wigner(const BeamMedium& bm, double z, Vec2 r, Vec2 xi,
                        const QuadratureSpec& spec = {});

/// Residual of the radiative transport equation satisfied by mean_wigner,
/// with z- and r-derivatives by central finite differences and the
/// collision integral folded back into the same (zeta, q) representation.
struct TransportResidual {
    double residual = 0.0; // |lhs - rhs|
    double scale = 0.0;    // |W| at the evaluation point, for relative checks
};
TransportResidual transport_residual(const BeamMedium& bm, double z, Vec2 r,
                                     Vec2 xi, const QuadratureSpec& spec = {});

/// K(z) = (2 pi)^8 exp(-k0^2 C(0) z / 2).
double kernel_K(const BeamMedium& bm, double z);

/// A(z, xi, zeta): Fourier transform in x of
/// exp((k0^2/4) \int_0^z C(x + zeta z'/k0) dz') - 1, divided by 2 (2 pi)^2.
/// Dispatches between adaptive quadrature and an FFT grid depending on the
/// phase swing of e^{-i xi.x} across the support of the bracket.
MomentValue kernel_A(const BeamMedium& bm, double z, Vec2 xi, Vec2 zeta,
                     const QuadratureSpec& spec = {});

/// A(z, ., zeta) sampled on a centered xi-grid for one zeta (one FFT).
class AGrid {
  public:
    AGrid(const BeamMedium& bm, double z, Vec2 zeta, double xi_max);

    std::complex<double> at(Vec2 xi) const;
    double xi_max() const { return xi_max_; }
    double dxi() const { return spec_.dxi; }
    int n() const { return spec_.n; }

  private:
    GridSpectrum spec_;
    Vec2 center_; // spatial center of the sampled bracket
    double xi_max_;
};

/// A tabulated on a 4-D lattice (zeta-grid) x (xi-grid); one FFT per zeta
/// node, resampled onto a compact xi-table. Quadrilinear interpolation,
/// zero outside the covered box. Read-only after construction.
class AGridFamily {
  public:
    AGridFamily(const BeamMedium& bm, double z, double zeta_max, int n_zeta,
                double xi_max, int n_xi);

    std::complex<double> at(Vec2 xi, Vec2 zeta) const;
    double zeta_max() const { return zeta_max_; }
    double xi_max() const { return xi_max_; }

  private:
    // values_[(jz * n_zeta + kz) * n_xi^2 + jx * n_xi + kx]
    std::vector<std::complex<double>> values_;
    int n_zeta_;
    int n_xi_;
    double zeta_max_;
    double xi_max_;
    double dzeta_;
    double dxi_;
};

/// Scaled limits: the (z, r, x, y) arguments are the order-one variables of
/// the scintillation regime; no epsilon appears here.
MomentValue mu1_limit(const BeamMedium& bm, double z, Vec2 r);
MomentValue mu2_limit(const BeamMedium& bm, double z, Vec2 r, Vec2 x, Vec2 y,
                      const QuadratureSpec& spec = {});
MomentValue mu4_limit(const BeamMedium& bm, double z, Vec2 r, Vec2 x1, Vec2 x2,
                      Vec2 y1, Vec2 y2, const QuadratureSpec& spec = {});

/// |mu4 - (mu2 mu2 + mu2 mu2 - mu1 mu1 conj(mu1) conj(mu1))|: consistency of
/// the quadrature paths (the independent statistical check is Monte Carlo).
double gaussian_summation_residual(const BeamMedium& bm, double z, Vec2 r,
                                   Vec2 x1, Vec2 x2, Vec2 y1, Vec2 y2,
                                   const QuadratureSpec& spec = {});

} // namespace parax
