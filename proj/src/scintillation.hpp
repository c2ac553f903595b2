#pragma once

#include "moments.hpp"

#include <functional>

namespace parax {

struct ScalingScales {
    double z_sca = 0.0;
    double z_c = 0.0;
};

ScalingScales scaling_scales(const BeamMedium& bm);

/// Intensity correlation -exp(-k0^2 C(0) z/2) exp(-2|r|^2/r0^2)
/// + |I(0)|^2 + |I(q)|^2 with I the mu2-type integral at the given offset.
MomentValue gamma4_limit(const BeamMedium& bm, double z, Vec2 r, Vec2 q,
                         const QuadratureSpec& spec = {});

/// Field correlation at midpoint r and offset q (the I(q) integral itself).
MomentValue gamma2_limit(const BeamMedium& bm, double z, Vec2 r, Vec2 q,
                         const QuadratureSpec& spec = {});

/// Scintillation index 1 - exp(-2|r|^2/r0^2)/|J(z,r)|^2 with J the radial
/// u-integral; always <= 1.
double scint_index_limit(const BeamMedium& bm, double z, Vec2 r,
                         const QuadratureSpec& spec = {});

/// Figure-1 family: S as a function of z/Z_sca and z/Z_c only, for a
/// normalized radial profile c_tilde with c_tilde(0) = 1 (default gaussian
/// e^{-x^2}).
double scint_index_normalized(double z_over_zsca, double z_over_zc,
                              const std::function<double(double)>& c_tilde = {},
                              const QuadratureSpec& spec = {});

/// Strong-scattering beam radius and intensity correlation radius.
/// rho_z = +inf at z = 0 (sentinel, not an error).
struct StrongRegimeStats {
    double beam_radius = 0.0;        // R_z
    double correlation_radius = 0.0; // rho_z
};
StrongRegimeStats strong_regime_stats(const BeamMedium& bm, double z);

/// Gaussian closed forms valid for k0^2 C(0) z >> 1.
std::complex<double> strong_gamma2(const BeamMedium& bm, double z, Vec2 r,
                                   Vec2 q);
double strong_gamma4(const BeamMedium& bm, double z, Vec2 r, Vec2 q);

} // namespace parax
