#pragma once

#include "moments.hpp"

#include <vector>

namespace parax {

struct SmoothingParams {
    double r_s = 0.0;  // spatial smoothing width, 0 = no smoothing in r
    double xi_s = 1.0; // angular smoothing width

    /// Critical configuration r_s = 1/(2 xi_s): the nonnegative kernel case.
    static SmoothingParams husimi(double xi_s);
    void validate() const;
};

/// Lattice resolutions of the A-table and the tensor quadratures; the
/// second moment is a 4-D outer x 4-D inner integral over interpolated A,
/// so intended accuracy is ~1e-3 relative, not quadrature-grade.
struct WignerResolution {
    int n_outer = 10;   // nodes per axis, outer (xi1, zeta1) integral
    int n_inner2 = 12;  // nodes per axis, 2-D inner integrals
    int n_inner4 = 8;   // nodes per axis, 4-D inner integrals
    int n_zeta_tab = 27;
    int n_xi_tab = 101;
};

/// Evaluator for the mean and second moment of the smoothed Wigner
/// transform at fixed (medium, smoothing, z). Builds the A-table once;
/// evaluation points up to |xi| <= xi_ref share it.
class SmoothedWigner {
  public:
    SmoothedWigner(const BeamMedium& bm, SmoothingParams sp, double z,
                   double xi_ref, WignerResolution res = {});

    /// Coherent narrow-cone term + incoherent A-integral; independent of r_s.
    MomentValue mean(Vec2 r, Vec2 xi) const;
    MomentValue second_moment(Vec2 r, Vec2 xi) const;
    /// second_moment - mean^2; throws NonConvergence if negative beyond the
    /// combined error estimate.
    MomentValue variance(Vec2 r, Vec2 xi) const;

  private:
    std::complex<double> incoherent_mean(const AGridFamily& fam, Vec2 r, Vec2 xi,
                                         int n) const;
    std::complex<double> second_moment_raw(const AGridFamily& fam, Vec2 r,
                                           Vec2 xi, int n_outer, int n_inner2,
                                           int n_inner4) const;

    BeamMedium bm_;
    SmoothingParams sp_;
    double z_;
    WignerResolution res_;
    double khalf_; // K(z)^{1/2}
    // full-resolution table plus a half-density one; error estimates compare
    // evaluations across both, so table interpolation bias is accounted for.
    std::unique_ptr<AGridFamily> a_, a_lo_;
};

MomentValue smoothed_mean(const BeamMedium& bm, SmoothingParams sp, double z,
                          Vec2 r, Vec2 xi, WignerResolution res = {});
MomentValue smoothed_second_moment(const BeamMedium& bm, SmoothingParams sp,
                                   double z, Vec2 r, Vec2 xi,
                                   WignerResolution res = {});

/// Strong-scattering closed form of the smoothed mean (k0^2 C(0) z >> 1).
double strong_smoothed_mean(const BeamMedium& bm, SmoothingParams sp, double z,
                            Vec2 r, Vec2 xi);
/// variance / mean^2 in the strong regime; equals cv_strong^2 when rho_z is
/// taken from the strong-regime correlation radius.
double strong_variance_ratio(const BeamMedium& bm, SmoothingParams sp,
                             double z);

/// ((1/(xi_s^2 rho_z^2) + 1) / (4 r_s^2 / rho_z^2 + 1))^{1/2}.
double cv_strong(SmoothingParams sp, double rho_z);

/// CV over a grid of normalized widths r_s_bar = r_s/rho_z (rows) and
/// xi_s_bar = xi_s rho_z (columns); row-major.
std::vector<double> fig2_contours(const std::vector<double>& r_s_bar,
                                  const std::vector<double>& xi_s_bar);

} // namespace parax
