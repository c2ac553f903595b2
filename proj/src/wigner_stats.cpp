#include "wigner_stats.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>

namespace parax {

namespace {

constexpr std::complex<double> I{0.0, 1.0};
constexpr double TWO_PI = 2.0 * M_PI;

// Scaled Gauss-Legendre rule on [center - half, center + half] per axis.
struct Axis {
    std::vector<double> x;
    std::vector<double> w;
    Axis(int n, double center, double half) {
        const auto& nodes = gauss_nodes(n);
        const auto& weights = gauss_weights(n);
        x.resize(n);
        w.resize(n);
        for (int i = 0; i < n; ++i) {
            x[i] = center + half * nodes[i];
            w[i] = half * weights[i];
        }
    }
};

} // namespace

SmoothingParams SmoothingParams::husimi(double xi_s) {
    SmoothingParams sp;
    sp.xi_s = xi_s;
    sp.r_s = 1.0 / (2.0 * xi_s);
    sp.validate();
    return sp;
}

void SmoothingParams::validate() const {
    if (!(xi_s > 0.0) || !std::isfinite(xi_s))
        throw InvalidModel("smoothing width xi_s must be positive");
    if (!(r_s >= 0.0) || !std::isfinite(r_s))
        throw InvalidModel("smoothing width r_s must be >= 0");
}

SmoothedWigner::SmoothedWigner(const BeamMedium& bm, SmoothingParams sp,
                               double z, double xi_ref, WignerResolution res)
    : bm_(bm), sp_(sp), z_(z), res_(res) {
    bm_.validate();
    sp_.validate();
    if (z < 0.0 || !(xi_ref >= 0.0))
        throw InvalidModel("SmoothedWigner: need z >= 0 and xi_ref >= 0");
    khalf_ = std::sqrt(kernel_K(bm_, z));

    const double r0 = bm_.r0, lc = bm_.cov.lc();
    // xi extent: smoothing windows around the query points plus the
    // medium-driven spectral width of A itself. The quadratures below stay
    // within 5 sigma of their Gaussian weights, so the table extents are
    // sized for exactly that reach.
    double xi_med = bm_.k0 * std::sqrt(bm_.cov.at_zero() * z) / lc;
    double xi_max = 2.0 * xi_ref + 8.0 * sp_.xi_s + 5.0 * std::sqrt(2.0) / r0 +
                    xi_med + 1.0 / lc;
    double zeta_max = 11.0 / r0;
    if (z > 0.0) { // A vanishes identically at z = 0
        a_ = std::make_unique<AGridFamily>(bm_, z, zeta_max, res_.n_zeta_tab,
                                           xi_max, res_.n_xi_tab);
        a_lo_ = std::make_unique<AGridFamily>(bm_, z, zeta_max,
                                              res_.n_zeta_tab / 2 + 1, xi_max,
                                              res_.n_xi_tab / 2 + 1);
    }
}

std::complex<double> SmoothedWigner::incoherent_mean(const AGridFamily& fam,
                                                     Vec2 r, Vec2 xi,
                                                     int n) const {
    const double r0 = bm_.r0, xs = sp_.xi_s, zk = z_ / bm_.k0;
    // 5 sigma of the respective Gaussian weights
    Axis zx(n, 0.0, 7.1 / r0), zy(n, 0.0, 7.1 / r0);
    Axis px(n, xi.x, 5.0 * xs), py(n, xi.y, 5.0 * xs);

    std::complex<double> sum{0.0, 0.0};
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            Vec2 zeta{zx.x[a], zy.x[b]};
            double wz = zx.w[a] * zy.w[b] *
                        std::exp(-r0 * r0 * norm2(zeta) / 4.0);
            if (wz < 1e-16)
                continue;
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    Vec2 xip{px.x[c], py.x[d]};
                    double g = std::exp(-norm2(xip - xi) / (2.0 * xs * xs));
                    if (g < 1e-15)
                        continue;
                    std::complex<double> ph =
                        std::exp(I * dot(zeta, r - xip * zk));
                    sum += wz * px.w[c] * py.w[d] * g * ph * fam.at(xip, zeta);
                }
        }
    return sum;
}

MomentValue SmoothedWigner::mean(Vec2 r, Vec2 xi) const {
    const double xs = sp_.xi_s;
    const double coh = khalf_ / (std::pow(TWO_PI, 3) * xs * xs) *
                       std::exp(-norm2(xi) / (2.0 * xs * xs)) *
                       std::exp(-norm2(r) / (bm_.r0 * bm_.r0));
    const double pref =
        khalf_ * bm_.r0 * bm_.r0 / (std::pow(TWO_PI, 4) * xs * xs);
    std::complex<double> fine{0.0, 0.0}, coarse{0.0, 0.0};
    if (a_) {
        fine = incoherent_mean(*a_, r, xi, 2 * res_.n_outer);
        coarse = incoherent_mean(*a_lo_, r, xi, 2 * res_.n_outer - 4);
    }
    MomentValue mv;
    mv.value = coh + pref * fine.real();
    mv.err = pref * (std::abs(fine - coarse) + std::abs(fine.imag()));
    mv.method = MomentValue::Method::FourierGrid;
    return mv;
}

std::complex<double> SmoothedWigner::second_moment_raw(const AGridFamily& fam,
                                                       Vec2 r, Vec2 xi,
                                                       int no, int n2,
                                                       int n4) const {
    const double r0 = bm_.r0, xs = sp_.xi_s, rs = sp_.r_s, zk = z_ / bm_.k0;

    // every axis spans 5 sigma of its Gaussian weight
    Axis oxx(no, 2.0 * xi.x, 7.1 * xs), oxy(no, 2.0 * xi.y, 7.1 * xs);
    Axis ozx(no, 0.0, 5.0 / r0), ozy(no, 0.0, 5.0 / r0);
    Axis i2(n2, 0.0, 5.0 / r0);
    Axis i4z(n4, 0.0, 5.0 / r0);
    Axis i4x(n4, 0.0, 7.1 * xs);
    double b4half = rs > 0.0 ? std::min(3.6 / rs, 2.0 * fam.xi_max())
                             : 2.0 * fam.xi_max();
    Axis i4f(n4, 0.0, b4half);

    std::complex<double> acc{0.0, 0.0};
    for (int a = 0; a < no; ++a)
        for (int b = 0; b < no; ++b) {
            Vec2 xi1{oxx.x[a], oxy.x[b]};
            double gx1 = std::exp(-norm2(xi1 - 2.0 * xi) / (4.0 * xs * xs));
            if (gx1 < 1e-14)
                continue;
            for (int c = 0; c < no; ++c)
                for (int d = 0; d < no; ++d) {
                    Vec2 zeta1{ozx.x[c], ozy.x[d]};
                    double w = oxx.w[a] * oxy.w[b] * ozx.w[c] * ozy.w[d] *
                               gx1 *
                               std::exp(-r0 * r0 * norm2(zeta1) / 2.0);
                    if (std::abs(w) < 1e-15)
                        continue;
                    std::complex<double> ph1 =
                        std::exp(I * dot(zeta1, 2.0 * r - xi1 * zk));

                    std::complex<double> t1{0.0, 0.0}, t3{0.0, 0.0};
                    for (int p = 0; p < n2; ++p)
                        for (int q = 0; q < n2; ++q) {
                            Vec2 v{i2.x[p], i2.x[q]};
                            double dampg =
                                std::exp(-r0 * r0 * norm2(v) / 2.0) *
                                i2.w[p] * i2.w[q];
                            if (dampg < 1e-15)
                                continue;
                            std::complex<double> osc =
                                std::exp(-I * (zk * dot(xi1, v)));
                            t1 += dampg * osc * fam.at(xi1, v + zeta1);
                            t3 += dampg * osc * fam.at(xi1, v + zeta1);
                        }
                    t1 *= 4.0 * std::exp(-norm2(xi1) / (4.0 * xs * xs));
                    t3 *= 4.0 * std::exp(-rs * rs * norm2(xi1));

                    std::complex<double> t2{0.0, 0.0};
                    for (int p = 0; p < n4; ++p)
                        for (int q = 0; q < n4; ++q) {
                            Vec2 xi2{i4x.x[p], i4x.x[q]};
                            double g2 = std::exp(-norm2(xi2) /
                                                 (4.0 * xs * xs)) *
                                        i4x.w[p] * i4x.w[q];
                            if (g2 < 1e-14)
                                continue;
                            for (int s = 0; s < n4; ++s)
                                for (int t = 0; t < n4; ++t) {
                                    Vec2 zeta2{i4z.x[s], i4z.x[t]};
                                    double g3 = std::exp(-r0 * r0 *
                                                         norm2(zeta2) / 2.0) *
                                                i4z.w[s] * i4z.w[t];
                                    if (g3 < 1e-14)
                                        continue;
                                    std::complex<double> osc = std::exp(
                                        -I * (zk * dot(xi2, zeta2)));
                                    t2 += g2 * g3 * osc *
                                          fam.at(0.5 * (xi2 + xi1),
                                                 zeta2 + zeta1) *
                                          fam.at(0.5 * (xi2 - xi1),
                                                 zeta2 - zeta1);
                                }
                        }

                    std::complex<double> t4{0.0, 0.0};
                    for (int p = 0; p < n4; ++p)
                        for (int q = 0; q < n4; ++q) {
                            Vec2 xi2{i4z.x[p], i4z.x[q]};
                            double g2 = std::exp(-r0 * r0 * norm2(xi2) / 2.0) *
                                        i4z.w[p] * i4z.w[q];
                            if (g2 < 1e-14)
                                continue;
                            for (int s = 0; s < n4; ++s)
                                for (int t = 0; t < n4; ++t) {
                                    Vec2 zeta2{i4f.x[s], i4f.x[t]};
                                    double g3 = std::exp(-rs * rs *
                                                         norm2(zeta2)) *
                                                i4f.w[s] * i4f.w[t];
                                    if (g3 < 1e-14)
                                        continue;
                                    std::complex<double> osc = std::exp(
                                        -I * (zk * dot(xi2, zeta2)));
                                    t4 += g2 * g3 * osc *
                                          fam.at(0.5 * (zeta2 + xi1),
                                                 xi2 + zeta1) *
                                          fam.at(0.5 * (zeta2 - xi1),
                                                 xi2 - zeta1);
                                }
                        }

                    acc += w * ph1 * (t1 + t2 + t3 + t4);
                }
        }
    return acc;
}

MomentValue SmoothedWigner::second_moment(Vec2 r, Vec2 xi) const {
    const double xs = sp_.xi_s;
    const double K = khalf_ * khalf_;
    const double t0 = K / (std::pow(TWO_PI, 6) * std::pow(xs, 4)) *
                      std::exp(-norm2(xi) / (xs * xs)) *
                      std::exp(-2.0 * norm2(r) / (bm_.r0 * bm_.r0));
    const double pref = std::pow(bm_.r0, 4) * K /
                        (std::pow(TWO_PI, 8) * std::pow(xs, 4));
    std::complex<double> fine{0.0, 0.0}, coarse{0.0, 0.0};
    if (a_) {
        fine = second_moment_raw(*a_, r, xi, res_.n_outer, res_.n_inner2,
                                 res_.n_inner4);
        coarse = second_moment_raw(*a_lo_, r, xi,
                                   std::max(res_.n_outer - 2, 6),
                                   std::max(res_.n_inner2 - 2, 6),
                                   std::max(res_.n_inner4 - 2, 5));
    }
    MomentValue mv;
    mv.value = t0 + pref * fine.real();
    mv.err = pref * (std::abs(fine - coarse) + std::abs(fine.imag()));
    mv.method = MomentValue::Method::FourierGrid;
    return mv;
}

MomentValue SmoothedWigner::variance(Vec2 r, Vec2 xi) const {
    MomentValue m = mean(r, xi);
    MomentValue m2 = second_moment(r, xi);
    MomentValue mv;
    mv.value = m2.value.real() - std::norm(m.value);
    mv.err = m2.err + 2.0 * std::abs(m.value) * m.err;
    mv.method = MomentValue::Method::FourierGrid;
    // rounding floor: the z = 0 variance is an exact cancellation
    double floor = 1e-12 * std::abs(m2.value.real());
    if (mv.value.real() < -(mv.err + floor))
        throw NonConvergence(
            "smoothed Wigner variance negative beyond the error estimate");
    return mv;
}

MomentValue smoothed_mean(const BeamMedium& bm, SmoothingParams sp, double z,
                          Vec2 r, Vec2 xi, WignerResolution res) {
    return SmoothedWigner(bm, sp, z, norm(xi), res).mean(r, xi);
}

MomentValue smoothed_second_moment(const BeamMedium& bm, SmoothingParams sp,
                                   double z, Vec2 r, Vec2 xi,
                                   WignerResolution res) {
    return SmoothedWigner(bm, sp, z, norm(xi), res).second_moment(r, xi);
}

double strong_smoothed_mean(const BeamMedium& bm, SmoothingParams sp, double z,
                            Vec2 r, Vec2 xi) {
    bm.validate();
    sp.validate();
    const double gamma = bm.cov.curvature();
    const double k0 = bm.k0, r02 = bm.r0 * bm.r0, xs2 = sp.xi_s * sp.xi_s;
    const double kg = k0 * k0 * gamma * z;
    const double m = r02 + gamma * z * z * z / 24.0;
    const double D = m * (1.0 + 4.0 * xs2 / kg) + z * z * xs2 / (2.0 * k0 * k0);
    const double E = m + (z * z * xs2 / (2.0 * k0 * k0)) /
                             (1.0 + 4.0 * xs2 / kg);
    Vec2 shift = r - xi * (z / (2.0 * k0 * (1.0 + 4.0 * xs2 / kg)));
    return 8.0 * M_PI / kg * r02 / D *
           std::exp(-norm2(shift) / E - 2.0 * norm2(xi) / (kg + 4.0 * xs2));
}

double strong_variance_ratio(const BeamMedium& bm, SmoothingParams sp,
                             double z) {
    bm.validate();
    sp.validate();
    const double gamma = bm.cov.curvature();
    const double k0 = bm.k0, r02 = bm.r0 * bm.r0, xs2 = sp.xi_s * sp.xi_s;
    const double kg = k0 * k0 * gamma * z;
    const double m = r02 + gamma * z * z * z / 24.0;
    const double num = m * (1.0 + 4.0 * xs2 / kg) +
                       z * z * xs2 / (2.0 * k0 * k0);
    const double den = m * (4.0 * sp.r_s * sp.r_s * xs2 + 4.0 * xs2 / kg) +
                       z * z * xs2 / (2.0 * k0 * k0);
    return num / den;
}

double cv_strong(SmoothingParams sp, double rho_z) {
    sp.validate();
    if (!(rho_z > 0.0))
        throw InvalidModel("cv_strong: rho_z must be positive");
    const double r2 = rho_z * rho_z;
    return std::sqrt((1.0 / (sp.xi_s * sp.xi_s * r2) + 1.0) /
                     (4.0 * sp.r_s * sp.r_s / r2 + 1.0));
}

std::vector<double> fig2_contours(const std::vector<double>& r_s_bar,
                                  const std::vector<double>& xi_s_bar) {
    std::vector<double> out;
    out.reserve(r_s_bar.size() * xi_s_bar.size());
    for (double rb : r_s_bar) {
        if (!(rb >= 0.0))
            throw InvalidModel("fig2_contours: r_s_bar must be >= 0");
        for (double xb : xi_s_bar) {
            if (!(xb > 0.0))
                throw InvalidModel("fig2_contours: xi_s_bar must be > 0");
            out.push_back(std::sqrt((1.0 / (xb * xb) + 1.0) /
                                    (4.0 * rb * rb + 1.0)));
        }
    }
    return out;
}

} // namespace parax
