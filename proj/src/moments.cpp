#include "moments.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>

namespace parax {

namespace {

constexpr std::complex<double> I{0.0, 1.0};
constexpr double TWO_PI = 2.0 * M_PI;

int next_pow2(int x) {
    int n = 64;
    while (n < x)
        n *= 2;
    return n;
}

} // namespace

void BeamMedium::validate() const {
    if (!(k0 > 0.0) || !std::isfinite(k0))
        throw InvalidModel("k0 must be positive and finite");
    if (!(r0 > 0.0) || !std::isfinite(r0))
        throw InvalidModel("r0 must be positive and finite");
    if (!(z_sca() > 0.0) || !std::isfinite(z_sca()))
        throw InvalidModel("derived scale z_sca is not positive finite");
    if (!(z_c() > 0.0) || !std::isfinite(z_c()))
        throw InvalidModel("derived scale z_c is not positive finite");
}

MomentValue mean_field(const BeamMedium& bm, double z, Vec2 x) {
    bm.validate();
    if (z < 0.0)
        throw InvalidModel("mean_field: z must be >= 0");
    const double r02 = bm.r0 * bm.r0;
    const std::complex<double> rz2 = r02 * (1.0 + I * z / (bm.k0 * r02));
    const double damp = -bm.k0 * bm.k0 * bm.cov.at_zero() * z / 8.0;
    MomentValue mv;
    mv.value = (r02 / rz2) * std::exp(damp) * std::exp(-norm2(x) / (2.0 * rz2));
    mv.method = MomentValue::Method::ClosedForm;
    return mv;
}

MomentValue mutual_coherence(const BeamMedium& bm, double z, Vec2 r, Vec2 q,
                             const QuadratureSpec& spec) {
    bm.validate();
    if (z < 0.0)
        throw InvalidModel("mutual_coherence: z must be >= 0");
    const double k0 = bm.k0, r0 = bm.r0;
    const double c0z = bm.cov.at_zero() * z;
    auto f = [&](Vec2 zeta) {
        Vec2 d = q - zeta * (z / k0);
        double med = (k0 * k0 / 4.0) *
                     (bm.cov.line_average(q, -zeta, z, k0) - c0z);
        double damp = -norm2(d) / (4.0 * r0 * r0) - r0 * r0 * norm2(zeta) / 4.0;
        return std::exp(std::complex<double>(damp + med, dot(zeta, r)));
    };
    QuadResult qr = integrate_2d(f, 2.0 / r0, spec);
    MomentValue mv;
    mv.value = (r0 * r0 / (4.0 * M_PI)) * qr.value;
    mv.err = (r0 * r0 / (4.0 * M_PI)) * qr.err;
    mv.method = MomentValue::Method::Quadrature;
    mv.converged = qr.converged;
    return mv;
}

namespace {

// Shared 4-D (zeta, q) representation behind mean_wigner and the transport
// collision term: prefactor r0^2/(4 pi), optional extra weight in (zeta, q).
MomentValue wigner_repr(const BeamMedium& bm, double z, Vec2 r, Vec2 xi,
                        const std::function<double(Vec2, Vec2)>& extra,
                        const QuadratureSpec& spec) {
    const double k0 = bm.k0, r0 = bm.r0;
    const double c0z = bm.cov.at_zero() * z;
    const Vec2 drift = r - xi * (z / k0);

    QuadratureSpec inner_spec = spec;
    inner_spec.rel_tol = std::max(spec.rel_tol, 1e-9);

    bool all_conv = true;
    double inner_err = 0.0;
    auto outer = [&](Vec2 zeta) {
        auto f = [&](Vec2 q) {
            double med = (k0 * k0 / 4.0) *
                         (bm.cov.line_average(q, zeta, z, k0) - c0z);
            double damp = -r0 * r0 * norm2(zeta) / 4.0 -
                          norm2(q) / (4.0 * r0 * r0);
            double w = extra ? extra(zeta, q) : 1.0;
            return w * std::exp(std::complex<double>(
                           damp + med, dot(zeta, drift) - dot(xi, q)));
        };
        QuadResult in = integrate_2d(f, 2.0 * r0, inner_spec);
        all_conv = all_conv && in.converged;
        inner_err = std::max(inner_err, in.err);
        return in.value;
    };
    QuadResult out = integrate_2d(outer, 2.0 / r0, spec);

    MomentValue mv;
    const double pref = r0 * r0 / (4.0 * M_PI);
    mv.value = pref * out.value;
    mv.err = pref * (out.err + inner_err);
    mv.method = MomentValue::Method::Quadrature;
    mv.converged = out.converged && all_conv;
    return mv;
}

} // namespace

MomentValue mean_wigner(const BeamMedium& bm, double z, Vec2 r, Vec2 xi,
                        const QuadratureSpec& spec) {
    bm.validate();
    if (z < 0.0)
        throw InvalidModel("mean_wigner: z must be >= 0");
    MomentValue mv = wigner_repr(bm, z, r, xi, nullptr, spec);
    mv.err += std::abs(mv.value.imag());
    mv.value = mv.value.real();
    return mv;
}

TransportResidual transport_residual(const BeamMedium& bm, double z, Vec2 r,
                                     Vec2 xi, const QuadratureSpec& spec) {
    bm.validate();
    if (!(z > 0.0))
        throw InvalidModel("transport_residual: z must be > 0");

    const double hz = 1e-3 * z;
    const double hr = 1e-3 * bm.r0;
    auto W = [&](double zz, Vec2 rr) {
        return mean_wigner(bm, zz, rr, xi, spec).value.real();
    };

    double dWdz = (W(z + hz, r) - W(z - hz, r)) / (2.0 * hz);
    double dWdx = (W(z, r + Vec2{hr, 0.0}) - W(z, r - Vec2{hr, 0.0})) / (2.0 * hr);
    double dWdy = (W(z, r + Vec2{0.0, hr}) - W(z, r - Vec2{0.0, hr})) / (2.0 * hr);

    // \int C_hat(k) [W(xi - k) - W(xi)] dk folded back into the (zeta, q)
    // representation: it multiplies the integrand by (k0^2/4)(C(q + zeta
    // z/k0) - C(0)).
    const double k0 = bm.k0;
    auto extra = [&](Vec2 zeta, Vec2 q) {
        return (k0 * k0 / 4.0) *
               (bm.cov(q + zeta * (z / k0)) - bm.cov.at_zero());
    };
    double coll = wigner_repr(bm, z, r, xi, extra, spec).value.real();

    TransportResidual tr;
    tr.residual = std::abs(dWdz + (dot(xi, {dWdx, dWdy})) / k0 - coll);
    tr.scale = std::abs(W(z, r));
    return tr;
}

double kernel_K(const BeamMedium& bm, double z) {
    bm.validate();
    if (z < 0.0)
        throw InvalidModel("kernel_K: z must be >= 0");
    return std::pow(TWO_PI, 8) *
           std::exp(-bm.k0 * bm.k0 * bm.cov.at_zero() * z / 2.0);
}

namespace {

// exp((k0^2/4) \int_0^z C(x + zeta z'/k0) dz') - 1: the transformed bracket
// of A. Supported near the segment swept by -zeta z'/k0.
double a_bracket(const BeamMedium& bm, double z, Vec2 zeta, Vec2 x) {
    double line = bm.cov.line_average(x, zeta, z, bm.k0);
    return std::expm1(bm.k0 * bm.k0 / 4.0 * line);
}

// Center and half-extent of the bracket's support.
void a_support(const BeamMedium& bm, double z, Vec2 zeta, Vec2& center,
               double& half) {
    center = zeta * (-z / (2.0 * bm.k0));
    half = norm(zeta) * z / (2.0 * bm.k0) + 8.0 * bm.cov.lc();
}

} // namespace

AGrid::AGrid(const BeamMedium& bm, double z, Vec2 zeta, double xi_max) {
    bm.validate();
    if (z < 0.0 || !(xi_max > 0.0))
        throw InvalidModel("AGrid: need z >= 0 and xi_max > 0");
    double half;
    a_support(bm, z, zeta, center_, half);
    const double h_max = M_PI / (1.2 * xi_max);
    int n = next_pow2((int)std::ceil(2.0 * half / h_max));
    n = std::min(n, 1024);
    const double h = 2.0 * half / n;

    std::vector<std::complex<double>> samples((size_t)n * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            Vec2 x = center_ + Vec2{(j - n / 2) * h, (k - n / 2) * h};
            samples[(size_t)j * n + k] = a_bracket(bm, z, zeta, x);
        }
    spec_ = grid_fourier_2d(samples, n, h);
    xi_max_ = std::min(xi_max, M_PI / h);
}

std::complex<double> AGrid::at(Vec2 xi) const {
    // the samples were taken around center_, so undo the induced phase
    std::complex<double> g = spec_.interp(xi);
    return g * std::exp(-I * dot(xi, center_)) / (2.0 * TWO_PI * TWO_PI);
}

MomentValue kernel_A(const BeamMedium& bm, double z, Vec2 xi, Vec2 zeta,
                     const QuadratureSpec& spec) {
    bm.validate();
    if (z < 0.0)
        throw InvalidModel("kernel_A: z must be >= 0");
    MomentValue mv;
    if (z == 0.0) {
        mv.method = MomentValue::Method::ClosedForm;
        return mv;
    }
    Vec2 center;
    double half;
    a_support(bm, z, zeta, center, half);
    const double phase_swing = norm(xi) * 2.0 * half;
    if (phase_swing < 40.0) {
        auto f = [&](Vec2 x) {
            return a_bracket(bm, z, zeta, x) *
                   std::exp(-I * dot(xi, x));
        };
        QuadResult qr = integrate_2d(f, half / spec.truncation_sigmas, spec,
                                     center);
        mv.value = qr.value / (2.0 * TWO_PI * TWO_PI);
        mv.err = qr.err / (2.0 * TWO_PI * TWO_PI);
        mv.converged = qr.converged;
        mv.method = MomentValue::Method::Quadrature;
        return mv;
    }
    const double xi_max = 1.2 * norm(xi) + 1.0 / bm.cov.lc();
    AGrid fine(bm, z, zeta, xi_max);
    AGrid coarse(bm, z, zeta, 0.55 * xi_max);
    mv.value = fine.at(xi);
    mv.err = std::abs(fine.at(xi) - coarse.at(xi));
    mv.method = MomentValue::Method::FourierGrid;
    return mv;
}

AGridFamily::AGridFamily(const BeamMedium& bm, double z, double zeta_max,
                         int n_zeta, double xi_max, int n_xi)
    : n_zeta_(n_zeta), n_xi_(n_xi), zeta_max_(zeta_max), xi_max_(xi_max) {
    if (n_zeta < 2 || n_xi < 2 || !(zeta_max > 0.0) || !(xi_max > 0.0))
        throw InvalidModel("AGridFamily: bad lattice parameters");
    dzeta_ = 2.0 * zeta_max / (n_zeta - 1);
    dxi_ = 2.0 * xi_max / (n_xi - 1);
    values_.resize((size_t)n_zeta * n_zeta * n_xi * n_xi);
    for (int jz = 0; jz < n_zeta; ++jz)
        for (int kz = 0; kz < n_zeta; ++kz) {
            Vec2 zeta{-zeta_max + jz * dzeta_, -zeta_max + kz * dzeta_};
            AGrid grid(bm, z, zeta, 1.1 * xi_max);
            size_t base = ((size_t)jz * n_zeta + kz) * n_xi * n_xi;
            for (int jx = 0; jx < n_xi; ++jx)
                for (int kx = 0; kx < n_xi; ++kx) {
                    Vec2 xi{-xi_max + jx * dxi_, -xi_max + kx * dxi_};
                    values_[base + (size_t)jx * n_xi + kx] = grid.at(xi);
                }
        }
}

std::complex<double> AGridFamily::at(Vec2 xi, Vec2 zeta) const {
    double uz = (zeta.x + zeta_max_) / dzeta_;
    double vz = (zeta.y + zeta_max_) / dzeta_;
    double ux = (xi.x + xi_max_) / dxi_;
    double vx = (xi.y + xi_max_) / dxi_;
    if (uz < 0 || vz < 0 || ux < 0 || vx < 0 || uz > n_zeta_ - 1 ||
        vz > n_zeta_ - 1 || ux > n_xi_ - 1 || vx > n_xi_ - 1)
        return {0.0, 0.0};
    int jz = std::min((int)uz, n_zeta_ - 2);
    int kz = std::min((int)vz, n_zeta_ - 2);
    int jx = std::min((int)ux, n_xi_ - 2);
    int kx = std::min((int)vx, n_xi_ - 2);
    double fz = uz - jz, gz = vz - kz, fx = ux - jx, gx = vx - kx;

    auto xi_plane = [&](int dj, int dk) {
        size_t base = ((size_t)(jz + dj) * n_zeta_ + (kz + dk)) *
                      (size_t)n_xi_ * n_xi_;
        auto v = [&](int a, int b) {
            return values_[base + (size_t)(jx + a) * n_xi_ + (kx + b)];
        };
        return (1 - fx) * (1 - gx) * v(0, 0) + fx * (1 - gx) * v(1, 0) +
               (1 - fx) * gx * v(0, 1) + fx * gx * v(1, 1);
    };
    return (1 - fz) * (1 - gz) * xi_plane(0, 0) + fz * (1 - gz) * xi_plane(1, 0) +
           (1 - fz) * gz * xi_plane(0, 1) + fz * gz * xi_plane(1, 1);
}

MomentValue mu1_limit(const BeamMedium& bm, double z, Vec2 r) {
    bm.validate();
    if (z < 0.0)
        throw InvalidModel("mu1_limit: z must be >= 0");
    MomentValue mv;
    mv.value = std::exp(-bm.k0 * bm.k0 * bm.cov.at_zero() * z / 8.0) *
               std::exp(-norm2(r) / (2.0 * bm.r0 * bm.r0));
    mv.method = MomentValue::Method::ClosedForm;
    return mv;
}

MomentValue mu2_limit(const BeamMedium& bm, double z, Vec2 r, Vec2 x, Vec2 y,
                      const QuadratureSpec& spec) {
    bm.validate();
    if (z < 0.0)
        throw InvalidModel("mu2_limit: z must be >= 0");
    const double k0 = bm.k0, r0 = bm.r0;
    const double c0z = bm.cov.at_zero() * z;
    const Vec2 off = y - x;
    auto f = [&](Vec2 zeta) {
        double med = (k0 * k0 / 4.0) *
                     (bm.cov.line_average(off, zeta, z, k0) - c0z);
        double damp = -r0 * r0 * norm2(zeta) / 4.0;
        return std::exp(std::complex<double>(damp + med, dot(zeta, r)));
    };
    QuadResult qr = integrate_2d(f, 2.0 / r0, spec);
    MomentValue mv;
    mv.value = (r0 * r0 / (4.0 * M_PI)) * qr.value;
    mv.err = (r0 * r0 / (4.0 * M_PI)) * qr.err;
    mv.method = MomentValue::Method::Quadrature;
    mv.converged = qr.converged;
    return mv;
}

MomentValue mu4_limit(const BeamMedium& bm, double z, Vec2 r, Vec2 x1, Vec2 x2,
                      Vec2 y1, Vec2 y2, const QuadratureSpec& spec) {
    bm.validate();
    if (z < 0.0)
        throw InvalidModel("mu4_limit: z must be >= 0");
    MomentValue a = mu2_limit(bm, z, r, x1, y1, spec);
    MomentValue b = mu2_limit(bm, z, r, x2, y2, spec);
    MomentValue c = mu2_limit(bm, z, r, x1, y2, spec);
    MomentValue d = mu2_limit(bm, z, r, x2, y1, spec);
    const double coh = std::exp(-bm.k0 * bm.k0 * bm.cov.at_zero() * z / 2.0) *
                       std::exp(-2.0 * norm2(r) / (bm.r0 * bm.r0));
    MomentValue mv;
    mv.value = -coh + a.value * b.value + c.value * d.value;
    mv.err = a.err * std::abs(b.value) + b.err * std::abs(a.value) +
             c.err * std::abs(d.value) + d.err * std::abs(c.value);
    mv.method = MomentValue::Method::Quadrature;
    mv.converged = a.converged && b.converged && c.converged && d.converged;
    return mv;
}

double gaussian_summation_residual(const BeamMedium& bm, double z, Vec2 r,
                                   Vec2 x1, Vec2 x2, Vec2 y1, Vec2 y2,
                                   const QuadratureSpec& spec) {
    MomentValue m4 = mu4_limit(bm, z, r, x1, x2, y1, y2, spec);
    std::complex<double> a = mu2_limit(bm, z, r, x1, y1, spec).value;
    std::complex<double> b = mu2_limit(bm, z, r, x2, y2, spec).value;
    std::complex<double> c = mu2_limit(bm, z, r, x1, y2, spec).value;
    std::complex<double> d = mu2_limit(bm, z, r, x2, y1, spec).value;
    std::complex<double> m1 = mu1_limit(bm, z, r).value;
    std::complex<double> rule =
        a * b + c * d - m1 * m1 * std::conj(m1) * std::conj(m1);
    return std::abs(m4.value - rule);
}

} // namespace parax
