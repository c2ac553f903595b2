#include "covariance.hpp"

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace parax {

namespace {

// Fritsch-Carlson monotone cubic slopes; flat segments get zero slope so the
// interpolant never overshoots the data.
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
    const size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1), m(n);
    for (size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for (size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    return m;
}

double pchip_eval(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& m, double t) {
    size_t hi = std::upper_bound(x.begin(), x.end(), t) - x.begin();
    if (hi == 0)
        hi = 1;
    if (hi == x.size())
        hi = x.size() - 1;
    size_t lo = hi - 1;
    double h = x[hi] - x[lo];
    double s = (t - x[lo]) / h;
    double s2 = s * s, s3 = s2 * s;
    double h00 = 2 * s3 - 3 * s2 + 1;
    double h10 = s3 - 2 * s2 + s;
    double h01 = -2 * s3 + 3 * s2;
    double h11 = s3 - s2;
    return h00 * y[lo] + h * h10 * m[lo] + h01 * y[hi] + h * h11 * m[hi];
}

} // namespace

Covariance Covariance::gaussian(double c0, double lc) {
    if (!(c0 > 0.0) || !(lc > 0.0))
        throw InvalidModel("gaussian covariance needs c0 > 0 and lc > 0");
    Covariance c;
    c.kind_ = Kind::Gaussian;
    c.c0_ = c0;
    c.lc_ = lc;
    return c;
}

Covariance Covariance::tabulated(double c0, double lc,
                                 std::vector<double> radius,
                                 std::vector<double> value) {
    if (!(c0 > 0.0) || !(lc > 0.0))
        throw InvalidModel("tabulated covariance needs c0 > 0 and lc > 0");
    if (radius.size() != value.size() || radius.size() < 4)
        throw InvalidModel("tabulated covariance needs >= 4 matching samples");
    if (radius.front() != 0.0)
        throw InvalidModel("tabulated covariance radius grid must start at 0");
    for (size_t i = 0; i + 1 < radius.size(); ++i)
        if (!(radius[i] < radius[i + 1]))
            throw InvalidModel("tabulated covariance radii must be strictly increasing");
    if (std::abs(value.front() - 1.0) > 1e-8)
        throw InvalidModel("tabulated covariance profile must have Ct(0) = 1");
    for (double v : value)
        if (!std::isfinite(v) || v < 0.0)
            throw InvalidModel("tabulated covariance profile must be finite and >= 0");

    Covariance c;
    c.kind_ = Kind::Tabulated;
    c.c0_ = c0;
    c.lc_ = lc;
    c.radius_ = std::move(radius);
    c.value_ = std::move(value);
    c.slope_ = pchip_slopes(c.radius_, c.value_);
    return c;
}

double Covariance::radial_tabulated(double r) const {
    double t = r / lc_;
    if (t >= radius_.back())
        return 0.0;
    return c0_ * pchip_eval(radius_, value_, slope_, t);
}

double Covariance::radial(double r) const {
    if (kind_ == Kind::Gaussian)
        return c0_ * std::exp(-r * r / (lc_ * lc_));
    return radial_tabulated(r);
}

double Covariance::spectrum_radial(double k) const {
    if (kind_ == Kind::Gaussian)
        return c0_ * M_PI * lc_ * lc_ * std::exp(-k * k * lc_ * lc_ / 4.0);
    // Hankel transform 2 pi \int_0^R r C(r) J0(kr) dr over the table support.
    double R = radius_.back() * lc_;
    QuadratureSpec qs;
    qs.rel_tol = 1e-9;
    qs.abs_tol = 1e-13 * c0_ * lc_ * lc_;
    // one panel per half oscillation keeps the adaptive pass cheap
    int panels = std::max(4, (int)(k * R / M_PI) + 1);
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        double a = R * p / panels, b = R * (p + 1) / panels;
        auto f = [&](double r) { return r * radial(r) * std::cyl_bessel_j(0.0, k * r); };
        total += integrate_1d(f, a, b, qs).value.real();
    }
    return 2.0 * M_PI * total;
}

double Covariance::curvature() const {
    if (kind_ == Kind::Gaussian)
        return 2.0 * c0_ / (lc_ * lc_);
    // gamma(h) = 2 (C(0) - C(h)) / h^2 with h restricted to table nodes, so
    // the samples are exact data values and the only error is the O(h^2)
    // difference bias, removed by Richardson extrapolation over index
    // halvings. Going below the table spacing would only probe the
    // interpolant, whose curvature at 0 is not trustworthy.
    size_t j = 1;
    while (j + 1 < radius_.size() && radius_[j + 1] <= 0.5)
        ++j;
    auto g = [&](size_t idx) {
        double h = radius_[idx] * lc_;
        return 2.0 * (at_zero() - c0_ * value_[idx]) / (h * h);
    };
    double prev_extrap = std::numeric_limits<double>::quiet_NaN();
    double best = std::numeric_limits<double>::quiet_NaN();
    double best_diff = std::numeric_limits<double>::infinity();
    while (j >= 2) {
        size_t j2 = j / 2;
        double h1 = radius_[j], h2 = radius_[j2];
        double r2 = (h2 * h2) / (h1 * h1);
        double extrap = (g(j2) - r2 * g(j)) / (1.0 - r2);
        if (std::isfinite(prev_extrap) && extrap != 0.0) {
            double diff = std::abs(extrap - prev_extrap);
            if (diff <= 1e-5 * std::abs(extrap))
                return extrap;
            if (diff < best_diff) {
                best_diff = diff;
                best = extrap;
            }
        }
        prev_extrap = extrap;
        j = j2;
    }
    if (std::isfinite(best) && best_diff <= 1e-3 * std::abs(best))
        return best;
    throw InvalidModel("tabulated covariance curvature did not settle");
}

double Covariance::line_average(Vec2 q, Vec2 zeta, double z, double k0) const {
    if (z == 0.0)
        return 0.0;
    Vec2 a = zeta / k0;
    double na = norm(a);
    if (kind_ == Kind::Gaussian) {
        if (na * std::abs(z) < 1e-10 * lc_) {
            Vec2 mid = q + a * (0.5 * z);
            return c0_ * z * std::exp(-norm2(mid) / (lc_ * lc_));
        }
        // complete the square along the line: |q + a t|^2 = na^2 (t - t0)^2 + d2
        double t0 = -dot(q, a) / (na * na);
        double d2 = norm2(q) - dot(q, a) * dot(q, a) / (na * na);
        double s = na / lc_;
        double amp = c0_ * std::exp(-d2 / (lc_ * lc_)) * std::sqrt(M_PI) / (2.0 * s);
        return amp * (std::erf(s * (z - t0)) - std::erf(s * (0.0 - t0)));
    }
    QuadratureSpec qs;
    qs.rel_tol = 1e-10;
    qs.abs_tol = 1e-14 * c0_ * std::abs(z);
    auto f = [&](double t) { return (*this)(q + a * t); };
    return integrate_1d(f, 0.0, z, qs).value.real();
}

Covariance Covariance::scaled(double factor) const {
    if (!(factor > 0.0))
        throw InvalidModel("covariance scale factor must be positive");
    Covariance out = *this;
    out.c0_ *= factor;
    return out;
}

void Covariance::check_admissible() const {
    // Bochner: the spectrum must be nonnegative.
    double s0 = spectrum_radial(0.0);
    if (!(s0 > 0.0))
        throw InvalidModel("covariance spectrum vanishes at k = 0");
    // tolerance covers the oscillatory sidelobes of the tabulated kind's
    // interpolation error (measured ~4e-8 relative for a 200-sample table)
    for (int i = 0; i <= 200; ++i) {
        double k = 20.0 * i / (200.0 * lc_);
        if (spectrum_radial(k) < -1e-7 * s0)
            throw InvalidModel("covariance spectrum is negative (not positive definite)");
    }
    // integrability: 2 pi \int r |C| dr must converge under domain doubling.
    auto mass = [&](double R) {
        QuadratureSpec qs;
        qs.rel_tol = 1e-8;
        auto f = [&](double r) { return r * std::abs(radial(r)); };
        return 2.0 * M_PI * integrate_1d(f, 0.0, R, qs).value.real();
    };
    double R = 4.0 * lc_;
    double prev = mass(R);
    for (int it = 0; it < 8; ++it) {
        R *= 2.0;
        double cur = mass(R);
        if (std::abs(cur - prev) <= 0.01 * std::abs(cur))
            return;
        prev = cur;
    }
    throw InvalidModel("covariance is not integrable within the probed domain");
}

} // namespace parax
