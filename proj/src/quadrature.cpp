#include "quadrature.hpp"

#include "errors.hpp"
#include "fft2d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace parax {

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw InvalidModel("quadrature tolerances must be positive");
    if (max_level < 3 || max_level > 30)
        throw InvalidModel("quadrature max_level out of range [3, 30]");
    if (!(truncation_sigmas >= 4.0))
        throw InvalidModel("truncation_sigmas must be >= 4");
}

namespace {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Newton iteration on P_n; nodes accurate to machine precision.
GaussRule compute_gauss(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;
    return rule;
}

std::mutex rule_mutex;
std::map<int, GaussRule> rule_cache;

const GaussRule& gauss_rule(int n) {
    if (n < 1)
        throw InvalidModel("Gauss order must be >= 1");
    std::lock_guard<std::mutex> lock(rule_mutex);
    auto it = rule_cache.find(n);
    if (it == rule_cache.end())
        it = rule_cache.emplace(n, compute_gauss(n)).first;
    return it->second;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   const GaussRule& rule) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

struct Panel {
    double a, b, value, err;
    int depth;
};

} // namespace

const std::vector<double>& gauss_nodes(int n) { return gauss_rule(n).nodes; }
const std::vector<double>& gauss_weights(int n) { return gauss_rule(n).weights; }

QuadResult integrate_1d(const std::function<double(double)>& f, double a,
                        double b, const QuadratureSpec& spec) {
    spec.validate();
    const GaussRule& lo = gauss_rule(7);
    const GaussRule& hi = gauss_rule(15);

    auto eval = [&](double pa, double pb, int depth) {
        Panel p;
        p.a = pa;
        p.b = pb;
        p.depth = depth;
        p.value = gauss_panel(f, pa, pb, hi);
        p.err = std::abs(p.value - gauss_panel(f, pa, pb, lo));
        return p;
    };

    std::vector<Panel> panels{eval(a, b, 0)};
    QuadResult out;
    for (;;) {
        double total = 0.0, err = 0.0;
        size_t worst = 0;
        for (size_t i = 0; i < panels.size(); ++i) {
            total += panels[i].value;
            err += panels[i].err;
            if (panels[i].err > panels[worst].err)
                worst = i;
        }
        out.value = total;
        out.err = err;
        if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
            out.converged = true;
            return out;
        }
        if (panels[worst].depth >= spec.max_level + 8) {
            out.converged = false;
            return out;
        }
        Panel w = panels[worst];
        double mid = 0.5 * (w.a + w.b);
        panels[worst] = eval(w.a, mid, w.depth + 1);
        panels.push_back(eval(mid, w.b, w.depth + 1));
    }
}

QuadResult integrate_2d(const std::function<std::complex<double>(Vec2)>& f,
                        double width, const QuadratureSpec& spec, Vec2 center) {
    spec.validate();
    if (!(width > 0.0))
        throw InvalidModel("integrate_2d: damping width must be positive");

    const double half = spec.truncation_sigmas * width;

    auto tensor = [&](int n) {
        const GaussRule& r = gauss_rule(n);
        std::complex<double> sum{0.0, 0.0};
        for (int i = 0; i < n; ++i) {
            double x = center.x + half * r.nodes[i];
            std::complex<double> row{0.0, 0.0};
            for (int j = 0; j < n; ++j)
                row += r.weights[j] * f({x, center.y + half * r.nodes[j]});
            sum += r.weights[i] * row;
        }
        return half * half * sum;
    };

    QuadResult out;
    int order = 16;
    std::complex<double> prev = tensor(order);
    for (int level = 1; level <= spec.max_level; ++level) {
        order = (order * 3 + 1) / 2;
        std::complex<double> cur = tensor(order);
        out.value = cur;
        out.err = std::abs(cur - prev);
        if (out.err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(cur))) {
            out.converged = true;
            return out;
        }
        prev = cur;
    }
    out.converged = false;
    return out;
}

std::complex<double> GridSpectrum::interp(Vec2 xi) const {
    double u = xi.x / dxi + n / 2;
    double v = xi.y / dxi + n / 2;
    if (u < 0.0 || v < 0.0 || u > n - 1 || v > n - 1)
        return {0.0, 0.0};
    int j = std::min((int)u, n - 2);
    int k = std::min((int)v, n - 2);
    double fu = u - j, fv = v - k;
    return (1 - fu) * (1 - fv) * at(j, k) + fu * (1 - fv) * at(j + 1, k) +
           (1 - fu) * fv * at(j, k + 1) + fu * fv * at(j + 1, k + 1);
}

GridSpectrum grid_fourier_2d(const std::vector<std::complex<double>>& samples,
                             int n, double h) {
    if (n < 2 || (n & (n - 1)) != 0)
        throw InvalidModel("grid_fourier_2d: n must be a power of two");
    if (samples.size() != (size_t)n * n)
        throw InvalidModel("grid_fourier_2d: sample count != n*n");
    if (!(h > 0.0))
        throw InvalidModel("grid_fourier_2d: h must be positive");

    Fft2D fft(n);
    std::complex<double>* d = fft.data();
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double s = ((j + k) % 2 == 0) ? 1.0 : -1.0;
            d[(size_t)j * n + k] = s * samples[(size_t)j * n + k];
        }
    fft.forward();

    GridSpectrum out;
    out.n = n;
    out.dxi = 2.0 * M_PI / (n * h);
    out.values.resize((size_t)n * n);
    // centered-grid phase: per axis e^{-i xi_p x_j} = (-1)^{p+j} (-1)^{n/2}
    // times the DFT kernel; the two (-1)^{n/2} factors cancel in 2-D.
    const double h2 = h * h;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            double s = ((p + q) % 2 == 0) ? 1.0 : -1.0;
            out.values[(size_t)p * n + q] = s * h2 * d[(size_t)p * n + q];
        }
    return out;
}

std::vector<std::complex<double>> grid_inverse_fourier_2d(const GridSpectrum& spec,
                                                          double h) {
    const int n = spec.n;
    Fft2D fft(n);
    std::complex<double>* d = fft.data();
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            double s = ((p + q) % 2 == 0) ? 1.0 : -1.0;
            d[(size_t)p * n + q] = s * spec.values[(size_t)p * n + q];
        }
    fft.backward();

    std::vector<std::complex<double>> out((size_t)n * n);
    const double scale = 1.0 / ((double)n * n * h * h);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double s = ((j + k) % 2 == 0) ? 1.0 : -1.0;
            out[(size_t)j * n + k] = s * scale * d[(size_t)j * n + k];
        }
    return out;
}

} // namespace parax
