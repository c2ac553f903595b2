#include "propagator.hpp"

#include "../errors.hpp"

#include <cmath>

namespace parax {

double ComplexField::l2_norm2() const {
    double s = 0.0;
    for (const auto& v : u)
        s += std::norm(v);
    return s * grid.h * grid.h;
}

std::complex<double> ComplexField::at(Vec2 x) const {
    const int n = grid.n;
    int j = (int)std::lround(x.x / grid.h) + n / 2;
    int k = (int)std::lround(x.y / grid.h) + n / 2;
    if (j < 0 || k < 0 || j >= n || k >= n)
        throw InvalidModel("field probe outside the grid");
    return u[(size_t)j * n + k];
}

Propagator::Propagator(Grid2D grid, double k0, double dz, bool edge_mask)
    : grid_(grid), k0_(k0), dz_(dz), edge_mask_(edge_mask) {
    grid_.validate();
    if (!(k0 > 0.0) || !(dz > 0.0))
        throw InvalidModel("propagator needs k0 > 0 and dz > 0");
    const int n = grid_.n;
    half_mult_.resize((size_t)n * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double kx = grid_.freq(j), ky = grid_.freq(k);
            double phase = -(kx * kx + ky * ky) * dz_ / (4.0 * k0_);
            half_mult_[(size_t)j * n + k] =
                std::complex<double>(std::cos(phase), std::sin(phase));
        }
    if (edge_mask_) {
        mask_.resize((size_t)n * n);
        const double edge = grid_.extent() / 16.0;
        const double half = grid_.extent() / 2.0;
        auto profile = [&](double c) {
            double d = half - std::abs(c);
            if (d >= edge)
                return 1.0;
            double t = (edge - d) / edge;
            return std::exp(-std::pow(t, 8));
        };
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double x = (j - n / 2) * grid_.h;
                double y = (k - n / 2) * grid_.h;
                mask_[(size_t)j * n + k] = profile(x) * profile(y);
            }
    }
}

void Propagator::init_gaussian(ComplexField& f, double r0) const {
    f.grid = grid_;
    const int n = grid_.n;
    f.u.resize((size_t)n * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            Vec2 x = f.point(j, k);
            f.u[(size_t)j * n + k] = std::exp(-norm2(x) / (2.0 * r0 * r0));
        }
}

void Propagator::diffract(ComplexField& f, Fft2D& fft,
                          const std::vector<std::complex<double>>& mult) const {
    const int n = grid_.n;
    std::complex<double>* d = fft.data();
    std::copy(f.u.begin(), f.u.end(), d);
    fft.forward();
    for (size_t m = 0; m < (size_t)n * n; ++m)
        d[m] *= mult[m];
    fft.backward();
    const double scale = 1.0 / ((double)n * n);
    for (size_t m = 0; m < (size_t)n * n; ++m)
        f.u[m] = d[m] * scale;
}

void Propagator::apply_mask(ComplexField& f) const {
    if (!edge_mask_)
        return;
    for (size_t m = 0; m < f.u.size(); ++m)
        f.u[m] *= mask_[m];
}

void Propagator::step(ComplexField& f, const std::vector<double>& screen,
                      Fft2D& fft) const {
    diffract(f, fft, half_mult_);
    for (size_t m = 0; m < f.u.size(); ++m) {
        double phase = 0.5 * k0_ * screen[m];
        f.u[m] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
    diffract(f, fft, half_mult_);
    apply_mask(f);
}

void Propagator::step_free(ComplexField& f, Fft2D& fft) const {
    diffract(f, fft, half_mult_);
    diffract(f, fft, half_mult_);
    apply_mask(f);
}

} // namespace parax
