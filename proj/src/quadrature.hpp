#pragma once

#include "vec2.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace parax {

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_level = 12;
    double truncation_sigmas = 8.0;

    void validate() const; // throws InvalidModel on bad settings
};

struct QuadResult {
    std::complex<double> value{0.0, 0.0};
    double err = 0.0;
    bool converged = true;
};

/// Gauss-Legendre nodes/weights on [-1, 1], cached per order. Thread-safe.
const std::vector<double>& gauss_nodes(int n);
const std::vector<double>& gauss_weights(int n);

/// Adaptive 1-D quadrature (Gauss 15 vs 7 per panel, bisection).
QuadResult integrate_1d(const std::function<double(double)>& f, double a,
                        double b, const QuadratureSpec& spec = {});

/// Integral over R^2 of a Gaussian-damped integrand: the caller guarantees
/// |f(x)| <~ exp(-|x - center|^2 / width^2). Truncated to the box
/// center +- truncation_sigmas * width and evaluated with a tensor
/// Gauss-Legendre ladder; err is the last refinement delta.
QuadResult integrate_2d(const std::function<std::complex<double>(Vec2)>& f,
                        double width, const QuadratureSpec& spec = {},
                        Vec2 center = {0.0, 0.0});

/// Discrete approximation of F(xi) = \int f(x) e^{-i xi.x} dx from N x N
/// samples on the centered uniform grid x_jk = ((j - n/2) h, (k - n/2) h).
/// Frequencies are xi_jk = (2 pi (j - n/2) / (n h), ...), centered.
struct GridSpectrum {
    int n = 0;
    double dxi = 0.0; // frequency spacing 2 pi / (n h)
    std::vector<std::complex<double>> values; // row-major, index j * n + k

    Vec2 freq(int j, int k) const {
        return {dxi * (j - n / 2), dxi * (k - n / 2)};
    }
    std::complex<double> at(int j, int k) const { return values[(size_t)j * n + k]; }
    /// Bilinear interpolation; zero outside the covered frequency box.
    std::complex<double> interp(Vec2 xi) const;
};

GridSpectrum grid_fourier_2d(const std::vector<std::complex<double>>& samples,
                             int n, double h);
/// Inverse of grid_fourier_2d (reconstructs the samples).
std::vector<std::complex<double>> grid_inverse_fourier_2d(const GridSpectrum& spec,
                                                          double h);

} // namespace parax
