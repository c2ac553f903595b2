#pragma once

#include "../covariance.hpp"
#include "../fft2d.hpp"
#include "rng.hpp"

#include <vector>

namespace parax {

struct Grid2D {
    int n = 256;
    double h = 0.1;

    double extent() const { return n * h; }
    void validate() const; // n power of two in [64, 4096], h > 0
    /// Wavenumber of FFT index j (standard wrap-around ordering).
    double freq(int j) const {
        int jj = j < n / 2 ? j : j - n;
        return 2.0 * M_PI * jj / extent();
    }
};

/// Spectral synthesis of Brownian increments deltaB with
/// E[deltaB(x) deltaB(x')] = dz * C(x - x') (periodic approximation).
/// Per-mode complex Gaussian amplitudes of variance 2 dz C_hat(k) / L^2;
/// the real part of the inverse transform is the screen.
class ScreenGenerator {
  public:
    ScreenGenerator(const Covariance& cov, Grid2D grid, double dz);

    /// Fills out (size n*n, row-major, x index fastest in the second slot)
    /// with one screen; fft is scratch owned by the calling worker.
    void generate(KeyedRng& rng, Fft2D& fft, std::vector<double>& out) const;

    const Grid2D& grid() const { return grid_; }

  private:
    Grid2D grid_;
    double dz_;
    std::vector<double> amp_; // per-mode standard deviation, FFT ordering
};

} // namespace parax
