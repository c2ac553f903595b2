#pragma once

#include "phase_screen.hpp"

#include <complex>
#include <vector>

namespace parax {

struct ComplexField {
    Grid2D grid;
    std::vector<std::complex<double>> u; // row-major, u[j * n + k]

    /// Discrete L^2 norm h^2 sum |u|^2.
    double l2_norm2() const;
    /// Value at the lattice point nearest to x (grid centered at 0).
    std::complex<double> at(Vec2 x) const;
    /// Lattice coordinate of grid index (j, k).
    Vec2 point(int j, int k) const {
        return {(j - grid.n / 2) * grid.h, (k - grid.n / 2) * grid.h};
    }
};

/// Split-step Fourier integrator: exact spectral diffraction half-steps
/// around a multiplicative phase-screen step exp(i k0 deltaB / 2). Both
/// substeps are unitary. The optional super-Gaussian edge mask absorbs
/// periodic wrap-around at the cost of a monitored norm loss (off by
/// default; unitarity then holds to rounding).
class Propagator {
  public:
    Propagator(Grid2D grid, double k0, double dz, bool edge_mask = false);

    void init_gaussian(ComplexField& f, double r0) const;
    /// One full Strang step using the supplied screen.
    void step(ComplexField& f, const std::vector<double>& screen,
              Fft2D& fft) const;
    /// Pure diffraction over dz (used for free-space checks).
    void step_free(ComplexField& f, Fft2D& fft) const;

    double dz() const { return dz_; }

  private:
    void diffract(ComplexField& f, Fft2D& fft,
                  const std::vector<std::complex<double>>& mult) const;
    void apply_mask(ComplexField& f) const;

    Grid2D grid_;
    double k0_;
    double dz_;
    bool edge_mask_;
    std::vector<std::complex<double>> half_mult_; // exp(-i |k|^2 dz / (4 k0))
    std::vector<double> mask_;
};

} // namespace parax
