#include "phase_screen.hpp"

#include "../errors.hpp"

#include <cmath>

namespace parax {

void Grid2D::validate() const {
    if (n < 64 || n > 4096 || (n & (n - 1)) != 0)
        throw InvalidModel("grid n must be a power of two in [64, 4096]");
    if (!(h > 0.0))
        throw InvalidModel("grid spacing must be positive");
}

ScreenGenerator::ScreenGenerator(const Covariance& cov, Grid2D grid, double dz)
    : grid_(grid), dz_(dz) {
    grid_.validate();
    if (!(dz > 0.0))
        throw InvalidModel("screen step dz must be positive");
    const int n = grid_.n;
    const double L2 = grid_.extent() * grid_.extent();
    amp_.resize((size_t)n * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            Vec2 kv{grid_.freq(j), grid_.freq(k)};
            double spec = cov.spectrum(kv);
            if (spec < 0.0) {
                if (spec < -1e-12 * cov.spectrum_radial(0.0))
                    throw InvalidModel("covariance spectrum negative on lattice");
                spec = 0.0;
            }
            amp_[(size_t)j * n + k] = std::sqrt(2.0 * dz * spec / L2);
        }
}

void ScreenGenerator::generate(KeyedRng& rng, Fft2D& fft,
                               std::vector<double>& out) const {
    const int n = grid_.n;
    if (fft.size() != n)
        throw InvalidModel("screen scratch FFT has the wrong size");
    std::complex<double>* d = fft.data();
    for (size_t m = 0; m < (size_t)n * n; ++m) {
        double re = rng.normal();
        double im = rng.normal();
        // CN(0, amp^2) mode coefficients; the spare-cached normal pairs keep
        // the draw count per screen fixed
        d[m] = amp_[m] * std::complex<double>(M_SQRT1_2 * re, M_SQRT1_2 * im);
    }
    fft.backward();
    out.resize((size_t)n * n);
    for (size_t m = 0; m < (size_t)n * n; ++m)
        out[m] = d[m].real();
}

} // namespace parax
