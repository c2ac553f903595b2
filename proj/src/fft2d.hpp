#pragma once

#include <complex>
#include <cstddef>

#include <fftw3.h>

namespace parax {

/// In-place complex 2-D FFT of size n x n backed by an FFTW plan on an
/// owned aligned buffer. One instance per worker thread; plan creation is
/// serialized internally (the FFTW planner is not thread-safe).
class Fft2D {
  public:
    explicit Fft2D(int n);
    ~Fft2D();
    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    int size() const { return n_; }
    std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buf_); }
    const std::complex<double>* data() const {
        return reinterpret_cast<const std::complex<double>*>(buf_);
    }

    /// Unnormalized forward transform (sum of e^{-2 pi i jm/n} terms).
    void forward();
    /// Unnormalized backward transform; divide by n^2 for the inverse.
    void backward();

  private:
    int n_;
    fftw_complex* buf_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

} // namespace parax
