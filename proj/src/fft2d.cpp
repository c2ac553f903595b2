#include "fft2d.hpp"

#include <mutex>
#include <stdexcept>

namespace parax {

namespace {
std::mutex planner_mutex;
}

Fft2D::Fft2D(int n) : n_(n) {
    if (n <= 0)
        throw std::invalid_argument("Fft2D: size must be positive");
    buf_ = fftw_alloc_complex((size_t)n * n);
    if (!buf_)
        throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(planner_mutex);
    fwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft2D::~Fft2D() {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
}

void Fft2D::forward() { fftw_execute(fwd_); }
void Fft2D::backward() { fftw_execute(bwd_); }

} // namespace parax
