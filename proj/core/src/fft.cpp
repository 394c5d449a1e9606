#include "fft.hpp"

#include <mutex>
#include <new>

namespace qrdm::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPair::FftPair(std::size_t n) : n_(n) {
  std::lock_guard lock(planner_mutex());
  buffer_ = fftw_alloc_complex(n);
  if (buffer_ == nullptr) throw std::bad_alloc();
  const int len = static_cast<int>(n);
  forward_ = fftw_plan_dft_1d(len, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_1d(len, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftPair::~FftPair() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(forward_);
  fftw_destroy_plan(backward_);
  fftw_free(buffer_);
}

std::vector<double> wavenumbers(std::size_t n, double dx) {
  std::vector<double> k(n);
  const double base = 2.0 * 3.14159265358979323846 / (static_cast<double>(n) * dx);
  for (std::size_t i = 0; i < n; ++i) {
    const long m = i < (n + 1) / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
    k[i] = base * static_cast<double>(m);
  }
  return k;
}

}  // namespace qrdm::detail
