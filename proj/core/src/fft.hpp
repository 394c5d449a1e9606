#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <fftw3.h>

namespace qrdm::detail {

// In-place 1D complex transform pair on a private buffer. Plan creation is serialized.
class FftPair {
 public:
  explicit FftPair(std::size_t n);
  ~FftPair();
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;

  std::complex<double>* data() noexcept { return reinterpret_cast<std::complex<double>*>(buffer_); }
  std::size_t size() const noexcept { return n_; }
  void forward() noexcept { fftw_execute(forward_); }
  // Unnormalized inverse.
  void backward() noexcept { fftw_execute(backward_); }

 private:
  std::size_t n_;
  fftw_complex* buffer_;
  fftw_plan forward_;
  fftw_plan backward_;
};

// Angular wavenumbers in FFTW order for n samples spaced dx.
std::vector<double> wavenumbers(std::size_t n, double dx);

}  // namespace qrdm::detail
