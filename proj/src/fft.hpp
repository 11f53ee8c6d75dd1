#pragma once

// Thin RAII wrapper over FFTW for in-place unnormalized complex transforms.
// Planning is serialized behind a process-wide mutex; execution is re-entrant.

#include <complex>
#include <cstddef>
#include <span>

namespace itb::detail {

class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const noexcept { return n_; }

  /// X_k = sum_j x_j exp(-2 pi i jk/n)
  void forward(std::span<std::complex<double>> data);
  /// x_j = sum_k X_k exp(+2 pi i jk/n), no 1/n.
  void backward(std::span<std::complex<double>> data);

 private:
  void run(void* plan, std::span<std::complex<double>> data);

  std::size_t n_;
  std::complex<double>* buffer_;
  void* forward_plan_;
  void* backward_plan_;
};

}  // namespace itb::detail
