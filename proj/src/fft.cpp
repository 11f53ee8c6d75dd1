#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace itb::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  std::lock_guard lock(planner_mutex());
  buffer_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (buffer_ == nullptr) throw std::bad_alloc();
  auto* raw = reinterpret_cast<fftw_complex*>(buffer_);
  const int len = static_cast<int>(n);
  forward_plan_ = fftw_plan_dft_1d(len, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_dft_1d(len, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  fftw_free(buffer_);
}

void Fft::forward(std::span<std::complex<double>> data) { run(forward_plan_, data); }

void Fft::backward(std::span<std::complex<double>> data) { run(backward_plan_, data); }

void Fft::run(void* plan, std::span<std::complex<double>> data) {
  if (data.size() != n_) throw std::invalid_argument("Fft: size mismatch");
  std::copy(data.begin(), data.end(), buffer_);
  fftw_execute(static_cast<fftw_plan>(plan));
  std::copy(buffer_, buffer_ + n_, data.begin());
}

}  // namespace itb::detail
