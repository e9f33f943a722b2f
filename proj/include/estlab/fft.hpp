#pragma once

#include <fftw3.h>

#include <complex>
#include <stdexcept>

namespace estlab {

/// In-place complex DFT with an owned FFTW buffer and plan (FFTW_ESTIMATE, so plans are deterministic).
/// Backward sign is +1 and unnormalized.
class FftPlan {
 public:
  FftPlan(int n0, int n1, int sign) : n0_(n0), n1_(n1) {
    if (n0 < 1 || n1 < 1) throw std::domain_error("FftPlan: sizes must be positive");
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * std::size_t(n0) * n1));
    if (!buf_) throw std::bad_alloc();
    plan_ = n0 == 1 ? fftw_plan_dft_1d(n1, buf_, buf_, sign, FFTW_ESTIMATE)
                    : fftw_plan_dft_2d(n0, n1, buf_, buf_, sign, FFTW_ESTIMATE);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
  }

  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buf_); }
  std::size_t size() const { return std::size_t(n0_) * n1_; }
  void execute() { fftw_execute(plan_); }

 private:
  int n0_, n1_;
  fftw_complex* buf_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace estlab
