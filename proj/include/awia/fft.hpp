#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <vector>

#include "awia/grid.hpp"

// Thin RAII wrappers over FFTW. Plans use FFTW_ESTIMATE so the chosen
// algorithm (and hence rounding) is deterministic across runs; that is a
// requirement for bit-exact checkpoint resume.

namespace awia {

using cplx = std::complex<double>;

class Fft3 {
 public:
  explicit Fft3(const Lattice3& grid) : grid_(grid), buf_(grid.size()) {
    auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
    fwd_ = fftw_plan_dft_3d(grid.n[0], grid.n[1], grid.n[2], p, p, FFTW_FORWARD,
                            FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_3d(grid.n[0], grid.n[1], grid.n[2], p, p, FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }
  ~Fft3() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;

  std::vector<cplx>& buffer() { return buf_; }
  void forward() { fftw_execute(fwd_); }
  void backward() {  // normalized inverse
    fftw_execute(bwd_);
    double s = 1.0 / static_cast<double>(buf_.size());
    for (auto& c : buf_) c *= s;
  }
  const Lattice3& grid() const { return grid_; }

 private:
  Lattice3 grid_;
  std::vector<cplx> buf_;
  fftw_plan fwd_, bwd_;
};

class Fft1 {
 public:
  explicit Fft1(int n) : buf_(n) {
    auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
    fwd_ = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft1() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Fft1(const Fft1&) = delete;
  Fft1& operator=(const Fft1&) = delete;

  std::vector<cplx>& buffer() { return buf_; }
  void forward() { fftw_execute(fwd_); }
  void backward() {
    fftw_execute(bwd_);
    double s = 1.0 / static_cast<double>(buf_.size());
    for (auto& c : buf_) c *= s;
  }
  int size() const { return static_cast<int>(buf_.size()); }

 private:
  std::vector<cplx> buf_;
  fftw_plan fwd_, bwd_;
};

}  // namespace awia
