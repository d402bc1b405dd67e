#pragma once

#include "hfno/common.hpp"

namespace hfno {

// Transform convention, fixed project-wide: forward transforms are plain
// unnormalized DFT sums, inverse transforms carry the full 1/(M*N) (or 1/L)
// factor. The *Unnorm backends below leave normalization to the caller.

// 2D complex DFT of a full matrix. idft2(dft2(x)) == x.
CMat dft2(const CMat& x);
CMat idft2(const CMat& x);

// In-place 1D complex transform on an internally owned, aligned buffer.
// Used by the PE march (mirrored depth columns).
class Fft1D {
 public:
  explicit Fft1D(int length);
  ~Fft1D();
  Fft1D(Fft1D&&) noexcept;
  Fft1D& operator=(Fft1D&&) noexcept;
  Fft1D(const Fft1D&) = delete;
  Fft1D& operator=(const Fft1D&) = delete;

  int length() const { return n_; }
  cd* data() { return buf_; }
  void forward_unnorm();
  void backward_unnorm();

 private:
  int n_ = 0;
  cd* buf_ = nullptr;
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
};

// Column-wise (depth axis) real-to-half-complex transform of a row-major
// [M x N] field: out has M/2+1 rows of N columns.
class FftColsR2C {
 public:
  FftColsR2C(int M, int N);
  ~FftColsR2C();
  FftColsR2C(FftColsR2C&&) noexcept;
  FftColsR2C(const FftColsR2C&) = delete;
  FftColsR2C& operator=(const FftColsR2C&) = delete;

  int rows_in() const { return m_; }
  int rows_out() const { return m_ / 2 + 1; }
  int cols() const { return n_; }
  double* in() { return in_; }
  cd* out() { return out_; }
  void exec_unnorm();

 private:
  int m_ = 0, n_ = 0;
  double* in_ = nullptr;
  cd* out_ = nullptr;
  void* plan_ = nullptr;
};

// Column-wise half-complex-to-real inverse; input [M/2+1 x N] is clobbered.
// Imaginary parts of the self-conjugate bins (kz = 0 and kz = M/2) must be
// zeroed by the caller; that projection defines the transform's semantics.
class FftColsC2R {
 public:
  FftColsC2R(int M, int N);
  ~FftColsC2R();
  FftColsC2R(FftColsC2R&&) noexcept;
  FftColsC2R(const FftColsC2R&) = delete;
  FftColsC2R& operator=(const FftColsC2R&) = delete;

  int rows_out() const { return m_; }
  int rows_in() const { return m_ / 2 + 1; }
  int cols() const { return n_; }
  cd* in() { return in_; }
  double* out() { return out_; }
  void exec_unnorm();

 private:
  int m_ = 0, n_ = 0;
  cd* in_ = nullptr;
  double* out_ = nullptr;
  void* plan_ = nullptr;
};

// Row-wise complex transforms over a block of `rows` contiguous rows of
// length N (the retained low-frequency depth modes).
class FftRowsC2C {
 public:
  FftRowsC2C(int rows, int N);
  ~FftRowsC2C();
  FftRowsC2C(FftRowsC2C&&) noexcept;
  FftRowsC2C(const FftRowsC2C&) = delete;
  FftRowsC2C& operator=(const FftRowsC2C&) = delete;

  int rows() const { return r_; }
  int cols() const { return n_; }
  cd* data() { return buf_; }
  void forward_unnorm();
  void backward_unnorm();

 private:
  int r_ = 0, n_ = 0;
  cd* buf_ = nullptr;
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
};

}  // namespace hfno
