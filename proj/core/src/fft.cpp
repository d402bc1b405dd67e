#include "hfno/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace hfno {

namespace {
// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

cd* alloc_c(size_t n) { return reinterpret_cast<cd*>(fftw_malloc(sizeof(fftw_complex) * n)); }
double* alloc_r(size_t n) { return static_cast<double*>(fftw_malloc(sizeof(double) * n)); }

fftw_complex* fc(cd* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace

CMat dft2(const CMat& x) {
  if (x.rows < 1 || x.cols < 1) throw std::invalid_argument("dft2: empty matrix");
  CMat out(x.rows, x.cols);
  cd* buf = alloc_c(x.size());
  std::copy(x.a.begin(), x.a.end(), buf);
  {
    std::lock_guard<std::mutex> lk(plan_mutex());
    fftw_plan p = fftw_plan_dft_2d(x.rows, x.cols, fc(buf), fc(buf), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
  }
  std::copy(buf, buf + x.size(), out.a.begin());
  fftw_free(buf);
  return out;
}

CMat idft2(const CMat& x) {
  if (x.rows < 1 || x.cols < 1) throw std::invalid_argument("idft2: empty matrix");
  CMat out(x.rows, x.cols);
  cd* buf = alloc_c(x.size());
  std::copy(x.a.begin(), x.a.end(), buf);
  {
    std::lock_guard<std::mutex> lk(plan_mutex());
    fftw_plan p = fftw_plan_dft_2d(x.rows, x.cols, fc(buf), fc(buf), FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
  }
  double s = 1.0 / (static_cast<double>(x.rows) * x.cols);
  for (size_t i = 0; i < x.size(); ++i) out.a[i] = buf[i] * s;
  fftw_free(buf);
  return out;
}

Fft1D::Fft1D(int length) : n_(length) {
  buf_ = alloc_c(static_cast<size_t>(n_));
  std::lock_guard<std::mutex> lk(plan_mutex());
  plan_fwd_ = fftw_plan_dft_1d(n_, fc(buf_), fc(buf_), FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_1d(n_, fc(buf_), fc(buf_), FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft1D::~Fft1D() {
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  if (buf_) fftw_free(buf_);
}

Fft1D::Fft1D(Fft1D&& o) noexcept
    : n_(o.n_), buf_(o.buf_), plan_fwd_(o.plan_fwd_), plan_bwd_(o.plan_bwd_) {
  o.buf_ = nullptr;
  o.plan_fwd_ = o.plan_bwd_ = nullptr;
}

Fft1D& Fft1D::operator=(Fft1D&& o) noexcept {
  std::swap(n_, o.n_);
  std::swap(buf_, o.buf_);
  std::swap(plan_fwd_, o.plan_fwd_);
  std::swap(plan_bwd_, o.plan_bwd_);
  return *this;
}

void Fft1D::forward_unnorm() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }
void Fft1D::backward_unnorm() { fftw_execute(static_cast<fftw_plan>(plan_bwd_)); }

FftColsR2C::FftColsR2C(int M, int N) : m_(M), n_(N) {
  in_ = alloc_r(static_cast<size_t>(m_) * n_);
  out_ = alloc_c(static_cast<size_t>(m_ / 2 + 1) * n_);
  std::lock_guard<std::mutex> lk(plan_mutex());
  // transform along the depth axis (stride N), one transform per column
  int n[1] = {m_};
  plan_ = fftw_plan_many_dft_r2c(1, n, n_, in_, nullptr, n_, 1, fc(out_), nullptr, n_, 1,
                                 FFTW_ESTIMATE);
}

FftColsR2C::~FftColsR2C() {
  if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  if (in_) fftw_free(in_);
  if (out_) fftw_free(out_);
}

FftColsR2C::FftColsR2C(FftColsR2C&& o) noexcept
    : m_(o.m_), n_(o.n_), in_(o.in_), out_(o.out_), plan_(o.plan_) {
  o.in_ = nullptr;
  o.out_ = nullptr;
  o.plan_ = nullptr;
}

void FftColsR2C::exec_unnorm() { fftw_execute(static_cast<fftw_plan>(plan_)); }

FftColsC2R::FftColsC2R(int M, int N) : m_(M), n_(N) {
  in_ = alloc_c(static_cast<size_t>(m_ / 2 + 1) * n_);
  out_ = alloc_r(static_cast<size_t>(m_) * n_);
  std::lock_guard<std::mutex> lk(plan_mutex());
  int n[1] = {m_};
  plan_ = fftw_plan_many_dft_c2r(1, n, n_, fc(in_), nullptr, n_, 1, out_, nullptr, n_, 1,
                                 FFTW_ESTIMATE);
}

FftColsC2R::~FftColsC2R() {
  if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  if (in_) fftw_free(in_);
  if (out_) fftw_free(out_);
}

FftColsC2R::FftColsC2R(FftColsC2R&& o) noexcept
    : m_(o.m_), n_(o.n_), in_(o.in_), out_(o.out_), plan_(o.plan_) {
  o.in_ = nullptr;
  o.out_ = nullptr;
  o.plan_ = nullptr;
}

void FftColsC2R::exec_unnorm() { fftw_execute(static_cast<fftw_plan>(plan_)); }

FftRowsC2C::FftRowsC2C(int rows, int N) : r_(rows), n_(N) {
  buf_ = alloc_c(static_cast<size_t>(r_) * n_);
  std::lock_guard<std::mutex> lk(plan_mutex());
  int n[1] = {n_};
  plan_fwd_ = fftw_plan_many_dft(1, n, r_, fc(buf_), nullptr, 1, n_, fc(buf_), nullptr, 1, n_,
                                 FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_many_dft(1, n, r_, fc(buf_), nullptr, 1, n_, fc(buf_), nullptr, 1, n_,
                                 FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftRowsC2C::~FftRowsC2C() {
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  if (buf_) fftw_free(buf_);
}

FftRowsC2C::FftRowsC2C(FftRowsC2C&& o) noexcept
    : r_(o.r_), n_(o.n_), buf_(o.buf_), plan_fwd_(o.plan_fwd_), plan_bwd_(o.plan_bwd_) {
  o.buf_ = nullptr;
  o.plan_fwd_ = o.plan_bwd_ = nullptr;
}

void FftRowsC2C::forward_unnorm() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }
void FftRowsC2C::backward_unnorm() { fftw_execute(static_cast<fftw_plan>(plan_bwd_)); }

}  // namespace hfno
