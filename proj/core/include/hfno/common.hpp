#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hfno {

using cd = std::complex<double>;

// Thrown when a computation produces non-finite values (PE blow-up,
// diverging training loss, ...). Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dense row-major matrix of doubles. rows = depth samples, cols = range
// samples throughout this project.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  size_t size() const { return a.size(); }
  double* data() { return a.data(); }
  const double* data() const { return a.data(); }
  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

struct CMat {
  int rows = 0;
  int cols = 0;
  std::vector<cd> a;

  CMat() = default;
  CMat(int r, int c, cd fill = cd{}) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

  cd& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  cd operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  size_t size() const { return a.size(); }
  cd* data() { return a.data(); }
  const cd* data() const { return a.data(); }
};

inline bool all_finite(const double* p, size_t n) {
  for (size_t i = 0; i < n; ++i)
    if (!std::isfinite(p[i])) return false;
  return true;
}

inline bool all_finite(const cd* p, size_t n) {
  for (size_t i = 0; i < n; ++i)
    if (!std::isfinite(p[i].real()) || !std::isfinite(p[i].imag())) return false;
  return true;
}

// Log verbosity, read once from HFNO_LOG (quiet|info|debug; default info).
enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };
LogLevel log_level();

}  // namespace hfno
