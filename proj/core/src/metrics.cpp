#include "hfno/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hfno/optimize.hpp"

namespace hfno {

namespace {

constexpr double kC1 = 1e-4;
constexpr double kC2 = 9e-4;
constexpr int kWin = 11;
constexpr double kSigma = 1.5;

// Jointly min-max normalize both fields to [0, 1]. Returns false for the
// degenerate constant-equal case.
bool joint_normalize(const Mat& a, const Mat& b, Mat& na, Mat& nb) {
  double lo = a.a[0], hi = a.a[0];
  for (double v : a.a) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : b.a) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) return false;
  double inv = 1.0 / (hi - lo);
  na = a;
  nb = b;
  for (double& v : na.a) v = (v - lo) * inv;
  for (double& v : nb.a) v = (v - lo) * inv;
  return true;
}

// Gaussian-weighted local mean with border-truncated, renormalized windows
// (separable since the truncated 2D kernel stays a product of 1D kernels).
Mat gauss_filter(const Mat& x) {
  static const std::vector<double> kernel = [] {
    std::vector<double> k(kWin);
    int h = kWin / 2;
    for (int i = 0; i < kWin; ++i) {
      double d = i - h;
      k[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    }
    return k;
  }();
  const int h = kWin / 2;

  Mat tmp(x.rows, x.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int j = 0; j < x.cols; ++j) {
      double s = 0.0, wsum = 0.0;
      int lo = std::max(0, j - h), hi = std::min(x.cols - 1, j + h);
      for (int t = lo; t <= hi; ++t) {
        double w = kernel[t - j + h];
        s += w * x(i, t);
        wsum += w;
      }
      tmp(i, j) = s / wsum;
    }
  }
  Mat out(x.rows, x.cols);
  for (int j = 0; j < x.cols; ++j) {
    for (int i = 0; i < x.rows; ++i) {
      double s = 0.0, wsum = 0.0;
      int lo = std::max(0, i - h), hi = std::min(x.rows - 1, i + h);
      for (int t = lo; t <= hi; ++t) {
        double w = kernel[t - i + h];
        s += w * tmp(t, j);
        wsum += w;
      }
      out(i, j) = s / wsum;
    }
  }
  return out;
}

}  // namespace

double rmse(const Mat& pred, const Mat& target) {
  if (!pred.same_shape(target)) throw std::invalid_argument("rmse: shape mismatch");
  double s = 0.0;
  for (size_t k = 0; k < pred.a.size(); ++k) {
    double d = pred.a[k] - target.a[k];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(pred.size()));
}

double h1_error(const Mat& pred, const Mat& target) {
  return sobolev_h1_loss(pred, target, 1, nullptr);
}

double ssim(const Mat& pred, const Mat& target) {
  if (!pred.same_shape(target)) throw std::invalid_argument("ssim: shape mismatch");
  Mat x, y;
  if (!joint_normalize(pred, target, x, y)) return 1.0;  // constant equal pair

  Mat x2 = x, y2 = y, xy = x;
  for (size_t k = 0; k < x.a.size(); ++k) {
    x2.a[k] = x.a[k] * x.a[k];
    y2.a[k] = y.a[k] * y.a[k];
    xy.a[k] = x.a[k] * y.a[k];
  }
  Mat mx = gauss_filter(x);
  Mat my = gauss_filter(y);
  Mat mxx = gauss_filter(x2);
  Mat myy = gauss_filter(y2);
  Mat mxy = gauss_filter(xy);

  double acc = 0.0;
  for (size_t k = 0; k < x.a.size(); ++k) {
    double mux = mx.a[k], muy = my.a[k];
    double vx = mxx.a[k] - mux * mux;
    double vy = myy.a[k] - muy * muy;
    double cov = mxy.a[k] - mux * muy;
    double s = ((2.0 * mux * muy + kC1) * (2.0 * cov + kC2)) /
               ((mux * mux + muy * muy + kC1) * (vx + vy + kC2));
    acc += s;
  }
  return acc / static_cast<double>(x.size());
}

double ssim_global(const Mat& pred, const Mat& target) {
  if (!pred.same_shape(target)) throw std::invalid_argument("ssim_global: shape mismatch");
  Mat x, y;
  if (!joint_normalize(pred, target, x, y)) return 1.0;
  const double n = static_cast<double>(x.size());
  double mux = 0.0, muy = 0.0;
  for (size_t k = 0; k < x.a.size(); ++k) {
    mux += x.a[k];
    muy += y.a[k];
  }
  mux /= n;
  muy /= n;
  double vx = 0.0, vy = 0.0, cov = 0.0;
  for (size_t k = 0; k < x.a.size(); ++k) {
    double dx = x.a[k] - mux, dy = y.a[k] - muy;
    vx += dx * dx;
    vy += dy * dy;
    cov += dx * dy;
  }
  vx /= n;
  vy /= n;
  cov /= n;
  return ((2.0 * mux * muy + kC1) * (2.0 * cov + kC2)) /
         ((mux * mux + muy * muy + kC1) * (vx + vy + kC2));
}

MetricReport evaluate(const Mat& pred, const Mat& target) {
  MetricReport r;
  r.rmse = rmse(pred, target);
  r.h1 = h1_error(pred, target);
  r.ssim = ssim(pred, target);
  return r;
}

}  // namespace hfno
