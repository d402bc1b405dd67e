#pragma once

#include "hfno/common.hpp"

namespace hfno {

struct MetricReport {
  double rmse = 0.0;  // dB
  double h1 = 0.0;
  double ssim = 0.0;
};

// sqrt((1/Q) * ||pred - target||_F^2)
double rmse(const Mat& pred, const Mat& target);

// Normalized H^1 Sobolev error (the training loss at K = 1).
double h1_error(const Mat& pred, const Mat& target);

// Mean local SSIM with an 11x11 Gaussian window (sigma 1.5), C1 = 1e-4,
// C2 = 9e-4; both fields are jointly min-max normalized to [0, 1] first.
// A constant, equal pair scores exactly 1.
double ssim(const Mat& pred, const Mat& target);

// Single-window SSIM over the whole field (global means/variances), on the
// same jointly normalized inputs. Exposed for tests.
double ssim_global(const Mat& pred, const Mat& target);

MetricReport evaluate(const Mat& pred, const Mat& target);

}  // namespace hfno
