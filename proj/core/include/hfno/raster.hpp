#pragma once

#include <string>

#include "hfno/common.hpp"

namespace hfno {

// Plain (ASCII, P2) 8-bit PGM dump; values are mapped linearly from [lo, hi]
// to 0..255 and clamped. Deterministic, dependency-free raster output.
void write_pgm(const Mat& field, const std::string& path, double lo, double hi);

// Catmull-Rom bicubic resampling with endpoint-aligned coordinates and
// clamped borders. Used as the interpolation baseline for super-resolution.
Mat bicubic_resample(const Mat& src, int out_rows, int out_cols);

}  // namespace hfno
