#include "hfno/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hfno/io.hpp"

namespace hfno {

void write_pgm(const Mat& field, const std::string& path, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("write_pgm: empty value range");
  std::string out = "P2\n" + std::to_string(field.cols) + " " + std::to_string(field.rows) +
                    "\n255\n";
  char buf[8];
  for (int i = 0; i < field.rows; ++i) {
    for (int j = 0; j < field.cols; ++j) {
      double t = (field(i, j) - lo) / (hi - lo);
      int v = static_cast<int>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
      std::snprintf(buf, sizeof buf, "%d", v);
      out += buf;
      out += (j + 1 < field.cols) ? ' ' : '\n';
    }
  }
  atomic_write(path, {out.data(), out.size()});
}

namespace {

double catmull_rom(double p0, double p1, double p2, double p3, double t) {
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t);
}

double sample_clamped(const Mat& m, int i, int j) {
  i = std::clamp(i, 0, m.rows - 1);
  j = std::clamp(j, 0, m.cols - 1);
  return m(i, j);
}

}  // namespace

Mat bicubic_resample(const Mat& src, int out_rows, int out_cols) {
  if (src.rows < 2 || src.cols < 2)
    throw std::invalid_argument("bicubic_resample: source too small");
  if (out_rows < 2 || out_cols < 2)
    throw std::invalid_argument("bicubic_resample: output too small");
  Mat out(out_rows, out_cols);
  const double si = static_cast<double>(src.rows - 1) / (out_rows - 1);
  const double sj = static_cast<double>(src.cols - 1) / (out_cols - 1);
  for (int oi = 0; oi < out_rows; ++oi) {
    double fi = oi * si;
    int i1 = static_cast<int>(std::floor(fi));
    double ti = fi - i1;
    for (int oj = 0; oj < out_cols; ++oj) {
      double fj = oj * sj;
      int j1 = static_cast<int>(std::floor(fj));
      double tj = fj - j1;
      double rows[4];
      for (int r = 0; r < 4; ++r) {
        int i = i1 - 1 + r;
        rows[r] = catmull_rom(sample_clamped(src, i, j1 - 1), sample_clamped(src, i, j1),
                              sample_clamped(src, i, j1 + 1), sample_clamped(src, i, j1 + 2), tj);
      }
      out(oi, oj) = catmull_rom(rows[0], rows[1], rows[2], rows[3], ti);
    }
  }
  return out;
}

}  // namespace hfno
