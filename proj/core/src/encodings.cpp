#include "hfno/encodings.hpp"

#include <cmath>

namespace hfno {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

Mat hankel_encoding(const Grid2D& grid, double k0) {
  if (!(k0 > 0)) throw std::invalid_argument("hankel_encoding: k0 must be positive");
  if (!(grid.r0 > 0)) throw std::invalid_argument("hankel_encoding: grid must start at r > 0");
  Mat m(grid.n_depth, grid.n_range);
  for (int j = 0; j < grid.n_range; ++j) {
    double r = grid.range_at(j);
    if (!(r > 0)) throw std::invalid_argument("hankel_encoding: non-positive range sample");
    double v = std::sqrt(2.0 / (kPi * k0 * r));
    for (int i = 0; i < grid.n_depth; ++i) m(i, j) = v;
  }
  return m;
}

Mat bathymetry_encoding(const SoundSpeedField& ssf) {
  const Grid2D& g = ssf.grid;
  Mat m(g.n_depth, g.n_range);
  for (int j = 0; j < g.n_range; ++j) {
    double b = ssf.bathy[j];
    for (int i = 0; i < g.n_depth; ++i)
      m(i, j) = (g.depth_at(i) <= b) ? ssf.c(i, j) : ssf.v_sed;
  }
  return m;
}

void positional_encoding(const Grid2D& grid, Mat& pe_r, Mat& pe_z) {
  pe_r = Mat(grid.n_depth, grid.n_range);
  pe_z = Mat(grid.n_depth, grid.n_range);
  for (int i = 0; i < grid.n_depth; ++i) {
    double zf = (grid.n_depth > 1) ? static_cast<double>(i) / (grid.n_depth - 1) : 0.0;
    for (int j = 0; j < grid.n_range; ++j) {
      pe_r(i, j) = (grid.n_range > 1) ? static_cast<double>(j) / (grid.n_range - 1) : 0.0;
      pe_z(i, j) = zf;
    }
  }
}

EncodedInput assemble_input(const Scenario& scn, EncodingVariant variant) {
  if (std::string err = validate_scenario(scn); !err.empty())
    throw std::invalid_argument("assemble_input: invalid scenario: " + err);
  EncodedInput e;
  e.grid = scn.ssf.grid;
  switch (variant) {
    case EncodingVariant::Full:
      e.ch[0] = hankel_encoding(e.grid, scn.k0());
      e.ch[1] = bathymetry_encoding(scn.ssf);
      break;
    case EncodingVariant::BtyOnly:
      e.ch[0] = scn.ssf.c;
      e.ch[1] = bathymetry_encoding(scn.ssf);
      break;
    case EncodingVariant::None:
      e.ch[0] = scn.ssf.c;
      e.ch[1] = scn.ssf.c;
      break;
    case EncodingVariant::CBty: {
      Mat cb(e.grid.n_depth, e.grid.n_range);
      for (int j = 0; j < e.grid.n_range; ++j)
        for (int i = 0; i < e.grid.n_depth; ++i) cb(i, j) = scn.ssf.bathy[j];
      e.ch[0] = std::move(cb);
      e.ch[1] = scn.ssf.c;
      break;
    }
  }
  positional_encoding(e.grid, e.ch[2], e.ch[3]);
  return e;
}

void StatsAccumulator::add(const EncodedInput& input, const Mat& target) {
  for (int c = 0; c < 4; ++c) {
    for (double v : input.ch[c].a) {
      sum_[c] += v;
      sum2_[c] += v * v;
    }
  }
  n_in_ += input.ch[0].size();
  for (double v : target.a) {
    out_sum_ += v;
    out_sum2_ += v * v;
  }
  n_out_ += target.size();
}

StandardStats StatsAccumulator::finish() const {
  if (n_in_ == 0 || n_out_ == 0) throw std::invalid_argument("fit_stats: empty dataset");
  StandardStats s;
  for (int c = 0; c < 4; ++c) {
    double mu = sum_[c] / n_in_;
    double var = std::max(0.0, sum2_[c] / n_in_ - mu * mu);
    if (!(var > 1e-24))
      throw std::invalid_argument("fit_stats: zero variance in input channel " +
                                  std::to_string(c));
    s.mu_in[c] = mu;
    s.sigma_in[c] = std::sqrt(var);
  }
  double mu = out_sum_ / n_out_;
  double var = std::max(0.0, out_sum2_ / n_out_ - mu * mu);
  if (!(var > 1e-24)) throw std::invalid_argument("fit_stats: zero variance in targets");
  s.mu_out = mu;
  s.sigma_out = std::sqrt(var);
  return s;
}

StandardStats fit_stats(std::span<const EncodedInput> inputs, std::span<const TLField> targets) {
  if (inputs.empty() || inputs.size() != targets.size())
    throw std::invalid_argument("fit_stats: empty or mismatched dataset");
  StatsAccumulator acc;
  for (size_t i = 0; i < inputs.size(); ++i) acc.add(inputs[i], targets[i].tl);
  return acc.finish();
}

EncodedInput standardize(const EncodedInput& x, const StandardStats& s) {
  EncodedInput out = x;
  for (int c = 0; c < 4; ++c)
    for (double& v : out.ch[c].a) v = (v - s.mu_in[c]) / s.sigma_in[c];
  return out;
}

Mat standardize_output(const Mat& u, const StandardStats& s) {
  Mat out = u;
  for (double& v : out.a) v = (v - s.mu_out) / s.sigma_out;
  return out;
}

Mat destandardize_output(const Mat& u_tilde, const StandardStats& s) {
  Mat out = u_tilde;
  for (double& v : out.a) v = v * s.sigma_out + s.mu_out;
  return out;
}

const char* to_string(EncodingVariant v) {
  switch (v) {
    case EncodingVariant::Full: return "bty+hf";
    case EncodingVariant::BtyOnly: return "bty";
    case EncodingVariant::None: return "none";
    default: return "cbty";
  }
}

bool variant_from_string(const std::string& s, EncodingVariant& out) {
  if (s == "bty+hf" || s == "full") out = EncodingVariant::Full;
  else if (s == "bty") out = EncodingVariant::BtyOnly;
  else if (s == "none") out = EncodingVariant::None;
  else if (s == "cbty") out = EncodingVariant::CBty;
  else return false;
  return true;
}

}  // namespace hfno
