#pragma once

#include <array>
#include <span>
#include <string>

#include "hfno/pe_solver.hpp"

namespace hfno {

// Which physics encodings feed the model. Disabled slots fall back to the
// raw sound-speed field so every variant keeps the same 4-channel input.
enum class EncodingVariant {
  Full,     // [E_hf, E_bty, PE_r, PE_z]
  BtyOnly,  // [c,    E_bty, PE_r, PE_z]
  None,     // [c,    c,     PE_r, PE_z]
  CBty,     // [C_bty, c,    PE_r, PE_z]  bathymetry as its own channel
};

struct EncodedInput {
  Grid2D grid;
  std::array<Mat, 4> ch;  // fixed order: slot0, slot1, PE_r, PE_z
};

struct StandardStats {
  std::array<double, 4> mu_in{};
  std::array<double, 4> sigma_in{1.0, 1.0, 1.0, 1.0};
  double mu_out = 0.0;
  double sigma_out = 1.0;
};

// Depth-stacked far-field Hankel amplitude sqrt(2 / (pi * k0 * r)).
Mat hankel_encoding(const Grid2D& grid, double k0);

// Sound speed with sediment speed substituted below the bathymetry.
Mat bathymetry_encoding(const SoundSpeedField& ssf);

// Normalized coordinates spanning [0, 1] inclusive along each axis.
void positional_encoding(const Grid2D& grid, Mat& pe_r, Mat& pe_z);

EncodedInput assemble_input(const Scenario& scn, EncodingVariant variant = EncodingVariant::Full);

// Per-channel input moments plus scalar output moments over a training set.
StandardStats fit_stats(std::span<const EncodedInput> inputs, std::span<const TLField> targets);

// Streaming variant of fit_stats for datasets not stored as parallel arrays.
class StatsAccumulator {
 public:
  void add(const EncodedInput& input, const Mat& target);
  StandardStats finish() const;  // throws on empty set or zero variance

 private:
  std::array<double, 4> sum_{}, sum2_{};
  double out_sum_ = 0.0, out_sum2_ = 0.0;
  size_t n_in_ = 0, n_out_ = 0;
};

EncodedInput standardize(const EncodedInput& x, const StandardStats& s);
Mat standardize_output(const Mat& u, const StandardStats& s);
Mat destandardize_output(const Mat& u_tilde, const StandardStats& s);

const char* to_string(EncodingVariant v);
bool variant_from_string(const std::string& s, EncodingVariant& out);

}  // namespace hfno
