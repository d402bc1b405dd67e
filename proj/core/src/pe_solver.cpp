#include "hfno/pe_solver.hpp"

#include <algorithm>
#include <cmath>

#include "hfno/fft.hpp"

namespace hfno {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

// One split step on the mirrored column. psi has K entries; the FFT buffer
// holds the odd extension of length 2K. half_screen and sponge are per-depth
// multipliers (sponge may be null).
void split_step(std::vector<cd>& psi, const std::vector<cd>& half_screen,
                const std::vector<cd>& diffraction, const std::vector<double>* sponge,
                Fft1D& fft) {
  const int K = static_cast<int>(psi.size());
  const int L = 2 * K;
  for (int i = 0; i < K; ++i) psi[i] *= half_screen[i];
  psi[0] = cd{};  // pressure-release surface

  cd* m = fft.data();
  m[0] = cd{};
  m[K] = cd{};
  for (int i = 1; i < K; ++i) {
    m[i] = psi[i];
    m[L - i] = -psi[i];
  }
  fft.forward_unnorm();
  for (int i = 0; i < L; ++i) m[i] *= diffraction[i];
  fft.backward_unnorm();
  const double s = 1.0 / L;
  for (int i = 1; i < K; ++i) psi[i] = m[i] * s;
  psi[0] = cd{};

  for (int i = 1; i < K; ++i) psi[i] *= half_screen[i];
  if (sponge)
    for (int i = 1; i < K; ++i) psi[i] *= (*sponge)[i];
}

std::vector<cd> make_diffraction(int K, double k0, double dr_step, double dz) {
  const int L = 2 * K;
  std::vector<cd> d(L);
  for (int m = 0; m < L; ++m) {
    int mm = (m <= L / 2) ? m : m - L;
    double kz = 2.0 * kPi * mm / (L * dz);
    d[m] = std::polar(1.0, -kz * kz * dr_step / (2.0 * k0));
  }
  return d;
}

std::vector<cd> make_half_screen(std::span<const double> c_col, double c_ref, double k0,
                                 double dr_step) {
  std::vector<cd> p(c_col.size());
  for (size_t i = 0; i < c_col.size(); ++i) {
    if (!(c_col[i] > 0.0)) throw std::invalid_argument("step_envelope: non-positive sound speed");
    double n = c_ref / c_col[i];
    p[i] = std::polar(1.0, k0 * (n * n - 1.0) * dr_step / 4.0);
  }
  return p;
}

}  // namespace

int extended_depth_rows(const Grid2D& grid, const PEConfig& cfg) {
  int ext = static_cast<int>(std::ceil(cfg.depth_extension_factor * (grid.n_depth - 1)));
  return grid.n_depth + std::max(0, ext);
}

std::vector<cd> gaussian_starter(const Scenario& scn, int n_depth_ext, double width_factor) {
  const Grid2D& g = scn.ssf.grid;
  const double zs = scn.source_depth;
  if (!(zs > 0.0)) throw std::invalid_argument("gaussian_starter: source at or above surface");
  double bmin = *std::min_element(scn.ssf.bathy.begin(), scn.ssf.bathy.end());
  if (!(zs < bmin)) throw std::invalid_argument("gaussian_starter: source below bathymetry");

  const double k0 = scn.k0();
  const double w2 = width_factor * width_factor;
  std::vector<cd> psi(n_depth_ext);
  for (int i = 0; i < n_depth_ext; ++i) {
    double z = i * g.dz;
    double a = k0 * (z - zs);
    double b = k0 * (z + zs);
    psi[i] = std::sqrt(k0) * (std::exp(-a * a / (2.0 * w2)) - std::exp(-b * b / (2.0 * w2)));
  }
  psi[0] = cd{};
  return psi;
}

std::vector<cd> step_envelope(const std::vector<cd>& psi_col, std::span<const double> c_col,
                              double c_ref, double k0, double dr_step, double dz,
                              std::span<const double> sponge) {
  const int K = static_cast<int>(psi_col.size());
  if (K < 2 || c_col.size() != psi_col.size())
    throw std::invalid_argument("step_envelope: column length mismatch");
  if (!(k0 > 0) || !(dr_step > 0) || !(dz > 0))
    throw std::invalid_argument("step_envelope: k0, dr, dz must be positive");
  if (!all_finite(psi_col.data(), psi_col.size()))
    throw NumericError("step_envelope: non-finite input column");

  std::vector<cd> psi = psi_col;
  std::vector<cd> screen = make_half_screen(c_col, c_ref, k0, dr_step);
  std::vector<cd> diffr = make_diffraction(K, k0, dr_step, dz);
  std::vector<double> sp;
  const std::vector<double>* sp_ptr = nullptr;
  if (!sponge.empty()) {
    if (sponge.size() != psi_col.size())
      throw std::invalid_argument("step_envelope: sponge length mismatch");
    sp.assign(sponge.begin(), sponge.end());
    sp_ptr = &sp;
  }
  Fft1D fft(2 * K);
  split_step(psi, screen, diffr, sp_ptr, fft);
  return psi;
}

EnvelopeField solve_pe(const Scenario& scn, const PEConfig& cfg) {
  if (std::string err = validate_scenario(scn); !err.empty())
    throw std::invalid_argument("solve_pe: invalid scenario: " + err);

  const Grid2D& g = scn.ssf.grid;
  const int K = extended_depth_rows(g, cfg);
  const double k0 = scn.k0();
  const double lambda = scn.c_ref / scn.source_freq;
  const int n_sub = std::max(1, static_cast<int>(std::ceil(g.dr / std::min(g.dr, lambda))));
  const double h = g.dr / n_sub;

  EnvelopeField env;
  env.grid = g;
  env.n_depth_ext = K;
  env.psi = CMat(K, g.n_range);

  // per-step sponge: raised-cosine ramp from the physical bottom to the peak
  const double z_phys = g.depth_extent();
  const double z_total = (K - 1) * g.dz;
  std::vector<double> sponge(K, 1.0);
  bool have_sponge = cfg.sponge_strength > 0.0 && K > g.n_depth;
  if (have_sponge) {
    for (int i = g.n_depth; i < K; ++i) {
      double t = (i * g.dz - z_phys) / (z_total - z_phys);
      double alpha = cfg.sponge_strength * 0.5 * (1.0 - std::cos(kPi * std::min(t, 1.0)));
      sponge[i] = std::exp(-alpha);
    }
  }

  std::vector<cd> diffr = make_diffraction(K, k0, h, g.dz);
  std::vector<cd> psi = gaussian_starter(scn, K, cfg.starter_width_factor);
  Fft1D fft(2 * K);

  std::vector<double> c_col(K);
  for (int j = 0; j < g.n_range; ++j) {
    // extended sound-speed column: sediment speed below the bathymetry
    for (int i = 0; i < K; ++i) {
      double z = i * g.dz;
      if (z <= scn.ssf.bathy[j] && i < g.n_depth)
        c_col[i] = scn.ssf.c(i, j);
      else
        c_col[i] = scn.ssf.v_sed;
    }
    std::vector<cd> screen = make_half_screen(c_col, scn.c_ref, k0, h);
    for (int s = 0; s < n_sub; ++s)
      split_step(psi, screen, diffr, have_sponge ? &sponge : nullptr, fft);
    if (!all_finite(psi.data(), psi.size()))
      throw NumericError("solve_pe: propagation blow-up near r = " +
                         std::to_string(g.range_at(j)) + " m (column " + std::to_string(j) + ")");
    for (int i = 0; i < K; ++i) env.psi(i, j) = psi[i];
  }
  return env;
}

double starter_axis_amplitude(double k0, double r, double width_factor) {
  double w2 = width_factor * width_factor;
  double x = k0 * r / w2;
  return std::sqrt(k0) / std::pow(1.0 + x * x, 0.25);
}

TLField envelope_to_tl(const EnvelopeField& env, double k0, double starter_width_factor,
                       double tl_clip) {
  if (!(k0 > 0)) throw std::invalid_argument("envelope_to_tl: k0 must be positive");
  const Grid2D& g = env.grid;
  if (!all_finite(env.psi.data(), env.psi.size()))
    throw NumericError("envelope_to_tl: non-finite envelope");

  const double a_ref =
      starter_axis_amplitude(k0, 1.0, starter_width_factor) * std::sqrt(2.0 / (kPi * k0));
  const double floor_amp = a_ref * std::pow(10.0, -tl_clip / 20.0);

  TLField out;
  out.grid = g;
  out.tl = Mat(g.n_depth, g.n_range);
  for (int j = 0; j < g.n_range; ++j) {
    double carrier = std::sqrt(2.0 / (kPi * k0 * g.range_at(j)));
    for (int i = 0; i < g.n_depth; ++i) {
      double amp = std::abs(env.psi(i, j)) * carrier;
      double tl = (amp <= floor_amp) ? tl_clip : -20.0 * std::log10(amp / a_ref);
      out.tl(i, j) = std::clamp(tl, 0.0, tl_clip);
    }
  }
  return out;
}

}  // namespace hfno
