#include "hfno/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "hfno/rng.hpp"

namespace hfno {

LogLevel log_level() {
  static LogLevel lvl = [] {
    const char* e = std::getenv("HFNO_LOG");
    if (!e) return LogLevel::Info;
    if (std::strcmp(e, "quiet") == 0) return LogLevel::Quiet;
    if (std::strcmp(e, "debug") == 0) return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return lvl;
}

Grid2D build_grid(int n_range, int n_depth, double range_extent_m, double depth_extent_m) {
  if (n_range < 2 || n_depth < 2)
    throw std::invalid_argument("build_grid: need at least 2 samples per axis");
  if (!(range_extent_m > 0.0) || !(depth_extent_m > 0.0))
    throw std::invalid_argument("build_grid: extents must be positive");
  Grid2D g;
  g.n_range = n_range;
  g.n_depth = n_depth;
  g.dr = range_extent_m / n_range;
  g.dz = depth_extent_m / (n_depth - 1);
  g.r0 = g.dr;  // keep r = 0 (singular source column) off the grid
  return g;
}

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

struct RangeMode {
  double amp, freq, phase, zfreq, zphase;
};

// Smooth range-depth perturbation bounded by 1 in magnitude: a short sum of
// separable sinusoids whose amplitudes sum to 1.
struct Perturbation {
  std::vector<RangeMode> modes;

  static Perturbation draw(Rng& rng, int n_modes) {
    Perturbation p;
    double total = 0.0;
    std::vector<double> raw(n_modes);
    for (int m = 0; m < n_modes; ++m) {
      raw[m] = 0.25 + rng.uniform();
      total += raw[m];
    }
    for (int m = 0; m < n_modes; ++m) {
      RangeMode rm;
      rm.amp = raw[m] / total;
      rm.freq = 0.5 + 2.5 * rng.uniform();   // cycles over the range extent
      rm.phase = rng.uniform(0.0, 2.0 * kPi);
      rm.zfreq = 0.5 + 1.5 * rng.uniform();  // cycles over the depth extent
      rm.zphase = rng.uniform(0.0, 2.0 * kPi);
      p.modes.push_back(rm);
    }
    return p;
  }

  double eval(double r_frac, double z_frac) const {
    double v = 0.0;
    for (const auto& m : modes)
      v += m.amp * std::sin(2.0 * kPi * m.freq * r_frac + m.phase) *
           std::sin(2.0 * kPi * m.zfreq * z_frac + m.zphase);
    return v;  // |v| <= sum(amp) = 1
  }
};

double munk_profile(double z, double z_axis, double scale_b) {
  // canonical Munk shape around a randomized channel axis
  const double eps = 0.00737;
  double zt = 2.0 * (z - z_axis) / scale_b;
  return 1500.0 * (1.0 + eps * (zt - 1.0 + std::exp(-zt)));
}

double thermocline_profile(double z, double c_surf, double dc, double z_t, double w_t,
                           double grad) {
  // mixed layer over a smooth thermocline drop, mild positive gradient below
  return c_surf - dc * 0.5 * (1.0 + std::tanh((z - z_t) / w_t)) + grad * z;
}

}  // namespace

Scenario synth_environment(const SynthConfig& cfg, int index) {
  if (index < 0 || index >= cfg.n_samples)
    throw std::out_of_range("synth_environment: index out of range");
  const Grid2D& g = cfg.grid;
  if (g.n_range < 2 || g.n_depth < 2 || !(g.dr > 0) || !(g.dz > 0) || !(g.r0 > 0))
    throw std::invalid_argument("synth_environment: degenerate grid");

  Rng rng = Rng::stream(cfg.seed, static_cast<uint64_t>(index));
  const double z_ext = g.depth_extent();
  const double r_ext = g.range_extent();

  Scenario scn;
  scn.source_depth = cfg.source_depth;
  scn.source_freq = cfg.source_freq;
  scn.c_ref = cfg.c_ref;
  scn.ssf.grid = g;
  scn.ssf.v_sed = cfg.v_sed;
  scn.ssf.c = Mat(g.n_depth, g.n_range);
  scn.ssf.bathy.assign(g.n_range, 0.0);

  // base depth profile
  double z_axis = 0.0, scale_b = 0.0;          // munk
  double c_surf = 0.0, dc = 0.0, z_t = 0.0, w_t = 0.0, grad = 0.0;  // thermocline
  if (cfg.profile_family == ProfileFamily::MunkPerturbed) {
    z_axis = z_ext * rng.uniform(0.35, 0.65);
    scale_b = std::max(200.0, z_ext * rng.uniform(0.6, 1.0));
  } else {
    c_surf = rng.uniform(1505.0, 1535.0);
    dc = rng.uniform(15.0, 40.0);
    z_t = z_ext * rng.uniform(0.15, 0.4);
    w_t = std::max(4.0 * g.dz, z_ext * rng.uniform(0.05, 0.12));
    grad = rng.uniform(0.0, 0.018);
  }
  Perturbation pert = Perturbation::draw(rng, 3);

  // bathymetry: keep a safety margin below the source and above the last row
  const double b_max = 0.98 * z_ext;
  const double b_min = std::min(b_max, std::max(0.35 * z_ext, cfg.source_depth + 4.0 * g.dz));
  double b0 = rng.uniform(b_min, b_max);
  double b1 = rng.uniform(b_min, b_max);
  double bump_amp = 0.5 * (b_max - b_min) * rng.uniform(0.2, 1.0);
  double bf1 = 1.0 + 2.0 * rng.uniform(), bp1 = rng.uniform(0.0, 2.0 * kPi);
  double bf2 = 2.0 + 3.0 * rng.uniform(), bp2 = rng.uniform(0.0, 2.0 * kPi);

  for (int j = 0; j < g.n_range; ++j) {
    double rf = g.range_at(j) / r_ext;
    double b;
    switch (cfg.bathy_family) {
      case BathyFamily::Flat:
        b = b0;
        break;
      case BathyFamily::Slope:
        b = b0 + (b1 - b0) * rf;
        break;
      default:
        b = 0.5 * (b0 + b1) +
            bump_amp * (0.7 * std::sin(2.0 * kPi * bf1 * rf + bp1) +
                        0.3 * std::sin(2.0 * kPi * bf2 * rf + bp2));
        break;
    }
    scn.ssf.bathy[j] = std::clamp(b, b_min, b_max);
  }

  for (int i = 0; i < g.n_depth; ++i) {
    double z = g.depth_at(i);
    double base = (cfg.profile_family == ProfileFamily::MunkPerturbed)
                      ? munk_profile(z, z_axis, scale_b)
                      : thermocline_profile(z, c_surf, dc, z_t, w_t, grad);
    base = std::clamp(base, 1300.0 + cfg.perturbation_scale, 1900.0 - cfg.perturbation_scale);
    for (int j = 0; j < g.n_range; ++j) {
      double rf = g.range_at(j) / r_ext;
      double zf = z_ext > 0 ? z / z_ext : 0.0;
      scn.ssf.c(i, j) = base + cfg.perturbation_scale * pert.eval(rf, zf);
    }
  }
  return scn;
}

std::string validate_scenario(const Scenario& scn) {
  const Grid2D& g = scn.ssf.grid;
  if (g.n_range < 2 || g.n_depth < 2) return "grid too small";
  if (!(g.dr > 0) || !(g.dz > 0) || !(g.r0 > 0)) return "non-positive grid spacing";
  if (scn.ssf.c.rows != g.n_depth || scn.ssf.c.cols != g.n_range) return "c shape mismatch";
  if (static_cast<int>(scn.ssf.bathy.size()) != g.n_range) return "bathy length mismatch";
  if (!(scn.ssf.v_sed > 0)) return "non-positive sediment speed";
  for (double v : scn.ssf.c.a)
    if (!(v >= 1300.0 && v <= 1900.0)) return "sound speed outside [1300, 1900]";
  double bmin = scn.ssf.bathy[0];
  for (double b : scn.ssf.bathy) {
    if (!(b > 0.0 && b <= g.depth_extent())) return "bathymetry outside water column";
    bmin = std::min(bmin, b);
  }
  if (!(scn.source_depth > 0.0 && scn.source_depth < bmin)) return "source depth outside water";
  if (!(scn.source_freq > 0.0)) return "non-positive frequency";
  if (!(scn.c_ref > 0.0)) return "non-positive reference speed";
  return {};
}

const char* to_string(ProfileFamily f) {
  return f == ProfileFamily::MunkPerturbed ? "munk-perturbed" : "linear-thermocline";
}
const char* to_string(BathyFamily f) {
  switch (f) {
    case BathyFamily::Flat: return "flat";
    case BathyFamily::Slope: return "slope";
    default: return "smooth-random";
  }
}
bool profile_from_string(const std::string& s, ProfileFamily& out) {
  if (s == "munk-perturbed" || s == "munk") out = ProfileFamily::MunkPerturbed;
  else if (s == "linear-thermocline" || s == "thermocline") out = ProfileFamily::LinearThermocline;
  else return false;
  return true;
}
bool bathy_from_string(const std::string& s, BathyFamily& out) {
  if (s == "flat") out = BathyFamily::Flat;
  else if (s == "slope") out = BathyFamily::Slope;
  else if (s == "smooth-random" || s == "random") out = BathyFamily::SmoothRandom;
  else return false;
  return true;
}

}  // namespace hfno
