#pragma once

#include <string>
#include <vector>

#include "hfno/common.hpp"

namespace hfno {

// Uniform range-depth discretization. Depth rows run z = 0 (surface) to
// (n_depth-1)*dz; range columns run r = r0 + j*dr with r0 > 0, so the
// singular source column r = 0 is never part of a grid.
struct Grid2D {
  int n_range = 0;
  int n_depth = 0;
  double dr = 0.0;  // m
  double dz = 0.0;  // m
  double r0 = 0.0;  // m, first range sample

  double range_at(int j) const { return r0 + j * dr; }
  double depth_at(int i) const { return i * dz; }
  double depth_extent() const { return (n_depth - 1) * dz; }
  double range_extent() const { return n_range * dr; }
  bool operator==(const Grid2D& o) const = default;
};

Grid2D build_grid(int n_range, int n_depth, double range_extent_m, double depth_extent_m);

// Sound speed over a grid plus the sea-floor profile and sediment speed.
// c holds the water-column profile on the full grid; cells below bathy are
// only reinterpreted as sediment by the encodings / PE solver.
struct SoundSpeedField {
  Grid2D grid;
  Mat c;                      // [n_depth x n_range], m/s
  std::vector<double> bathy;  // [n_range], water depth per column, m
  double v_sed = 1700.0;      // m/s
};

struct Scenario {
  SoundSpeedField ssf;
  double source_depth = 50.0;  // m
  double source_freq = 200.0;  // Hz
  double c_ref = 1500.0;       // m/s, defines k0 = 2*pi*f/c_ref

  double k0() const { return 2.0 * 3.141592653589793238462643383279 * source_freq / c_ref; }
};

enum class ProfileFamily { MunkPerturbed, LinearThermocline };
enum class BathyFamily { Flat, Slope, SmoothRandom };

struct SynthConfig {
  uint64_t seed = 0;
  int n_samples = 1;
  Grid2D grid;
  ProfileFamily profile_family = ProfileFamily::MunkPerturbed;
  BathyFamily bathy_family = BathyFamily::SmoothRandom;
  double perturbation_scale = 5.0;  // m/s
  // Source settings shared by every generated scenario.
  double source_depth = 50.0;  // m
  double source_freq = 200.0;  // Hz
  double c_ref = 1500.0;       // m/s
  double v_sed = 1700.0;       // m/s
};

// Deterministic synthetic scenario generator: a pure function of
// (cfg, index). The underlying sound speed and bathymetry are smooth
// closed-form functions of (r, z), so regenerating with a refined grid
// samples the same continuous environment.
Scenario synth_environment(const SynthConfig& cfg, int index);

std::string validate_scenario(const Scenario& scn);  // empty string if valid

const char* to_string(ProfileFamily f);
const char* to_string(BathyFamily f);
bool profile_from_string(const std::string& s, ProfileFamily& out);
bool bathy_from_string(const std::string& s, BathyFamily& out);

}  // namespace hfno
