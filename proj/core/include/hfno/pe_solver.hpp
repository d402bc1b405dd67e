#pragma once

#include <span>
#include <vector>

#include "hfno/grid.hpp"

namespace hfno {

// Transmission loss in dB over a grid; the training target.
struct TLField {
  Grid2D grid;
  Mat tl;  // [n_depth x n_range]
};

// Envelope on the depth-extended march grid. Column j holds psi at range
// grid.range_at(j); rows n_depth..n_depth_ext-1 are the absorbing extension.
struct EnvelopeField {
  Grid2D grid;
  int n_depth_ext = 0;
  CMat psi;  // [n_depth_ext x n_range]
};

struct PEConfig {
  double depth_extension_factor = 0.5;  // extension depth / physical depth
  double sponge_strength = 0.5;         // peak attenuation per march step, nepers
  double starter_width_factor = 1.0;    // >1 widens the source Gaussian
};

int extended_depth_rows(const Grid2D& grid, const PEConfig& cfg);

// Source field at r = 0 on the extended depth grid: a Gaussian at the source
// depth minus its surface image (pressure release via odd symmetry).
std::vector<cd> gaussian_starter(const Scenario& scn, int n_depth_ext, double width_factor = 1.0);

// One symmetric split step of size dr_step: half refraction screen, spectral
// diffraction on the odd-mirrored column, half screen, then optional sponge.
// c_col supplies the sound speed on the extended column; sponge (if given)
// holds per-step amplitude factors, 1.0 outside the absorbing region.
std::vector<cd> step_envelope(const std::vector<cd>& psi_col, std::span<const double> c_col,
                              double c_ref, double k0, double dr_step, double dz,
                              std::span<const double> sponge = {});

// March the standard parabolic equation over the scenario's grid with the
// split-step Fourier method. Internal step min(dr, lambda), subsampled to the
// output columns; medium held constant across each output column's segment.
EnvelopeField solve_pe(const Scenario& scn, const PEConfig& cfg = {});

// Convert an envelope to transmission loss re 1 m: the envelope magnitude is
// combined with the cylindrical-spreading carrier amplitude sqrt(2/(pi*k0*r))
// and referenced against the free-field starter evaluated analytically at
// r = 1 m. Output is clipped to [0, tl_clip] on the physical (unextended) grid.
TLField envelope_to_tl(const EnvelopeField& env, double k0, double starter_width_factor = 1.0,
                       double tl_clip = 120.0);

// |psi| of the free-space analytic evolution of the (un-imaged) Gaussian
// starter, on axis; also used for the 1 m reference amplitude.
double starter_axis_amplitude(double k0, double r, double width_factor);

}  // namespace hfno
