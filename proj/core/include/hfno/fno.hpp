#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hfno/encodings.hpp"
#include "hfno/fft.hpp"

namespace hfno {

enum class Activation { Gelu, Identity };  // Identity exists as a test hook

struct Hyperparams {
  int n_layers = 4;
  int width = 64;    // feature dimension C
  int modes_z = 64;  // retained low depth modes
  int modes_r = 64;  // retained range modes per sign (total 2*modes_r)
  int in_channels = 4;
  int out_channels = 1;
  Activation activation = Activation::Gelu;
};

// Retained-mode extents on a concrete grid. Depth uses the half spectrum
// (rows 0..kz_eff-1); range keeps kr_pos leading and kr_neg trailing modes.
// Weight slot p < modes_r addresses range mode +p, slot modes_r + u
// addresses range mode -(u+1), independent of the grid size.
struct ModeExtents {
  int kz_eff = 0;
  int kr_pos = 0;
  int kr_neg = 0;
};
ModeExtents effective_modes(const Hyperparams& hp, int M, int N);

struct LayerParams {
  std::vector<cd> R;      // [C][C][modes_z][2*modes_r], indexed (c_in, c_out, kz, slot)
  std::vector<double> W;  // [C][C], (c_out, c_in)
  std::vector<double> b;  // [C]
};

struct ModelParams {
  Hyperparams hp;
  std::vector<double> lift_w;  // [C][in_channels]
  std::vector<double> lift_b;  // [C]
  std::vector<LayerParams> layers;
  std::vector<double> proj_w;  // [out_channels][C]
  std::vector<double> proj_b;  // [out_channels]
  StandardStats stats;
  EncodingVariant encoding = EncodingVariant::Full;  // input channels this model expects
};

struct ModelGrads {
  std::vector<double> lift_w, lift_b;
  std::vector<LayerParams> layers;
  std::vector<double> proj_w, proj_b;
};

// Parameter tensors never depend on grid size; this counts real scalars
// (complex weights count twice).
size_t param_count(const Hyperparams& hp);

ModelParams init_params(const Hyperparams& hp, uint64_t seed);
ModelGrads zero_grads(const Hyperparams& hp);

// Flat views over every real degree of freedom, in a fixed order shared by
// params and grads (complex tensors viewed as interleaved re/im doubles).
std::vector<std::span<double>> param_views(ModelParams& p);
std::vector<std::span<double>> grad_views(ModelGrads& g);
std::vector<std::span<const double>> grad_views(const ModelGrads& g);

double gelu(double x);
double gelu_grad(double x);

// Activations and spectra cached by forward() for exact reverse mode.
struct ForwardTape {
  int M = 0, N = 0;
  ModeExtents me;
  std::vector<double> input;            // [in_channels][M*N]
  std::vector<std::vector<double>> v;   // v[0..I]: layer inputs / final features
  std::vector<std::vector<double>> z;   // pre-activations per layer
  std::vector<std::vector<cd>> v_spec;  // retained spectrum per layer [C][kz_eff][2*modes_r]
};

// Owns FFT plans and scratch for one grid size; reusable across samples,
// not shareable across threads.
class FnoWorkspace {
 public:
  FnoWorkspace(const Hyperparams& hp, int M, int N);
  ~FnoWorkspace();
  FnoWorkspace(const FnoWorkspace&) = delete;
  FnoWorkspace& operator=(const FnoWorkspace&) = delete;

  int M() const;
  int N() const;

 private:
  friend struct FnoKernels;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Standardized 4-channel input -> standardized TL prediction [M x N].
Mat forward(const ModelParams& p, const EncodedInput& a_std, FnoWorkspace& ws,
            ForwardTape* tape = nullptr);

// Exact reverse-mode gradients for every parameter tensor given dL/dpred.
// Complex gradients follow the (d/dRe + i d/dIm) convention, so a real
// descent step on the interleaved components is correct.
ModelGrads backward(const ModelParams& p, const ForwardTape& tape, const Mat& dpred,
                    FnoWorkspace& ws);

// Mode-truncated spectral convolution of a [C][M][N] stack (standalone entry
// point; forward() uses the same kernel with cached plans).
std::vector<double> spectral_conv(std::span<const double> v, int C, int M, int N,
                                  std::span<const cd> R, int modes_z, int modes_r);

// v' = act(W v + b + spectral_conv(v, R))
std::vector<double> fourier_layer(std::span<const double> v, int C, int M, int N,
                                  std::span<const cd> R, int modes_z, int modes_r,
                                  std::span<const double> W, std::span<const double> b,
                                  Activation act = Activation::Gelu);

}  // namespace hfno
