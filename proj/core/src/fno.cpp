#include "hfno/fno.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "hfno/rng.hpp"

namespace hfno {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
}  // namespace

double gelu(double x) { return x * 0.5 * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_grad(double x) {
  double phi_cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
  double phi_pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
  return phi_cdf + x * phi_pdf;
}

ModeExtents effective_modes(const Hyperparams& hp, int M, int N) {
  ModeExtents me;
  me.kz_eff = std::min(hp.modes_z, M / 2 + 1);
  me.kr_pos = std::min(hp.modes_r, (N + 1) / 2);
  me.kr_neg = std::min(hp.modes_r, N / 2);
  return me;
}

size_t param_count(const Hyperparams& hp) {
  size_t C = hp.width;
  size_t per_layer = 2 * C * C * hp.modes_z * (2 * static_cast<size_t>(hp.modes_r))  // R re+im
                     + C * C + C;                                                    // W, b
  return C * hp.in_channels + C + hp.n_layers * per_layer +
         static_cast<size_t>(hp.out_channels) * C + hp.out_channels;
}

ModelParams init_params(const Hyperparams& hp, uint64_t seed) {
  if (hp.n_layers < 1 || hp.width < 1 || hp.modes_z < 1 || hp.modes_r < 1 ||
      hp.in_channels < 1 || hp.out_channels < 1)
    throw std::invalid_argument("init_params: invalid hyperparameters");
  Rng rng(seed);
  const int C = hp.width;
  ModelParams p;
  p.hp = hp;

  auto uniform_fan = [&rng](std::vector<double>& v, size_t n, int fan_in) {
    double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
    v.resize(n);
    for (auto& x : v) x = rng.uniform(-s, s);
  };

  uniform_fan(p.lift_w, static_cast<size_t>(C) * hp.in_channels, hp.in_channels);
  uniform_fan(p.lift_b, C, hp.in_channels);

  const double r_scale = 1.0 / (static_cast<double>(C) * C);
  const size_t r_len = static_cast<size_t>(C) * C * hp.modes_z * 2 * hp.modes_r;
  p.layers.resize(hp.n_layers);
  for (auto& layer : p.layers) {
    layer.R.resize(r_len);
    for (auto& w : layer.R)
      w = std::polar(r_scale * rng.uniform(), rng.uniform(0.0, 2.0 * kPi));
    uniform_fan(layer.W, static_cast<size_t>(C) * C, C);
    uniform_fan(layer.b, C, C);
  }
  uniform_fan(p.proj_w, static_cast<size_t>(hp.out_channels) * C, C);
  uniform_fan(p.proj_b, hp.out_channels, C);
  return p;
}

ModelGrads zero_grads(const Hyperparams& hp) {
  const int C = hp.width;
  ModelGrads g;
  g.lift_w.assign(static_cast<size_t>(C) * hp.in_channels, 0.0);
  g.lift_b.assign(C, 0.0);
  g.layers.resize(hp.n_layers);
  const size_t r_len = static_cast<size_t>(C) * C * hp.modes_z * 2 * hp.modes_r;
  for (auto& layer : g.layers) {
    layer.R.assign(r_len, cd{});
    layer.W.assign(static_cast<size_t>(C) * C, 0.0);
    layer.b.assign(C, 0.0);
  }
  g.proj_w.assign(static_cast<size_t>(hp.out_channels) * C, 0.0);
  g.proj_b.assign(hp.out_channels, 0.0);
  return g;
}

namespace {
template <class P>
std::vector<std::span<double>> views_impl(P& p) {
  std::vector<std::span<double>> v;
  v.emplace_back(p.lift_w);
  v.emplace_back(p.lift_b);
  for (auto& layer : p.layers) {
    v.emplace_back(reinterpret_cast<double*>(layer.R.data()), layer.R.size() * 2);
    v.emplace_back(layer.W);
    v.emplace_back(layer.b);
  }
  v.emplace_back(p.proj_w);
  v.emplace_back(p.proj_b);
  return v;
}
}  // namespace

std::vector<std::span<double>> param_views(ModelParams& p) { return views_impl(p); }
std::vector<std::span<double>> grad_views(ModelGrads& g) { return views_impl(g); }
std::vector<std::span<const double>> grad_views(const ModelGrads& g) {
  auto v = views_impl(const_cast<ModelGrads&>(g));
  return {v.begin(), v.end()};
}

struct FnoWorkspace::Impl {
  int M, N, Mh;
  ModeExtents me;
  int kr2;  // 2 * modes_r, the weight-slot stride
  FftColsR2C r2c;
  FftColsC2R c2r;
  FftRowsC2C rows;
  // scratch
  std::vector<cd> vret, uret;           // [C][kz_eff][kr2]
  std::vector<double> sbuf;             // spectral path output [C][M*N]
  std::vector<double> ping, pong, inp;  // activations / flattened input
  std::vector<double> dz, dv;           // backward scratch

  Impl(const Hyperparams& hp, int m, int n)
      : M(m),
        N(n),
        Mh(m / 2 + 1),
        me(effective_modes(hp, m, n)),
        kr2(2 * hp.modes_r),
        r2c(m, n),
        c2r(m, n),
        rows(me.kz_eff, n) {
    if (m < 1 || n < 1) throw std::invalid_argument("FnoWorkspace: empty grid");
    const size_t C = hp.width;
    const size_t px = static_cast<size_t>(M) * N;
    vret.resize(C * me.kz_eff * kr2);
    uret.resize(C * me.kz_eff * kr2);
    sbuf.resize(C * px);
    ping.resize(C * px);
    pong.resize(C * px);
    inp.resize(static_cast<size_t>(hp.in_channels) * px);
    dz.resize(C * px);
    dv.resize(C * px);
  }
};

FnoWorkspace::FnoWorkspace(const Hyperparams& hp, int M, int N)
    : impl_(std::make_unique<Impl>(hp, M, N)) {}
FnoWorkspace::~FnoWorkspace() = default;
int FnoWorkspace::M() const { return impl_->M; }
int FnoWorkspace::N() const { return impl_->N; }

// Internal kernels operating on a workspace.
struct FnoKernels {
  using Impl = FnoWorkspace::Impl;

  static Impl& impl(FnoWorkspace& ws) { return *ws.impl_; }

  // v_c (real M*N) -> retained spectrum slots vret_c [kz_eff][kr2]
  static void to_spectrum(Impl& w, const double* v_c, cd* vret_c) {
    std::memcpy(w.r2c.in(), v_c, sizeof(double) * w.M * w.N);
    w.r2c.exec_unnorm();
    std::memcpy(w.rows.data(), w.r2c.out(), sizeof(cd) * w.me.kz_eff * w.N);
    w.rows.forward_unnorm();
    const int mr = w.kr2 / 2;
    std::fill(vret_c, vret_c + static_cast<size_t>(w.me.kz_eff) * w.kr2, cd{});
    const cd* rw = w.rows.data();
    for (int kz = 0; kz < w.me.kz_eff; ++kz) {
      const cd* row = rw + static_cast<size_t>(kz) * w.N;
      cd* out = vret_c + static_cast<size_t>(kz) * w.kr2;
      for (int p = 0; p < w.me.kr_pos; ++p) out[p] = row[p];
      for (int u = 0; u < w.me.kr_neg; ++u) out[mr + u] = row[w.N - 1 - u];
    }
  }

  // retained slots -> real field, scaled by 1/(M*N)
  static void from_spectrum(Impl& w, const cd* uret_c, double* out_c) {
    const int mr = w.kr2 / 2;
    cd* rw = w.rows.data();
    std::fill(rw, rw + static_cast<size_t>(w.me.kz_eff) * w.N, cd{});
    for (int kz = 0; kz < w.me.kz_eff; ++kz) {
      const cd* in = uret_c + static_cast<size_t>(kz) * w.kr2;
      cd* row = rw + static_cast<size_t>(kz) * w.N;
      for (int p = 0; p < w.me.kr_pos; ++p) row[p] = in[p];
      for (int u = 0; u < w.me.kr_neg; ++u) row[w.N - 1 - u] = in[mr + u];
    }
    w.rows.backward_unnorm();
    cd* ci = w.c2r.in();
    std::memcpy(ci, rw, sizeof(cd) * w.me.kz_eff * w.N);
    if (w.me.kz_eff < w.Mh)
      std::memset(ci + static_cast<size_t>(w.me.kz_eff) * w.N, 0,
                  sizeof(cd) * (w.Mh - w.me.kz_eff) * w.N);
    // self-conjugate depth bins must be real before the c2r transform
    for (int j = 0; j < w.N; ++j) ci[j] = cd{ci[j].real(), 0.0};
    if (w.M % 2 == 0 && w.me.kz_eff == w.Mh) {
      cd* last = ci + static_cast<size_t>(w.Mh - 1) * w.N;
      for (int j = 0; j < w.N; ++j) last[j] = cd{last[j].real(), 0.0};
    }
    w.c2r.exec_unnorm();
    const double scale = 1.0 / (static_cast<double>(w.M) * w.N);
    const double* ro = w.c2r.out();
    const size_t px = static_cast<size_t>(w.M) * w.N;
    for (size_t k = 0; k < px; ++k) out_c[k] = ro[k] * scale;
  }

  // adjoint of from_spectrum: real upstream g -> dU slots
  static void adjoint_to_dU(Impl& w, const double* g_c, cd* du_c) {
    std::memcpy(w.r2c.in(), g_c, sizeof(double) * w.M * w.N);
    w.r2c.exec_unnorm();
    cd* rw = w.rows.data();
    std::memcpy(rw, w.r2c.out(), sizeof(cd) * w.me.kz_eff * w.N);
    for (int kz = 1; kz < w.me.kz_eff; ++kz) {
      bool self = (w.M % 2 == 0) && (kz == w.Mh - 1);
      if (self) continue;
      cd* row = rw + static_cast<size_t>(kz) * w.N;
      for (int j = 0; j < w.N; ++j) row[j] *= 2.0;
    }
    w.rows.forward_unnorm();
    const int mr = w.kr2 / 2;
    const double scale = 1.0 / (static_cast<double>(w.M) * w.N);
    std::fill(du_c, du_c + static_cast<size_t>(w.me.kz_eff) * w.kr2, cd{});
    for (int kz = 0; kz < w.me.kz_eff; ++kz) {
      const cd* row = rw + static_cast<size_t>(kz) * w.N;
      cd* out = du_c + static_cast<size_t>(kz) * w.kr2;
      for (int p = 0; p < w.me.kr_pos; ++p) out[p] = row[p] * scale;
      for (int u = 0; u < w.me.kr_neg; ++u) out[mr + u] = row[w.N - 1 - u] * scale;
    }
  }

  // adjoint of to_spectrum: dV slots -> accumulate into dv_c (real M*N)
  static void adjoint_to_dv(Impl& w, const cd* dv_spec_c, double* dv_c) {
    const int mr = w.kr2 / 2;
    cd* rw = w.rows.data();
    std::fill(rw, rw + static_cast<size_t>(w.me.kz_eff) * w.N, cd{});
    for (int kz = 0; kz < w.me.kz_eff; ++kz) {
      const cd* in = dv_spec_c + static_cast<size_t>(kz) * w.kr2;
      cd* row = rw + static_cast<size_t>(kz) * w.N;
      for (int p = 0; p < w.me.kr_pos; ++p) row[p] = in[p];
      for (int u = 0; u < w.me.kr_neg; ++u) row[w.N - 1 - u] = in[mr + u];
    }
    w.rows.backward_unnorm();
    cd* ci = w.c2r.in();
    std::memcpy(ci, rw, sizeof(cd) * w.me.kz_eff * w.N);
    if (w.me.kz_eff < w.Mh)
      std::memset(ci + static_cast<size_t>(w.me.kz_eff) * w.N, 0,
                  sizeof(cd) * (w.Mh - w.me.kz_eff) * w.N);
    for (int kz = 0; kz < w.me.kz_eff; ++kz) {
      bool self = (kz == 0) || ((w.M % 2 == 0) && kz == w.Mh - 1);
      cd* row = ci + static_cast<size_t>(kz) * w.N;
      if (self) {
        for (int j = 0; j < w.N; ++j) row[j] = cd{row[j].real(), 0.0};
      } else {
        for (int j = 0; j < w.N; ++j) row[j] *= 0.5;
      }
    }
    w.c2r.exec_unnorm();
    const double* ro = w.c2r.out();
    const size_t px = static_cast<size_t>(w.M) * w.N;
    for (size_t k = 0; k < px; ++k) dv_c[k] += ro[k];
  }

  // U[c2] = sum_c1 R[c1][c2] .* V[c1] per retained mode
  static void contract(Impl& w, const cd* R, int C, int modes_z, const cd* vret, cd* uret) {
    const size_t slots = static_cast<size_t>(w.me.kz_eff) * w.kr2;
    const size_t ch_stride = slots;
    const size_t r_pair_stride = static_cast<size_t>(modes_z) * w.kr2;
    std::fill(uret, uret + static_cast<size_t>(C) * slots, cd{});
    for (int c1 = 0; c1 < C; ++c1) {
      const cd* v = vret + c1 * ch_stride;
      for (int c2 = 0; c2 < C; ++c2) {
        const cd* rw = R + (static_cast<size_t>(c1) * C + c2) * r_pair_stride;
        cd* u = uret + c2 * ch_stride;
        for (int kz = 0; kz < w.me.kz_eff; ++kz) {
          const cd* rrow = rw + static_cast<size_t>(kz) * w.kr2;
          const cd* vrow = v + static_cast<size_t>(kz) * w.kr2;
          cd* urow = u + static_cast<size_t>(kz) * w.kr2;
          for (int s = 0; s < w.kr2; ++s) urow[s] += rrow[s] * vrow[s];
        }
      }
    }
  }

  // dV[c1] = sum_c2 dU[c2] .* conj(R[c1][c2]); dR[c1][c2] += dU[c2] .* conj(V[c1])
  static void contract_adjoint(Impl& w, const cd* R, int C, int modes_z, const cd* vret,
                               const cd* du, cd* dv_spec, cd* dR) {
    const size_t slots = static_cast<size_t>(w.me.kz_eff) * w.kr2;
    const size_t r_pair_stride = static_cast<size_t>(modes_z) * w.kr2;
    std::fill(dv_spec, dv_spec + static_cast<size_t>(C) * slots, cd{});
    for (int c1 = 0; c1 < C; ++c1) {
      const cd* v = vret + c1 * slots;
      cd* dvs = dv_spec + c1 * slots;
      for (int c2 = 0; c2 < C; ++c2) {
        const size_t pair = (static_cast<size_t>(c1) * C + c2) * r_pair_stride;
        const cd* rw = R + pair;
        cd* drw = dR + pair;
        const cd* u = du + c2 * slots;
        for (int kz = 0; kz < w.me.kz_eff; ++kz) {
          const size_t ko = static_cast<size_t>(kz) * w.kr2;
          for (int s = 0; s < w.kr2; ++s) {
            dvs[ko + s] += u[ko + s] * std::conj(rw[ko + s]);
            drw[ko + s] += u[ko + s] * std::conj(v[ko + s]);
          }
        }
      }
    }
  }

  // spectral path for a whole [C][M*N] stack: out = spectral_conv(v)
  static void spectral(Impl& w, const cd* R, int C, int modes_z, const double* v, double* out,
                       cd* vret_store) {
    const size_t px = static_cast<size_t>(w.M) * w.N;
    const size_t slots = static_cast<size_t>(w.me.kz_eff) * w.kr2;
    cd* vret = vret_store ? vret_store : w.vret.data();
    for (int c = 0; c < C; ++c) to_spectrum(w, v + c * px, vret + c * slots);
    contract(w, R, C, modes_z, vret, w.uret.data());
    for (int c = 0; c < C; ++c) from_spectrum(w, w.uret.data() + c * slots, out + c * px);
  }
};

namespace {

void apply_pointwise_linear(const double* W, const double* b, int c_out, int c_in,
                            const double* v, const double* add, double* out, size_t px) {
  for (int co = 0; co < c_out; ++co) {
    double* o = out + co * px;
    double bias = b ? b[co] : 0.0;
    if (add) {
      const double* a = add + co * px;
      for (size_t k = 0; k < px; ++k) o[k] = bias + a[k];
    } else {
      std::fill(o, o + px, bias);
    }
    for (int ci = 0; ci < c_in; ++ci) {
      double wv = W[static_cast<size_t>(co) * c_in + ci];
      const double* x = v + ci * px;
      for (size_t k = 0; k < px; ++k) o[k] += wv * x[k];
    }
  }
}

void activate(Activation act, const double* z, double* v, size_t n) {
  if (act == Activation::Identity) {
    if (v != z) std::memcpy(v, z, sizeof(double) * n);
    return;
  }
  for (size_t k = 0; k < n; ++k) v[k] = gelu(z[k]);
}

void check_finite_params(const ModelParams& p) {
  bool ok = all_finite(p.lift_w.data(), p.lift_w.size()) &&
            all_finite(p.lift_b.data(), p.lift_b.size()) &&
            all_finite(p.proj_w.data(), p.proj_w.size()) &&
            all_finite(p.proj_b.data(), p.proj_b.size());
  for (const auto& l : p.layers)
    ok = ok && all_finite(l.R.data(), l.R.size()) && all_finite(l.W.data(), l.W.size()) &&
         all_finite(l.b.data(), l.b.size());
  if (!ok) throw NumericError("forward: non-finite model parameters");
}

}  // namespace

Mat forward(const ModelParams& p, const EncodedInput& a_std, FnoWorkspace& ws,
            ForwardTape* tape) {
  auto& w = FnoKernels::impl(ws);
  const Hyperparams& hp = p.hp;
  const int M = a_std.grid.n_depth, N = a_std.grid.n_range;
  if (M != w.M || N != w.N) throw std::invalid_argument("forward: workspace grid mismatch");
  const size_t px = static_cast<size_t>(M) * N;
  const int C = hp.width;
  check_finite_params(p);

  for (int c = 0; c < hp.in_channels; ++c) {
    const Mat& ch = a_std.ch[c];
    if (ch.rows != M || ch.cols != N) throw std::invalid_argument("forward: input shape mismatch");
    std::memcpy(w.inp.data() + c * px, ch.data(), sizeof(double) * px);
  }
  if (!all_finite(w.inp.data(), w.inp.size()))
    throw NumericError("forward: non-finite input field");

  const size_t slots = static_cast<size_t>(w.me.kz_eff) * w.kr2;
  if (tape) {
    tape->M = M;
    tape->N = N;
    tape->me = w.me;
    tape->input.assign(w.inp.begin(), w.inp.end());
    tape->v.assign(hp.n_layers + 1, {});
    tape->z.assign(hp.n_layers, {});
    tape->v_spec.assign(hp.n_layers, {});
  }

  double* v_cur = w.ping.data();
  double* v_nxt = w.pong.data();
  apply_pointwise_linear(p.lift_w.data(), p.lift_b.data(), C, hp.in_channels, w.inp.data(),
                         nullptr, v_cur, px);

  for (int i = 0; i < hp.n_layers; ++i) {
    if (tape) {
      tape->v[i].assign(v_cur, v_cur + C * px);
      tape->v_spec[i].resize(static_cast<size_t>(C) * slots);
    }
    FnoKernels::spectral(w, p.layers[i].R.data(), C, hp.modes_z, v_cur, w.sbuf.data(),
                         tape ? tape->v_spec[i].data() : nullptr);
    // z = W v + b + spectral; v_next = act(z)
    apply_pointwise_linear(p.layers[i].W.data(), p.layers[i].b.data(), C, C, v_cur,
                           w.sbuf.data(), v_nxt, px);
    if (tape) tape->z[i].assign(v_nxt, v_nxt + C * px);
    activate(hp.activation, v_nxt, v_nxt, C * px);
    std::swap(v_cur, v_nxt);
  }
  if (tape) tape->v[hp.n_layers].assign(v_cur, v_cur + C * px);

  Mat pred(M, N);
  apply_pointwise_linear(p.proj_w.data(), p.proj_b.data(), hp.out_channels, C, v_cur, nullptr,
                         pred.data(), px);
  return pred;
}

ModelGrads backward(const ModelParams& p, const ForwardTape& tape, const Mat& dpred,
                    FnoWorkspace& ws) {
  auto& w = FnoKernels::impl(ws);
  const Hyperparams& hp = p.hp;
  const int M = tape.M, N = tape.N;
  if (M != w.M || N != w.N) throw std::invalid_argument("backward: workspace grid mismatch");
  if (dpred.rows != M || dpred.cols != N)
    throw std::invalid_argument("backward: upstream gradient shape mismatch");
  if (static_cast<int>(tape.z.size()) != hp.n_layers)
    throw std::invalid_argument("backward: tape does not match model");
  const size_t px = static_cast<size_t>(M) * N;
  const int C = hp.width;
  const size_t slots = static_cast<size_t>(w.me.kz_eff) * w.kr2;

  ModelGrads g = zero_grads(hp);

  // projection
  const std::vector<double>& vI = tape.v[hp.n_layers];
  for (int o = 0; o < hp.out_channels; ++o) {
    const double* dp = dpred.data();  // single output channel
    double sb = 0.0;
    for (size_t k = 0; k < px; ++k) sb += dp[k];
    g.proj_b[o] = sb;
    for (int c = 0; c < C; ++c) {
      const double* vc = vI.data() + c * px;
      double s = 0.0;
      for (size_t k = 0; k < px; ++k) s += dp[k] * vc[k];
      g.proj_w[static_cast<size_t>(o) * C + c] = s;
    }
  }
  // dv_I
  double* dv = w.dv.data();
  std::fill(dv, dv + C * px, 0.0);
  for (int c = 0; c < C; ++c) {
    double wv = p.proj_w[c];  // out_channels == 1
    const double* dp = dpred.data();
    double* d = dv + c * px;
    for (size_t k = 0; k < px; ++k) d[k] = wv * dp[k];
  }

  std::vector<cd> du(static_cast<size_t>(C) * slots);
  std::vector<cd> dv_spec(static_cast<size_t>(C) * slots);

  for (int i = hp.n_layers - 1; i >= 0; --i) {
    const std::vector<double>& zi = tape.z[i];
    const std::vector<double>& vi = tape.v[i];
    double* dz = w.dz.data();
    if (hp.activation == Activation::Identity) {
      std::memcpy(dz, dv, sizeof(double) * C * px);
    } else {
      for (size_t k = 0; k < static_cast<size_t>(C) * px; ++k)
        dz[k] = dv[k] * gelu_grad(zi[k]);
    }

    LayerParams& gl = g.layers[i];
    for (int c2 = 0; c2 < C; ++c2) {
      const double* d = dz + c2 * px;
      double sb = 0.0;
      for (size_t k = 0; k < px; ++k) sb += d[k];
      gl.b[c2] = sb;
      for (int c1 = 0; c1 < C; ++c1) {
        const double* vc = vi.data() + c1 * px;
        double s = 0.0;
        for (size_t k = 0; k < px; ++k) s += d[k] * vc[k];
        gl.W[static_cast<size_t>(c2) * C + c1] = s;
      }
    }

    // spectral adjoint
    for (int c2 = 0; c2 < C; ++c2)
      FnoKernels::adjoint_to_dU(w, dz + c2 * px, du.data() + c2 * slots);
    FnoKernels::contract_adjoint(w, p.layers[i].R.data(), C, hp.modes_z,
                                 tape.v_spec[i].data(), du.data(), dv_spec.data(),
                                 gl.R.data());

    // dv_i = W^T dz + spectral-path adjoint
    std::fill(dv, dv + C * px, 0.0);
    for (int c2 = 0; c2 < C; ++c2) {
      const double* d = dz + c2 * px;
      for (int c1 = 0; c1 < C; ++c1) {
        double wv = p.layers[i].W[static_cast<size_t>(c2) * C + c1];
        double* o = dv + c1 * px;
        for (size_t k = 0; k < px; ++k) o[k] += wv * d[k];
      }
    }
    for (int c1 = 0; c1 < C; ++c1)
      FnoKernels::adjoint_to_dv(w, dv_spec.data() + c1 * slots, dv + c1 * px);
  }

  // lift
  for (int c = 0; c < C; ++c) {
    const double* d = dv + c * px;
    double sb = 0.0;
    for (size_t k = 0; k < px; ++k) sb += d[k];
    g.lift_b[c] = sb;
    for (int ci = 0; ci < hp.in_channels; ++ci) {
      const double* a = tape.input.data() + ci * px;
      double s = 0.0;
      for (size_t k = 0; k < px; ++k) s += d[k] * a[k];
      g.lift_w[static_cast<size_t>(c) * hp.in_channels + ci] = s;
    }
  }
  return g;
}

std::vector<double> spectral_conv(std::span<const double> v, int C, int M, int N,
                                  std::span<const cd> R, int modes_z, int modes_r) {
  if (v.size() != static_cast<size_t>(C) * M * N)
    throw std::invalid_argument("spectral_conv: input size mismatch");
  if (R.size() != static_cast<size_t>(C) * C * modes_z * 2 * modes_r)
    throw std::invalid_argument("spectral_conv: weight size mismatch");
  Hyperparams hp;
  hp.width = C;
  hp.modes_z = modes_z;
  hp.modes_r = modes_r;
  FnoWorkspace ws(hp, M, N);
  std::vector<double> out(v.size());
  FnoKernels::spectral(FnoKernels::impl(ws), R.data(), C, modes_z, v.data(), out.data(), nullptr);
  return out;
}

std::vector<double> fourier_layer(std::span<const double> v, int C, int M, int N,
                                  std::span<const cd> R, int modes_z, int modes_r,
                                  std::span<const double> W, std::span<const double> b,
                                  Activation act) {
  if (W.size() != static_cast<size_t>(C) * C || b.size() != static_cast<size_t>(C))
    throw std::invalid_argument("fourier_layer: linear map size mismatch");
  std::vector<double> s = spectral_conv(v, C, M, N, R, modes_z, modes_r);
  std::vector<double> out(v.size());
  const size_t px = static_cast<size_t>(M) * N;
  apply_pointwise_linear(W.data(), b.data(), C, C, v.data(), s.data(), out.data(), px);
  activate(act, out.data(), out.data(), out.size());
  return out;
}

}  // namespace hfno
