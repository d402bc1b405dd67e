#include "doctest.h"
#include "hfno/fno.hpp"
#include "hfno/rng.hpp"
#include "test_oracles.hpp"

using namespace hfno;
using namespace hfno_test;

TEST_SUITE_BEGIN("fno-core");

namespace {

EncodedInput random_input(const Grid2D& g, uint64_t seed) {
  EncodedInput e;
  e.grid = g;
  Rng rng(seed);
  for (int c = 0; c < 4; ++c) {
    e.ch[c] = Mat(g.n_depth, g.n_range);
    for (auto& v : e.ch[c].a) v = rng.normal();
  }
  return e;
}

}  // namespace

TEST_CASE("gelu exact form") {
  CHECK(gelu(0.0) == 0.0);
  CHECK(gelu(10.0) == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(gelu(-10.0) == doctest::Approx(0.0).epsilon(1e-6));
  // derivative vs central differences
  for (double x : {-2.0, -0.5, 0.3, 4.0}) {
    double eps = 1e-6;
    double fd = (gelu(x + eps) - gelu(x - eps)) / (2.0 * eps);
    CHECK(gelu_grad(x) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("fourier_layer degenerate configurations") {
  const int C = 3, M = 6, N = 8, mz = 2, mr = 2;
  Rng rng(8);
  std::vector<double> v(static_cast<size_t>(C) * M * N);
  for (auto& x : v) x = rng.normal();
  std::vector<cd> R0(static_cast<size_t>(C) * C * mz * 2 * mr, cd{});
  std::vector<double> Wid(static_cast<size_t>(C) * C, 0.0), W0 = Wid;
  for (int c = 0; c < C; ++c) Wid[static_cast<size_t>(c) * C + c] = 1.0;
  std::vector<double> b0(C, 0.0);

  // R = 0, W = I, b = 0 -> gelu(v)
  auto out = fourier_layer(v, C, M, N, R0, mz, mr, Wid, b0);
  for (size_t k = 0; k < v.size(); ++k) CHECK(out[k] == doctest::Approx(gelu(v[k])).epsilon(1e-14));

  // everything zero -> gelu(0) = 0
  auto zero = fourier_layer(v, C, M, N, R0, mz, mr, W0, b0);
  for (double x : zero) CHECK(x == 0.0);
}

TEST_CASE("fourier_layer matches the straight-line oracle") {
  const int C = 3, M = 8, N = 6, mz = 3, mr = 2;
  Rng rng(21);
  std::vector<double> v(static_cast<size_t>(C) * M * N);
  for (auto& x : v) x = rng.normal();
  std::vector<cd> R(static_cast<size_t>(C) * C * mz * 2 * mr);
  for (auto& w : R) w = cd{rng.normal(), rng.normal()};
  std::vector<double> W(static_cast<size_t>(C) * C), b(C);
  for (auto& x : W) x = rng.normal();
  for (auto& x : b) x = rng.normal();

  auto got = fourier_layer(v, C, M, N, R, mz, mr, W, b);
  auto s = spectral_conv_dense(v, C, M, N, R, mz, mr);
  const size_t px = static_cast<size_t>(M) * N;
  for (int c2 = 0; c2 < C; ++c2)
    for (size_t k = 0; k < px; ++k) {
      double acc = b[c2] + s[c2 * px + k];
      for (int c1 = 0; c1 < C; ++c1) acc += W[static_cast<size_t>(c2) * C + c1] * v[c1 * px + k];
      CHECK(got[c2 * px + k] == doctest::Approx(gelu_ref(acc)).epsilon(1e-12));
    }
}

TEST_CASE("forward matches duplicate implementation on a tiny model") {
  Hyperparams hp;
  hp.n_layers = 2;
  hp.width = 4;
  hp.modes_z = 4;
  hp.modes_r = 4;
  ModelParams p = init_params(hp, 17);
  Grid2D g = build_grid(16, 12, 1600.0, 240.0);
  EncodedInput a = random_input(g, 3);

  FnoWorkspace ws(hp, g.n_depth, g.n_range);
  Mat fast = forward(p, a, ws);
  Mat dense = forward_dense(p, a);
  for (size_t k = 0; k < fast.a.size(); ++k)
    CHECK(fast.a[k] == doctest::Approx(dense.a[k]).epsilon(1e-12));
}

TEST_CASE("same parameters process different resolutions") {
  Hyperparams hp;
  hp.n_layers = 2;
  hp.width = 6;
  hp.modes_z = 6;
  hp.modes_r = 6;
  ModelParams p = init_params(hp, 5);

  Grid2D g1 = build_grid(20, 15, 2000.0, 300.0);
  Grid2D g2 = build_grid(30, 20, 2000.0, 300.0);
  FnoWorkspace ws1(hp, g1.n_depth, g1.n_range), ws2(hp, g2.n_depth, g2.n_range);
  Mat o1 = forward(p, random_input(g1, 1), ws1);
  Mat o2 = forward(p, random_input(g2, 1), ws2);
  CHECK(o1.rows == 15);
  CHECK(o1.cols == 20);
  CHECK(o2.rows == 20);
  CHECK(o2.cols == 30);
}

TEST_CASE("all-zero weights propagate only biases") {
  Hyperparams hp;
  hp.n_layers = 2;
  hp.width = 3;
  hp.modes_z = 2;
  hp.modes_r = 2;
  ModelParams p = init_params(hp, 1);
  for (auto view : param_views(p)) std::fill(view.begin(), view.end(), 0.0);
  p.proj_b[0] = 0.75;
  Grid2D g = build_grid(8, 6, 800.0, 120.0);
  FnoWorkspace ws(hp, g.n_depth, g.n_range);
  Mat out = forward(p, random_input(g, 2), ws);
  for (double v : out.a) CHECK(v == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("init_params determinism and statistics") {
  Hyperparams hp;
  hp.n_layers = 2;
  hp.width = 8;
  hp.modes_z = 12;
  hp.modes_r = 10;
  ModelParams a = init_params(hp, 42);
  ModelParams b = init_params(hp, 42);
  CHECK(a.lift_w == b.lift_w);
  CHECK(a.layers[1].R == b.layers[1].R);
  ModelParams c = init_params(hp, 43);
  CHECK(a.layers[0].R != c.layers[0].R);

  // mean modulus of R entries ~ scale/2
  double scale = 1.0 / (8.0 * 8.0);
  double acc = 0.0;
  size_t n = 0;
  for (const auto& l : a.layers)
    for (const auto& w : l.R) {
      acc += std::abs(w);
      ++n;
    }
  CHECK(acc / n == doctest::Approx(scale / 2.0).epsilon(0.05));
}

TEST_CASE("parameter count closed form, independent of grid") {
  Hyperparams hp;  // defaults: I=4, C=64, modes 64, in 4, out 1
  size_t C = 64, I = 4, kz = 64, kr2 = 128;
  size_t expect = C * 4 + C + I * (2 * C * C * kz * kr2 + C * C + C) + C + 1;
  CHECK(param_count(hp) == expect);

  Hyperparams tiny;
  tiny.n_layers = 2;
  tiny.width = 4;
  tiny.modes_z = 4;
  tiny.modes_r = 4;
  ModelParams p = init_params(tiny, 0);
  size_t total = 0;
  for (auto v : param_views(p)) total += v.size();
  CHECK(total == param_count(tiny));
}

TEST_CASE("discretization invariance on band-limited input") {
  // band-limited periodic content below the retained modes, sampled at two
  // nested resolutions; predictions must agree after exact downsampling
  Hyperparams hp;
  hp.n_layers = 2;
  hp.width = 6;
  hp.modes_z = 4;
  hp.modes_r = 4;
  ModelParams p = init_params(hp, 23);

  const int Mf = 24, Nf = 32, Mc = 12, Nc = 16;
  const double pi = 3.141592653589793238462643383279;
  auto sample = [&](int M, int N) {
    Grid2D g;
    g.n_depth = M;
    g.n_range = N;
    g.dr = 10.0;
    g.dz = 5.0;
    g.r0 = 10.0;
    EncodedInput e;
    e.grid = g;
    Rng rng(9);
    for (int c = 0; c < 4; ++c) {
      e.ch[c] = Mat(M, N);
      double a1 = rng.normal(), a2 = rng.normal(), ph = rng.uniform(0.0, 2.0 * pi);
      for (int i = 0; i < M; ++i)
        for (int j = 0; j < N; ++j)
          e.ch[c](i, j) = a1 * std::cos(2.0 * pi * (2.0 * i / M + 1.0 * j / N) + ph) +
                          a2 * std::sin(2.0 * pi * (1.0 * i / M - 3.0 * j / N));
    }
    return e;
  };

  FnoWorkspace wf(hp, Mf, Nf), wc(hp, Mc, Nc);
  Mat fine = forward(p, sample(Mf, Nf), wf);
  Mat coarse = forward(p, sample(Mc, Nc), wc);

  double num = 0.0, den = 0.0;
  for (int i = 0; i < Mc; ++i)
    for (int j = 0; j < Nc; ++j) {
      double d = fine(2 * i, 2 * j) - coarse(i, j);
      num += d * d;
      den += coarse(i, j) * coarse(i, j);
    }
  CHECK(std::sqrt(num / den) < 1e-3);
}

TEST_SUITE_END();
