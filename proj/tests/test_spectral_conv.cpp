#include "doctest.h"
#include "hfno/fno.hpp"
#include "hfno/rng.hpp"
#include "test_oracles.hpp"

using namespace hfno;
using namespace hfno_test;

TEST_SUITE_BEGIN("spectral-conv");

namespace {

std::vector<cd> random_weights(int C, int modes_z, int modes_r, uint64_t seed) {
  Rng rng(seed);
  std::vector<cd> R(static_cast<size_t>(C) * C * modes_z * 2 * modes_r);
  for (auto& w : R) w = cd{rng.normal(), rng.normal()};
  return R;
}

std::vector<cd> identity_weights(int C, int modes_z, int modes_r) {
  std::vector<cd> R(static_cast<size_t>(C) * C * modes_z * 2 * modes_r, cd{});
  const int kr2 = 2 * modes_r;
  for (int c = 0; c < C; ++c)
    for (int kz = 0; kz < modes_z; ++kz)
      for (int s = 0; s < kr2; ++s)
        R[((static_cast<size_t>(c) * C + c) * modes_z + kz) * kr2 + s] = cd{1.0, 0.0};
  return R;
}

}  // namespace

TEST_CASE("identity filter passes band-limited input through") {
  const int C = 2, M = 12, N = 16, mz = 3, mr = 3;
  const double pi = 3.141592653589793238462643383279;
  std::vector<double> v(static_cast<size_t>(C) * M * N);
  // content strictly inside the retained modes
  for (int c = 0; c < C; ++c)
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < N; ++j)
        v[(static_cast<size_t>(c) * M + i) * N + j] =
            0.7 * std::cos(2.0 * pi * (2.0 * i / M + 1.0 * j / N) + 0.3 * c) +
            0.2 * std::sin(2.0 * pi * (1.0 * i / M - 2.0 * j / N));

  auto out = spectral_conv(v, C, M, N, identity_weights(C, mz, mr), mz, mr);
  for (size_t k = 0; k < v.size(); ++k) CHECK(out[k] == doctest::Approx(v[k]).epsilon(1e-10));
}

TEST_CASE("modes outside the retained set are annihilated") {
  const int C = 1, M = 16, N = 16, mz = 2, mr = 2;
  const double pi = 3.141592653589793238462643383279;
  std::vector<double> v(static_cast<size_t>(M) * N);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < N; ++j)
      v[static_cast<size_t>(i) * N + j] = std::cos(2.0 * pi * (5.0 * i / M + 6.0 * j / N));

  auto out = spectral_conv(v, C, M, N, identity_weights(C, mz, mr), mz, mr);
  for (double x : out) CHECK(std::abs(x) < 1e-10);
}

TEST_CASE("matches the dense DFT-matrix oracle") {
  for (auto [C, M, N, mz, mr] :
       {std::tuple{1, 4, 4, 2, 2}, std::tuple{2, 8, 8, 3, 2}, std::tuple{2, 7, 8, 2, 3},
        std::tuple{2, 8, 7, 4, 4}, std::tuple{1, 5, 6, 3, 3}}) {
    Rng rng(static_cast<uint64_t>(C * 1000 + M * 100 + N * 10 + mz));
    std::vector<double> v(static_cast<size_t>(C) * M * N);
    for (auto& x : v) x = rng.normal();
    auto R = random_weights(C, mz, mr, 99);

    auto fast = spectral_conv(v, C, M, N, R, mz, mr);
    auto dense = spectral_conv_dense(v, C, M, N, R, mz, mr);
    for (size_t k = 0; k < v.size(); ++k) CHECK(fast[k] == doctest::Approx(dense[k]).epsilon(1e-12));
  }
}

TEST_CASE("spectral map adjoint identity") {
  // <A x, y> == <x, A^T y> with A^T realized by the backward pass through a
  // one-layer model with identity activation and zero pointwise path.
  const int C = 2, M = 8, N = 8, mz = 3, mr = 2;
  Hyperparams hp;
  hp.n_layers = 1;
  hp.width = C;
  hp.modes_z = mz;
  hp.modes_r = mr;
  hp.in_channels = C;
  hp.out_channels = 1;
  hp.activation = Activation::Identity;

  auto R = random_weights(C, mz, mr, 1234);
  Rng rng(77);
  const size_t n = static_cast<size_t>(C) * M * N;
  std::vector<double> x(n), y(n);
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = rng.normal();

  auto ax = spectral_conv(x, C, M, N, R, mz, mr);
  double lhs = 0.0;
  for (size_t k = 0; k < n; ++k) lhs += ax[k] * y[k];

  // A^T y via the conjugate-weight map: adjoint of (R .* V) uses conj(R),
  // realized by running the same kernel with conjugated, channel-transposed
  // weights (the DFT legs are mutually adjoint by construction).
  std::vector<cd> Rt(R.size());
  const int kr2 = 2 * mr;
  for (int c1 = 0; c1 < C; ++c1)
    for (int c2 = 0; c2 < C; ++c2)
      for (int kz = 0; kz < mz; ++kz)
        for (int s = 0; s < kr2; ++s)
          Rt[((static_cast<size_t>(c2) * C + c1) * mz + kz) * kr2 + s] =
              std::conj(R[((static_cast<size_t>(c1) * C + c2) * mz + kz) * kr2 + s]);
  auto aty = spectral_conv(y, C, M, N, Rt, mz, mr);
  double rhs = 0.0;
  for (size_t k = 0; k < n; ++k) rhs += aty[k] * x[k];

  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("inverse transform leaves no imaginary residue") {
  // The library path enforces conjugate symmetry before inverting; verify
  // through the dense route that the projected spectrum inverts to a real
  // field and the fast path reproduces it.
  const int C = 1, M = 6, N = 6, mz = 4, mr = 3;
  Rng rng(5);
  std::vector<double> v(static_cast<size_t>(M) * N);
  for (auto& x : v) x = rng.normal();
  auto R = random_weights(C, mz, mr, 31);
  auto fast = spectral_conv(v, C, M, N, R, mz, mr);
  auto dense = spectral_conv_dense(v, C, M, N, R, mz, mr);
  for (size_t k = 0; k < v.size(); ++k) CHECK(fast[k] == doctest::Approx(dense[k]).epsilon(1e-12));
}

TEST_SUITE_END();
