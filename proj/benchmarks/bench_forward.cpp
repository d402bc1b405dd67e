#include <benchmark/benchmark.h>

#include "hfno/fno.hpp"
#include "hfno/rng.hpp"

using namespace hfno;

namespace {

EncodedInput random_input(int M, int N, uint64_t seed) {
  EncodedInput e;
  e.grid.n_depth = M;
  e.grid.n_range = N;
  e.grid.dr = 50.0;
  e.grid.dz = 10.0;
  e.grid.r0 = 50.0;
  Rng rng(seed);
  for (int c = 0; c < 4; ++c) {
    e.ch[c] = Mat(M, N);
    for (auto& v : e.ch[c].a) v = rng.normal();
  }
  return e;
}

void bench_forward(benchmark::State& state, int layers, int width, int modes) {
  Hyperparams hp;
  hp.n_layers = layers;
  hp.width = width;
  hp.modes_z = modes;
  hp.modes_r = modes;
  ModelParams p = init_params(hp, 7);
  const int M = 150, N = 200;
  EncodedInput in = random_input(M, N, 3);
  FnoWorkspace ws(hp, M, N);
  for (auto _ : state) {
    Mat out = forward(p, in, ws);
    benchmark::DoNotOptimize(out.a.data());
  }
}

}  // namespace

static void Forward200x150_W8(benchmark::State& s) { bench_forward(s, 4, 8, 12); }
static void Forward200x150_W16(benchmark::State& s) { bench_forward(s, 4, 16, 12); }
static void Forward200x150_W32(benchmark::State& s) { bench_forward(s, 4, 32, 16); }
BENCHMARK(Forward200x150_W8)->Unit(benchmark::kMillisecond);
BENCHMARK(Forward200x150_W16)->Unit(benchmark::kMillisecond);
BENCHMARK(Forward200x150_W32)->Unit(benchmark::kMillisecond);
