#include <benchmark/benchmark.h>

#include "hfno/pe_solver.hpp"

using namespace hfno;

static void PeSolve200x150(benchmark::State& state) {
  SynthConfig cfg;
  cfg.seed = 1;
  cfg.n_samples = 1;
  cfg.grid = build_grid(200, 150, 10000.0, 1500.0);
  Scenario scn = synth_environment(cfg, 0);
  PEConfig pe;
  pe.starter_width_factor = scn.k0() * cfg.grid.dz;
  for (auto _ : state) {
    EnvelopeField env = solve_pe(scn, pe);
    TLField tl = envelope_to_tl(env, scn.k0(), pe.starter_width_factor);
    benchmark::DoNotOptimize(tl.tl.a.data());
  }
}
BENCHMARK(PeSolve200x150)->Unit(benchmark::kMillisecond);

static void PeSolve128x64(benchmark::State& state) {
  SynthConfig cfg;
  cfg.seed = 2;
  cfg.n_samples = 1;
  cfg.grid = build_grid(128, 64, 5000.0, 640.0);
  Scenario scn = synth_environment(cfg, 0);
  PEConfig pe;
  pe.starter_width_factor = scn.k0() * cfg.grid.dz;
  for (auto _ : state) {
    EnvelopeField env = solve_pe(scn, pe);
    benchmark::DoNotOptimize(env.psi.a.data());
  }
}
BENCHMARK(PeSolve128x64)->Unit(benchmark::kMillisecond);
