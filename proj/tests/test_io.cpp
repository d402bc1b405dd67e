#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hfno/io.hpp"
#include "hfno/metrics.hpp"
#include "hfno/pe_solver.hpp"
#include "hfno/rng.hpp"

using namespace hfno;

TEST_SUITE_BEGIN("persist");

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Dataset make_dataset(int n, bool with_enc) {
  SynthConfig cfg;
  cfg.seed = 99;
  cfg.n_samples = n;
  cfg.grid = build_grid(16, 12, 1500.0, 240.0);
  cfg.source_depth = 40.0;
  Dataset ds;
  ds.grid = cfg.grid;
  ds.gen = cfg;
  PEConfig pe;
  pe.starter_width_factor = 8.0;
  for (int i = 0; i < n; ++i) {
    DatasetSample s;
    s.scn = synth_environment(cfg, i);
    s.tl = envelope_to_tl(solve_pe(s.scn, pe), s.scn.k0(), pe.starter_width_factor);
    if (with_enc) s.enc = assemble_input(s.scn);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace

TEST_CASE("checkpoint roundtrip is bit-exact") {
  Hyperparams hp;
  hp.n_layers = 3;
  hp.width = 6;
  hp.modes_z = 5;
  hp.modes_r = 4;
  ModelParams p = init_params(hp, 12345);
  p.stats.mu_in = {1.0, 2.0, 3.0, 4.0};
  p.stats.sigma_in = {0.5, 1.5, 2.5, 3.5};
  p.stats.mu_out = 60.0;
  p.stats.sigma_out = 15.0;

  std::string path = tmp_path("hfno_ckpt_roundtrip.bin");
  save_checkpoint(p, path);
  ModelParams q = load_checkpoint(path);

  CHECK(q.hp.n_layers == hp.n_layers);
  CHECK(q.hp.width == hp.width);
  CHECK(q.lift_w == p.lift_w);
  CHECK(q.lift_b == p.lift_b);
  for (int i = 0; i < hp.n_layers; ++i) {
    CHECK(q.layers[i].R == p.layers[i].R);
    CHECK(q.layers[i].W == p.layers[i].W);
    CHECK(q.layers[i].b == p.layers[i].b);
  }
  CHECK(q.proj_w == p.proj_w);
  CHECK(q.proj_b == p.proj_b);
  CHECK(q.stats.mu_out == p.stats.mu_out);
  CHECK(q.stats.sigma_in == p.stats.sigma_in);

  // saving the loaded model reproduces the file byte for byte
  std::string path2 = tmp_path("hfno_ckpt_roundtrip2.bin");
  save_checkpoint(q, path2);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("corrupt magic yields a typed error") {
  Hyperparams hp;
  hp.n_layers = 1;
  hp.width = 2;
  hp.modes_z = 2;
  hp.modes_r = 2;
  std::string path = tmp_path("hfno_ckpt_magic.bin");
  save_checkpoint(init_params(hp, 1), path);
  std::string bytes = slurp(path);
  bytes[0] = 'X';
  std::ofstream(path, std::ios::binary).write(bytes.data(), bytes.size());
  try {
    load_checkpoint(path);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.kind() == IoError::Kind::BadMagic);
  }
}

TEST_CASE("version mismatch rejected with explicit message") {
  Hyperparams hp;
  hp.n_layers = 1;
  hp.width = 2;
  hp.modes_z = 2;
  hp.modes_r = 2;
  std::string path = tmp_path("hfno_ckpt_ver.bin");
  save_checkpoint(init_params(hp, 1), path);
  std::string bytes = slurp(path);
  bytes[4] = 99;
  std::ofstream(path, std::ios::binary).write(bytes.data(), bytes.size());
  try {
    load_checkpoint(path);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.kind() == IoError::Kind::BadVersion);
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }
}

TEST_CASE("dtype is preserved through the manifest") {
  Hyperparams hp;
  hp.n_layers = 1;
  hp.width = 2;
  hp.modes_z = 2;
  hp.modes_r = 2;
  std::string path = tmp_path("hfno_ckpt_dtype.bin");
  save_checkpoint(init_params(hp, 7), path);
  std::string bytes = slurp(path);
  CHECK(bytes.find("\"dtype\":\"f64\"") != std::string::npos);
  CHECK(bytes.find("\"dtype\":\"c128\"") != std::string::npos);
  CHECK(bytes.find("\"f32\"") == std::string::npos);
}

TEST_CASE("dataset roundtrip with and without encodings") {
  for (bool enc : {false, true}) {
    Dataset ds = make_dataset(3, enc);
    std::string path = tmp_path("hfno_ds_roundtrip.bin");
    save_dataset(ds, path);
    Dataset got = load_dataset(path);
    CHECK(got.samples.size() == 3);
    CHECK(got.grid == ds.grid);
    REQUIRE(got.gen.has_value());
    CHECK(got.gen->seed == 99);
    for (int i = 0; i < 3; ++i) {
      CHECK(got.samples[i].scn.ssf.c.a == ds.samples[i].scn.ssf.c.a);
      CHECK(got.samples[i].scn.ssf.bathy == ds.samples[i].scn.ssf.bathy);
      CHECK(got.samples[i].tl.tl.a == ds.samples[i].tl.tl.a);
      CHECK(got.samples[i].scn.source_freq == ds.samples[i].scn.source_freq);
      CHECK(got.samples[i].enc.has_value() == enc);
      if (enc)
        for (int c = 0; c < 4; ++c)
          CHECK(got.samples[i].enc->ch[c].a == ds.samples[i].enc->ch[c].a);
    }
    // downstream metrics agree after a reload
    CHECK(rmse(got.samples[0].tl.tl, ds.samples[0].tl.tl) == 0.0);

    std::string path2 = tmp_path("hfno_ds_roundtrip2.bin");
    save_dataset(got, path2);
    CHECK(slurp(path) == slurp(path2));
  }
}

TEST_CASE("sample count mismatch is detected") {
  Dataset ds = make_dataset(2, false);
  std::string path = tmp_path("hfno_ds_count.bin");
  save_dataset(ds, path);
  std::string bytes = slurp(path);
  // bump the declared count without adding records
  size_t pos = bytes.rfind("\"n_samples\":2");
  REQUIRE(pos != std::string::npos);
  bytes.replace(pos, 13, "\"n_samples\":3");
  // header length unchanged (same byte count), so only the count disagrees
  std::ofstream(path, std::ios::binary).write(bytes.data(), bytes.size());
  try {
    load_dataset(path);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.kind() == IoError::Kind::CountMismatch);
  }
}

TEST_CASE("random truncation fuzz never crashes") {
  Hyperparams hp;
  hp.n_layers = 2;
  hp.width = 4;
  hp.modes_z = 3;
  hp.modes_r = 3;
  std::string cpath = tmp_path("hfno_fuzz_ckpt.bin");
  save_checkpoint(init_params(hp, 3), cpath);
  std::string cbytes = slurp(cpath);

  Dataset ds = make_dataset(2, false);
  std::string dpath = tmp_path("hfno_fuzz_ds.bin");
  save_dataset(ds, dpath);
  std::string dbytes = slurp(dpath);

  Rng rng(2024);
  int errors = 0;
  for (int trial = 0; trial < 300; ++trial) {
    bool ckpt = trial % 2 == 0;
    const std::string& src = ckpt ? cbytes : dbytes;
    size_t cut = rng.below(src.size());
    std::string path = tmp_path("hfno_fuzz_cut.bin");
    std::ofstream(path, std::ios::binary).write(src.data(), cut);
    try {
      if (ckpt)
        load_checkpoint(path);
      else
        load_dataset(path);
      FAIL("truncated file loaded successfully at cut ", cut);
    } catch (const IoError&) {
      ++errors;
    }
  }
  CHECK(errors == 300);
}

TEST_SUITE_END();
