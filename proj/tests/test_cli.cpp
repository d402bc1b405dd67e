#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hfno/io.hpp"

using namespace hfno;

TEST_SUITE_BEGIN("cli");

namespace {

namespace fs = std::filesystem;

std::string cli() { return HFNO_CLI_PATH; }

int run(const std::string& args) {
  std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TmpDir {
  fs::path dir;
  TmpDir() {
    dir = fs::temp_directory_path() / ("hfno_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~TmpDir() { fs::remove_all(dir); }
  std::string p(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("gen-data smoke, determinism, and usage errors") {
  TmpDir t;
  std::string flags =
      "gen-data --n 4 --grid 24x16 --range-km 2 --depth-km 0.3 --freq-hz 200 "
      "--source-depth-m 50 --seed 1 --out ";
  CHECK(run(flags + t.p("a.hfnd")) == 0);
  Dataset ds = load_dataset(t.p("a.hfnd"));
  CHECK(ds.samples.size() == 4);
  CHECK(ds.grid.n_range == 24);

  CHECK(run(flags + t.p("b.hfnd")) == 0);
  CHECK(slurp(t.p("a.hfnd")) == slurp(t.p("b.hfnd")));

  // missing --out is a usage error
  CHECK(run("gen-data --n 2 --grid 8x8") == 1);
  CHECK(run("bogus-subcommand") == 1);
}

TEST_CASE("train, finetune, infer, eval pipeline") {
  TmpDir t;
  REQUIRE(run("gen-data --n 6 --grid 16x12 --range-km 1.5 --depth-km 0.24 --freq-hz 200 "
              "--source-depth-m 40 --seed 3 --out " +
              t.p("d.hfnd")) == 0);

  // tiny training run writes checkpoint + csv report
  REQUIRE(run("train --data " + t.p("d.hfnd") + " --out " + t.p("m.hfno") +
              " --epochs 3 --layers 2 --width 4 --modes-z 3 --modes-r 3 --seed 5") == 0);
  CHECK(fs::exists(t.p("m.hfno")));
  {
    std::ifstream csv(t.p("m.hfno") + ".csv");
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 1 + 3);  // header + one row per epoch
  }

  // finetune with zero epochs keeps tensors identical
  REQUIRE(run("finetune --data " + t.p("d.hfnd") + " --init " + t.p("m.hfno") + " --out " +
              t.p("m0.hfno") + " --epochs 0") == 0);
  ModelParams a = load_checkpoint(t.p("m.hfno"));
  ModelParams b = load_checkpoint(t.p("m0.hfno"));
  CHECK(a.lift_w == b.lift_w);
  CHECK(a.layers[0].R == b.layers[0].R);
  CHECK(a.proj_w == b.proj_w);

  // inference at base resolution and 2x zero-shot, plus PGM dumps
  REQUIRE(run("infer --ckpt " + t.p("m.hfno") + " --data " + t.p("d.hfnd") + " --out " +
              t.p("p.hfnd") + " --pgm-dir " + t.p("pgm")) == 0);
  Dataset pred = load_dataset(t.p("p.hfnd"));
  CHECK(pred.samples.size() == 6);
  CHECK(fs::exists(t.p("pgm") + "/pred_0000.pgm"));
  {
    std::ifstream pgm(t.p("pgm") + "/pred_0000.pgm");
    std::string magic;
    pgm >> magic;
    CHECK(magic == "P2");
  }

  REQUIRE(run("infer --ckpt " + t.p("m.hfno") + " --data " + t.p("d.hfnd") + " --out " +
              t.p("p2.hfnd") + " --upsample 2") == 0);
  Dataset pred2 = load_dataset(t.p("p2.hfnd"));
  CHECK(pred2.grid.n_range == 32);
  CHECK(pred2.grid.n_depth == 24);

  // eval against own targets: finite metrics, ssim <= 1
  REQUIRE(run("eval --ckpt " + t.p("m.hfno") + " --data " + t.p("d.hfnd") + " --json " +
              t.p("m.json")) == 0);
  std::string js = slurp(t.p("m.json"));
  CHECK(js.find("\"aggregate\"") != std::string::npos);
  CHECK(js.find("\"rmse\"") != std::string::npos);

  // pred == target fixture: rmse 0, ssim 1
  REQUIRE(run("eval --pred " + t.p("d.hfnd") + " --data " + t.p("d.hfnd") + " --json " +
              t.p("self.json")) == 0);
  std::string self_js = slurp(t.p("self.json"));
  CHECK(self_js.find("\"rmse\": 0.0") != std::string::npos);
  CHECK(self_js.find("\"ssim\": 1.0") != std::string::npos);

  // unreadable dataset is a data error
  CHECK(run("train --data " + t.p("missing.hfnd") + " --out " + t.p("x.hfno") +
            " --epochs 1") == 2);
  // eval needs exactly one source
  CHECK(run("eval --data " + t.p("d.hfnd")) == 1);
}

TEST_SUITE_END();
