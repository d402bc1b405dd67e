// Batch front end: data generation, training, fine-tuning, inference,
// evaluation. Exit codes: 0 success, 1 usage, 2 data error, 3 numeric.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "hfno/io.hpp"
#include "hfno/metrics.hpp"
#include "hfno/optimize.hpp"
#include "hfno/raster.hpp"
#include "hfno/rng.hpp"
#include "json.hpp"

using namespace hfno;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

bool parse_grid(const std::string& s, int& n_range, int& n_depth) {
  auto x = s.find('x');
  if (x == std::string::npos) return false;
  try {
    n_range = std::stoi(s.substr(0, x));
    n_depth = std::stoi(s.substr(x + 1));
  } catch (...) {
    return false;
  }
  return n_range >= 2 && n_depth >= 2;
}

void info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cout << msg << "\n" << std::flush;
}

// gen-data shares this with the acceptance tooling: starter width 0 selects
// a grid-aware width so the source stays resolved on coarse depth meshes.
double auto_starter_width(double k0, double dz) { return std::max(1.0, k0 * dz); }

struct GenArgs {
  int n = 1;
  std::string grid = "64x48";
  double range_km = 5.0;
  double depth_km = 0.64;
  double freq_hz = 200.0;
  double source_depth_m = 50.0;
  double c_ref = 1500.0;
  double v_sed = 1700.0;
  double perturb = 5.0;
  std::string profile = "munk-perturbed";
  std::string bathy = "smooth-random";
  uint64_t seed = 0;
  double starter_width = 0.0;  // 0 = auto
  double sponge = 0.5;
  double ext_factor = 0.5;
  int threads = 1;
  std::string out;
  bool store_enc = false;
};

int run_gen_data(const GenArgs& a) {
  int n_range = 0, n_depth = 0;
  if (!parse_grid(a.grid, n_range, n_depth)) {
    std::cerr << "error: --grid expects RANGExDEPTH, e.g. 64x48\n";
    return kExitUsage;
  }
  SynthConfig cfg;
  cfg.seed = a.seed;
  cfg.n_samples = a.n;
  cfg.grid = build_grid(n_range, n_depth, a.range_km * 1000.0, a.depth_km * 1000.0);
  if (!profile_from_string(a.profile, cfg.profile_family)) {
    std::cerr << "error: unknown profile family '" << a.profile << "'\n";
    return kExitUsage;
  }
  if (!bathy_from_string(a.bathy, cfg.bathy_family)) {
    std::cerr << "error: unknown bathymetry family '" << a.bathy << "'\n";
    return kExitUsage;
  }
  cfg.perturbation_scale = a.perturb;
  cfg.source_depth = a.source_depth_m;
  cfg.source_freq = a.freq_hz;
  cfg.c_ref = a.c_ref;
  cfg.v_sed = a.v_sed;

  PEConfig pe;
  pe.depth_extension_factor = a.ext_factor;
  pe.sponge_strength = a.sponge;
  double k0 = 2.0 * 3.141592653589793238462643383279 * a.freq_hz / a.c_ref;
  pe.starter_width_factor =
      a.starter_width > 0.0 ? a.starter_width : auto_starter_width(k0, cfg.grid.dz);

  Dataset ds;
  ds.grid = cfg.grid;
  ds.gen = cfg;
  ds.samples.resize(a.n);

  auto make_one = [&](int i) {
    DatasetSample s;
    s.scn = synth_environment(cfg, i);
    s.tl = envelope_to_tl(solve_pe(s.scn, pe), s.scn.k0(), pe.starter_width_factor);
    if (a.store_enc) s.enc = assemble_input(s.scn);
    ds.samples[i] = std::move(s);
  };
  if (a.threads <= 1) {
    for (int i = 0; i < a.n; ++i) {
      make_one(i);
      info("sample " + std::to_string(i + 1) + "/" + std::to_string(a.n));
    }
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < a.threads; ++t)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < a.n; i = next.fetch_add(1)) make_one(i);
      });
    for (auto& th : pool) th.join();
    info("generated " + std::to_string(a.n) + " samples");
  }
  save_dataset(ds, a.out);
  info("wrote " + a.out);
  return kExitOk;
}

std::vector<TrainSample> to_train_samples(const Dataset& ds, EncodingVariant variant) {
  std::vector<TrainSample> out;
  out.reserve(ds.samples.size());
  for (const auto& s : ds.samples) {
    TrainSample t;
    t.input = assemble_input(s.scn, variant);
    t.target = s.tl;
    out.push_back(std::move(t));
  }
  return out;
}

// deterministic train/val split: shuffle indices with the seed, last
// fraction becomes validation
void split_set(const std::vector<TrainSample>& all, double val_frac, uint64_t seed,
               std::vector<TrainSample>& tr, std::vector<TrainSample>& va) {
  const int n = static_cast<int>(all.size());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  Rng rng = Rng::stream(seed, 0xDA7A);
  for (int i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.below(i + 1)]);
  int n_val = std::clamp(static_cast<int>(std::lround(val_frac * n)), 0, n - 1);
  for (int i = 0; i < n; ++i)
    (i < n - n_val ? tr : va).push_back(all[idx[i]]);
}

struct TrainArgs {
  std::string data, out, init, report;
  int epochs = -1;
  double val_frac = 0.1;
  int layers = 4, width = 16, modes_z = 12, modes_r = 12;
  double lr = 1e-3, wd = 1e-4;
  int batch = 8, sobolev_k = 1;
  uint64_t seed = 0;
  std::string encodings = "bty+hf";
  int threads = 1;
};

int run_train(const TrainArgs& a, bool is_finetune) {
  EncodingVariant variant;
  if (!variant_from_string(a.encodings, variant)) {
    std::cerr << "error: unknown encodings variant '" << a.encodings << "'\n";
    return kExitUsage;
  }
  Dataset ds = load_dataset(a.data);
  if (ds.samples.empty()) {
    std::cerr << "error: dataset has no samples\n";
    return kExitData;
  }

  TrainConfig cfg;
  cfg.epochs = a.epochs >= 0 ? a.epochs : (is_finetune ? 100 : 1000);
  cfg.batch_size = a.batch;
  cfg.lr = a.lr;
  cfg.weight_decay = a.wd;
  cfg.sobolev_order = a.sobolev_k;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.progress = log_level() >= LogLevel::Info ? &std::cout : nullptr;

  ModelParams model;
  TrainReport report;
  if (is_finetune) {
    ModelParams pre = load_checkpoint(a.init);
    variant = pre.encoding;  // the input contract travels with the model
    auto all = to_train_samples(ds, variant);
    std::vector<TrainSample> tr, va;
    split_set(all, a.val_frac, a.seed, tr, va);
    model = finetune(pre, cfg, tr, va, &report);
  } else {
    auto all = to_train_samples(ds, variant);
    std::vector<TrainSample> tr, va;
    split_set(all, a.val_frac, a.seed, tr, va);
    Hyperparams hp;
    hp.n_layers = a.layers;
    hp.width = a.width;
    hp.modes_z = a.modes_z;
    hp.modes_r = a.modes_r;
    auto [m, r] = train(hp, cfg, tr, va);
    model = std::move(m);
    report = std::move(r);
    model.encoding = variant;
  }
  save_checkpoint(model, a.out);
  std::string report_path = a.report.empty() ? a.out + ".csv" : a.report;
  report_to_csv(report, report_path);
  info("wrote " + a.out + " and " + report_path);
  return kExitOk;
}

struct InferArgs {
  std::string ckpt, data, out, pgm_dir;
  int upsample = 1;
};

// Rebuild the scenario at a finer grid. Synthetic scenarios regenerate from
// the stored config (sampling the same continuous environment); measured
// ones fall back to bicubic interpolation of the stored fields.
Scenario refine_scenario(const Dataset& ds, int index, int factor) {
  const Grid2D& g = ds.grid;
  Grid2D fine = build_grid(g.n_range * factor, g.n_depth * factor, g.range_extent(),
                           g.depth_extent());
  if (ds.gen) {
    SynthConfig cfg = *ds.gen;
    cfg.grid = fine;
    return synth_environment(cfg, index);
  }
  const DatasetSample& s = ds.samples[index];
  Scenario out = s.scn;
  out.ssf.grid = fine;
  out.ssf.c = bicubic_resample(s.scn.ssf.c, fine.n_depth, fine.n_range);
  out.ssf.bathy.resize(fine.n_range);
  for (int j = 0; j < fine.n_range; ++j) {
    double r = fine.range_at(j);
    double pos = std::clamp((r - g.r0) / g.dr, 0.0, static_cast<double>(g.n_range - 1));
    int j0 = static_cast<int>(pos);
    int j1 = std::min(j0 + 1, g.n_range - 1);
    double t = pos - j0;
    out.ssf.bathy[j] = (1.0 - t) * s.scn.ssf.bathy[j0] + t * s.scn.ssf.bathy[j1];
  }
  return out;
}

int run_infer(const InferArgs& a) {
  ModelParams model = load_checkpoint(a.ckpt);
  Dataset ds = load_dataset(a.data);
  if (ds.samples.empty()) {
    std::cerr << "error: dataset has no samples\n";
    return kExitData;
  }

  Dataset out;
  out.gen = ds.gen;
  Grid2D grid = ds.grid;
  std::unique_ptr<FnoWorkspace> ws;
  for (size_t i = 0; i < ds.samples.size(); ++i) {
    Scenario scn = a.upsample > 1 ? refine_scenario(ds, static_cast<int>(i), a.upsample)
                                  : ds.samples[i].scn;
    if (i == 0) {
      grid = scn.ssf.grid;
      out.grid = grid;
      if (out.gen) out.gen->grid = grid;
      ws = std::make_unique<FnoWorkspace>(model.hp, grid.n_depth, grid.n_range);
    }
    EncodedInput enc = standardize(assemble_input(scn, model.encoding), model.stats);
    Mat pred_std = forward(model, enc, *ws, nullptr);
    DatasetSample s;
    s.scn = std::move(scn);
    s.tl.grid = grid;
    s.tl.tl = destandardize_output(pred_std, model.stats);
    if (!a.pgm_dir.empty()) {
      std::filesystem::create_directories(a.pgm_dir);
      char name[64];
      std::snprintf(name, sizeof name, "pred_%04zu.pgm", i);
      write_pgm(s.tl.tl, (std::filesystem::path(a.pgm_dir) / name).string(), 0.0, 120.0);
    }
    out.samples.push_back(std::move(s));
    info("inferred sample " + std::to_string(i + 1) + "/" + std::to_string(ds.samples.size()));
  }
  save_dataset(out, a.out);
  info("wrote " + a.out);
  return kExitOk;
}

struct EvalArgs {
  std::string ckpt, pred, data, json_out;
};

int run_eval(const EvalArgs& a) {
  Dataset ds = load_dataset(a.data);
  if (ds.samples.empty()) {
    std::cerr << "error: dataset has no samples\n";
    return kExitData;
  }
  std::vector<Mat> preds;
  if (!a.pred.empty()) {
    Dataset pd = load_dataset(a.pred);
    if (pd.samples.size() != ds.samples.size())
      throw IoError(IoError::Kind::CountMismatch, "prediction/target sample count mismatch");
    for (auto& s : pd.samples) preds.push_back(s.tl.tl);
  } else {
    ModelParams model = load_checkpoint(a.ckpt);
    FnoWorkspace ws(model.hp, ds.grid.n_depth, ds.grid.n_range);
    for (const auto& s : ds.samples) {
      EncodedInput enc = standardize(assemble_input(s.scn, model.encoding), model.stats);
      preds.push_back(destandardize_output(forward(model, enc, ws, nullptr), model.stats));
    }
  }

  nlohmann::json out;
  out["samples"] = nlohmann::json::array();
  double srmse = 0.0, sh1 = 0.0, sssim = 0.0;
  for (size_t i = 0; i < preds.size(); ++i) {
    MetricReport m = evaluate(preds[i], ds.samples[i].tl.tl);
    out["samples"].push_back(
        nlohmann::json{{"index", i}, {"rmse", m.rmse}, {"h1", m.h1}, {"ssim", m.ssim}});
    srmse += m.rmse;
    sh1 += m.h1;
    sssim += m.ssim;
  }
  double n = static_cast<double>(preds.size());
  out["aggregate"] =
      nlohmann::json{{"rmse", srmse / n}, {"h1", sh1 / n}, {"ssim", sssim / n}, {"count", n}};
  std::string text = out.dump(2);
  text += "\n";
  if (a.json_out.empty())
    std::cout << text;
  else
    atomic_write(a.json_out, {text.data(), text.size()});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural-operator toolkit for underwater transmission-loss charting"};
  app.require_subcommand(1);

  GenArgs ga;
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic PE-solved dataset");
  gen->add_option("--n", ga.n, "Number of samples")->check(CLI::PositiveNumber);
  gen->add_option("--grid", ga.grid, "Grid as RANGExDEPTH, e.g. 200x150");
  gen->add_option("--range-km", ga.range_km, "Range extent in km");
  gen->add_option("--depth-km", ga.depth_km, "Depth extent in km");
  gen->add_option("--freq-hz", ga.freq_hz, "Source frequency in Hz");
  gen->add_option("--source-depth-m", ga.source_depth_m, "Source depth in m");
  gen->add_option("--c-ref", ga.c_ref, "Reference sound speed in m/s");
  gen->add_option("--v-sed", ga.v_sed, "Sediment sound speed in m/s");
  gen->add_option("--perturb", ga.perturb, "Range perturbation scale in m/s");
  gen->add_option("--profile", ga.profile, "munk-perturbed | linear-thermocline");
  gen->add_option("--bathy", ga.bathy, "flat | slope | smooth-random");
  gen->add_option("--seed", ga.seed, "RNG seed");
  gen->add_option("--starter-width", ga.starter_width, "PE starter width factor (0 = auto)");
  gen->add_option("--sponge", ga.sponge, "Absorbing-layer strength per step, nepers");
  gen->add_option("--ext-factor", ga.ext_factor, "Absorbing depth extension factor");
  gen->add_option("--threads", ga.threads, "Worker threads");
  gen->add_flag("--store-encodings", ga.store_enc, "Also store encoded input channels");
  gen->add_option("--out", ga.out, "Output dataset path")->required();

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Pretrain a model on a dataset");
  tr->add_option("--data", ta.data, "Training dataset")->required();
  tr->add_option("--out", ta.out, "Output checkpoint")->required();
  tr->add_option("--epochs", ta.epochs, "Training epochs (default 1000)");
  tr->add_option("--val-frac", ta.val_frac, "Validation fraction (default 0.1)");
  tr->add_option("--layers", ta.layers, "Fourier layers");
  tr->add_option("--width", ta.width, "Feature dimension");
  tr->add_option("--modes-z", ta.modes_z, "Retained depth modes");
  tr->add_option("--modes-r", ta.modes_r, "Retained range modes per sign");
  tr->add_option("--lr", ta.lr, "Learning rate");
  tr->add_option("--wd", ta.wd, "Weight decay");
  tr->add_option("--batch", ta.batch, "Batch size");
  tr->add_option("--sobolev-k", ta.sobolev_k, "Sobolev loss order K");
  tr->add_option("--seed", ta.seed, "RNG seed");
  tr->add_option("--encodings", ta.encodings, "none | bty | bty+hf | cbty");
  tr->add_option("--threads", ta.threads, "Worker threads");
  tr->add_option("--report", ta.report, "Training report CSV (default <out>.csv)");

  TrainArgs fa;
  auto* ft = app.add_subcommand("finetune", "Fine-tune from a pretrained checkpoint");
  ft->add_option("--data", fa.data, "Fine-tuning dataset")->required();
  ft->add_option("--init", fa.init, "Pretrained checkpoint")->required();
  ft->add_option("--out", fa.out, "Output checkpoint")->required();
  ft->add_option("--epochs", fa.epochs, "Training epochs (default 100)");
  ft->add_option("--val-frac", fa.val_frac, "Validation fraction");
  ft->add_option("--lr", fa.lr, "Learning rate");
  ft->add_option("--wd", fa.wd, "Weight decay");
  ft->add_option("--batch", fa.batch, "Batch size");
  ft->add_option("--sobolev-k", fa.sobolev_k, "Sobolev loss order K");
  ft->add_option("--seed", fa.seed, "RNG seed");
  ft->add_option("--threads", fa.threads, "Worker threads");
  ft->add_option("--report", fa.report, "Training report CSV");

  InferArgs ia;
  auto* inf = app.add_subcommand("infer", "Predict TL fields for a dataset");
  inf->add_option("--ckpt", ia.ckpt, "Model checkpoint")->required();
  inf->add_option("--data", ia.data, "Input dataset")->required();
  inf->add_option("--out", ia.out, "Output predictions dataset")->required();
  inf->add_option("--upsample", ia.upsample, "Zero-shot resolution factor")
      ->check(CLI::PositiveNumber);
  inf->add_option("--pgm-dir", ia.pgm_dir, "Also dump 8-bit PGM rasters here");

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Score predictions against dataset targets");
  ev->add_option("--ckpt", ea.ckpt, "Model checkpoint");
  ev->add_option("--pred", ea.pred, "Predictions dataset (alternative to --ckpt)");
  ev->add_option("--data", ea.data, "Target dataset")->required();
  ev->add_option("--json", ea.json_out, "Metrics JSON output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return run_gen_data(ga);
    if (tr->parsed()) return run_train(ta, false);
    if (ft->parsed()) return run_train(fa, true);
    if (inf->parsed()) return run_infer(ia);
    if (ev->parsed()) {
      if (ea.ckpt.empty() == ea.pred.empty()) {
        std::cerr << "error: eval needs exactly one of --ckpt or --pred\n";
        return kExitUsage;
      }
      return run_eval(ea);
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const IoError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
