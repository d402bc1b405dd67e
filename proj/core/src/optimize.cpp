#include "hfno/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <thread>

#include "hfno/io.hpp"
#include "hfno/rng.hpp"

namespace hfno {

namespace {

Mat diff_once(const Mat& u, Axis axis) {
  Mat d(u.rows, u.cols);
  if (axis == Axis::Range) {
    for (int i = 0; i < u.rows; ++i) {
      for (int j = 0; j + 1 < u.cols; ++j) d(i, j) = u(i, j + 1) - u(i, j);
      d(i, u.cols - 1) = d(i, u.cols - 2);
    }
  } else {
    for (int i = 0; i + 1 < u.rows; ++i)
      for (int j = 0; j < u.cols; ++j) d(i, j) = u(i + 1, j) - u(i, j);
    for (int j = 0; j < u.cols; ++j) d(u.rows - 1, j) = d(u.rows - 2, j);
  }
  return d;
}

Mat diff_adjoint_once(const Mat& g, Axis axis) {
  Mat out(g.rows, g.cols);
  if (axis == Axis::Range) {
    const int N = g.cols;
    for (int i = 0; i < g.rows; ++i) {
      for (int j = 0; j + 1 < N; ++j) {
        out(i, j + 1) += g(i, j);
        out(i, j) -= g(i, j);
      }
      out(i, N - 1) += g(i, N - 1);
      out(i, N - 2) -= g(i, N - 1);
    }
  } else {
    const int M = g.rows;
    for (int i = 0; i + 1 < M; ++i)
      for (int j = 0; j < g.cols; ++j) {
        out(i + 1, j) += g(i, j);
        out(i, j) -= g(i, j);
      }
    for (int j = 0; j < g.cols; ++j) {
      out(M - 1, j) += g(M - 1, j);
      out(M - 2, j) -= g(M - 1, j);
    }
  }
  return out;
}

double frob2(const Mat& a) {
  double s = 0.0;
  for (double v : a.a) s += v * v;
  return s;
}

double frob2_diff(const Mat& a, const Mat& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.a.size(); ++k) {
    double d = a.a[k] - b.a[k];
    s += d * d;
  }
  return s;
}

}  // namespace

Mat finite_diff(const Mat& u, Axis axis, int order) {
  if (order < 1) throw std::invalid_argument("finite_diff: order must be >= 1");
  int extent = (axis == Axis::Range) ? u.cols : u.rows;
  if (extent <= order) throw std::invalid_argument("finite_diff: extent too small for order");
  Mat d = diff_once(u, axis);
  for (int k = 1; k < order; ++k) d = diff_once(d, axis);
  return d;
}

Mat finite_diff_adjoint(const Mat& g, Axis axis, int order) {
  if (order < 1) throw std::invalid_argument("finite_diff_adjoint: order must be >= 1");
  Mat d = diff_adjoint_once(g, axis);
  for (int k = 1; k < order; ++k) d = diff_adjoint_once(d, axis);
  return d;
}

double sobolev_h1_loss(const Mat& pred, const Mat& target, int K, Mat* grad) {
  if (!pred.same_shape(target)) throw std::invalid_argument("sobolev_h1_loss: shape mismatch");
  if (K < 0) throw std::invalid_argument("sobolev_h1_loss: K must be >= 0");

  double lsum = frob2_diff(pred, target);
  double nsum = frob2(target);
  std::vector<Mat> resid_r, resid_z;  // per order, for the gradient pass
  for (int k = 1; k <= K; ++k) {
    for (Axis ax : {Axis::Range, Axis::Depth}) {
      Mat dp = finite_diff(pred, ax, k);
      Mat dt = finite_diff(target, ax, k);
      lsum += frob2_diff(dp, dt);
      nsum += frob2(dt);
      if (grad) {
        Mat r(dp.rows, dp.cols);
        for (size_t q = 0; q < r.a.size(); ++q) r.a[q] = dp.a[q] - dt.a[q];
        (ax == Axis::Range ? resid_r : resid_z).push_back(std::move(r));
      }
    }
  }
  if (!(nsum > 0.0))
    throw std::invalid_argument("sobolev_h1_loss: zero normalization (trivial target)");
  double value = std::sqrt(lsum / nsum);

  if (grad) {
    *grad = Mat(pred.rows, pred.cols);
    if (value > 0.0) {
      Mat gl(pred.rows, pred.cols);
      for (size_t q = 0; q < gl.a.size(); ++q) gl.a[q] = 2.0 * (pred.a[q] - target.a[q]);
      int idx = 0;
      for (int k = 1; k <= K; ++k, ++idx) {
        Mat ar = finite_diff_adjoint(resid_r[idx], Axis::Range, k);
        Mat az = finite_diff_adjoint(resid_z[idx], Axis::Depth, k);
        for (size_t q = 0; q < gl.a.size(); ++q) gl.a[q] += 2.0 * (ar.a[q] + az.a[q]);
      }
      double scale = 1.0 / (2.0 * value * nsum);
      for (size_t q = 0; q < gl.a.size(); ++q) grad->a[q] = gl.a[q] * scale;
    }
  }
  return value;
}

double mse_loss(const Mat& pred, const Mat& target, Mat* grad) {
  if (!pred.same_shape(target)) throw std::invalid_argument("mse_loss: shape mismatch");
  const double q = static_cast<double>(pred.size());
  double s = frob2_diff(pred, target) / q;
  if (grad) {
    *grad = Mat(pred.rows, pred.cols);
    for (size_t k = 0; k < pred.a.size(); ++k)
      grad->a[k] = 2.0 * (pred.a[k] - target.a[k]) / q;
  }
  return s;
}

void adamw_step(ModelParams& params, const ModelGrads& grads, OptimizerState& state,
                const TrainConfig& cfg) {
  auto pv = param_views(params);
  auto gv = grad_views(grads);
  if (pv.size() != gv.size()) throw std::invalid_argument("adamw_step: tensor group mismatch");
  if (state.m.empty()) {
    state.m.resize(pv.size());
    state.v.resize(pv.size());
    for (size_t t = 0; t < pv.size(); ++t) {
      state.m[t].assign(pv[t].size(), 0.0);
      state.v[t].assign(pv[t].size(), 0.0);
    }
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (size_t t = 0; t < pv.size(); ++t) {
    if (pv[t].size() != gv[t].size()) throw std::invalid_argument("adamw_step: shape mismatch");
    double* th = pv[t].data();
    const double* gr = gv[t].data();
    double* m = state.m[t].data();
    double* v = state.v[t].data();
    for (size_t k = 0; k < pv[t].size(); ++k) {
      if (!std::isfinite(gr[k]))
        throw NumericError("adamw_step: non-finite gradient in tensor group " +
                           std::to_string(t));
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * gr[k];
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * gr[k] * gr[k];
      double mhat = m[k] / bc1;
      double vhat = v[k] / bc2;
      th[k] -= cfg.lr * (mhat / (std::sqrt(vhat) + cfg.eps) + cfg.weight_decay * th[k]);
    }
  }
}

namespace {

struct StdSet {
  std::vector<EncodedInput> in;
  std::vector<Mat> tgt;
};

StdSet standardize_set(std::span<const TrainSample> set, const StandardStats& stats) {
  StdSet out;
  out.in.reserve(set.size());
  out.tgt.reserve(set.size());
  for (const auto& s : set) {
    out.in.push_back(standardize(s.input, stats));
    out.tgt.push_back(standardize_output(s.target.tl, stats));
  }
  return out;
}

void accumulate(ModelGrads& acc, const ModelGrads& g) {
  auto av = grad_views(acc);
  auto gv = grad_views(g);
  for (size_t t = 0; t < av.size(); ++t) {
    double* a = av[t].data();
    const double* b = gv[t].data();
    for (size_t k = 0; k < av[t].size(); ++k) a[k] += b[k];
  }
}

std::pair<ModelParams, TrainReport> run_loop(ModelParams params, const TrainConfig& cfg,
                                             std::span<const TrainSample> train_set,
                                             std::span<const TrainSample> val_set,
                                             bool fit_statistics) {
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  const Grid2D grid = train_set[0].input.grid;
  for (const auto& s : train_set)
    if (!(s.input.grid == grid)) throw std::invalid_argument("train: mixed grids in dataset");
  for (const auto& s : val_set)
    if (!(s.input.grid == grid)) throw std::invalid_argument("train: mixed grids in val set");

  if (fit_statistics) {
    StatsAccumulator acc;
    for (const auto& s : train_set) acc.add(s.input, s.target.tl);
    params.stats = acc.finish();
  }
  StdSet tr = standardize_set(train_set, params.stats);
  StdSet va = standardize_set(val_set, params.stats);

  const int M = grid.n_depth, N = grid.n_range;
  const int n = static_cast<int>(train_set.size());
  const int n_threads = std::max(1, std::min(cfg.threads, n));
  std::vector<std::unique_ptr<FnoWorkspace>> ws;
  for (int t = 0; t < n_threads; ++t)
    ws.push_back(std::make_unique<FnoWorkspace>(params.hp, M, N));

  OptimizerState state;
  TrainReport rep;
  ModelParams best = params;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = -1;
  const int K = cfg.sobolev_order;

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    if (cfg.shuffle) {
      Rng rng = Rng::stream(cfg.seed, 0x7000000ULL + epoch);
      for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[static_cast<int>(rng.below(i + 1))]);
    }

    double loss_sum = 0.0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int bsz = std::min(cfg.batch_size, n - start);
      std::vector<double> losses(bsz, 0.0);
      std::vector<std::unique_ptr<ModelGrads>> grads(bsz);

      auto eval_sample = [&](int slot, int tid) {
        int idx = order[start + slot];
        ForwardTape tape;
        Mat pred = forward(params, tr.in[idx], *ws[tid], &tape);
        Mat gl;
        losses[slot] = sobolev_h1_loss(pred, tr.tgt[idx], K, &gl);
        for (double& x : gl.a) x /= bsz;  // batch objective is the mean loss
        grads[slot] = std::make_unique<ModelGrads>(backward(params, tape, gl, *ws[tid]));
      };

      if (n_threads == 1) {
        for (int s = 0; s < bsz; ++s) eval_sample(s, 0);
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t)
          pool.emplace_back([&, t] {
            for (int s = t; s < bsz; s += n_threads) eval_sample(s, t);
          });
        for (auto& th : pool) th.join();
      }

      // fixed-order reduction keeps results identical for any thread count
      ModelGrads acc = zero_grads(params.hp);
      for (int s = 0; s < bsz; ++s) {
        accumulate(acc, *grads[s]);
        loss_sum += losses[s];
      }
      adamw_step(params, acc, state, cfg);
    }

    double train_loss = loss_sum / n;
    if (!std::isfinite(train_loss))
      throw NumericError("train: loss diverged at epoch " + std::to_string(epoch));

    double val_loss = train_loss;
    if (!va.in.empty()) {
      double s = 0.0;
      for (size_t i = 0; i < va.in.size(); ++i) {
        Mat pred = forward(params, va.in[i], *ws[0], nullptr);
        s += sobolev_h1_loss(pred, va.tgt[i], K, nullptr);
      }
      val_loss = s / static_cast<double>(va.in.size());
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.epochs.push_back({epoch, train_loss, val_loss, secs});
    if (cfg.progress) {
      char line[160];
      std::snprintf(line, sizeof line, "epoch=%d train=%.8g val=%.8g secs=%.3f", epoch,
                    train_loss, val_loss, secs);
      (*cfg.progress) << line << '\n' << std::flush;
    }
    if (val_loss < best_val) {
      best_val = val_loss;
      best_epoch = epoch;
      best = params;
    }
  }

  if (best_epoch < 0) best = std::move(params);  // epochs == 0
  rep.best_val = best_val;
  rep.best_epoch = best_epoch;
  return {std::move(best), rep};
}

}  // namespace

std::pair<ModelParams, TrainReport> train(const Hyperparams& hp, const TrainConfig& cfg,
                                          std::span<const TrainSample> train_set,
                                          std::span<const TrainSample> val_set) {
  ModelParams init = init_params(hp, cfg.seed);
  return run_loop(std::move(init), cfg, train_set, val_set, /*fit_statistics=*/true);
}

ModelParams finetune(const ModelParams& pretrained, const TrainConfig& cfg,
                     std::span<const TrainSample> set, std::span<const TrainSample> val_set,
                     TrainReport* report) {
  auto [params, rep] = run_loop(pretrained, cfg, set, val_set, /*fit_statistics=*/false);
  if (report) *report = rep;
  return std::move(params);
}

void report_to_csv(const TrainReport& report, const std::string& path) {
  std::string csv = "epoch,train_loss,val_loss,secs\n";
  char line[160];
  for (const auto& e : report.epochs) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.3f\n", e.epoch, e.train_loss, e.val_loss,
                  e.secs);
    csv += line;
  }
  atomic_write(path, {csv.data(), csv.size()});
}

}  // namespace hfno
