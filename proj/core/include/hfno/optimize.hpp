#pragma once

#include <iosfwd>
#include <span>
#include <utility>

#include "hfno/fno.hpp"

namespace hfno {

enum class Axis { Range, Depth };

struct TrainConfig {
  int epochs = 1000;  // fine-tuning default is 100, set by the caller
  int batch_size = 8;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int sobolev_order = 1;  // K in the H^K loss
  uint64_t seed = 0;
  bool shuffle = true;
  int threads = 1;
  std::ostream* progress = nullptr;  // per-epoch "epoch=<k> train=<l> val=<l> secs=<t>"
};

struct OptimizerState {
  std::vector<std::vector<double>> m, v;  // first/second moments per tensor view
  long long step = 0;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double secs = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  double best_val = 0.0;
  int best_epoch = -1;
};

// k-fold forward difference in index space along the given axis; the last
// valid difference is replicated so the shape is preserved.
Mat finite_diff(const Mat& u, Axis axis, int order);
// adjoint of the same operator, needed by the loss gradient
Mat finite_diff_adjoint(const Mat& g, Axis axis, int order);

// Normalized H^K Sobolev error sqrt(L / N): squared Frobenius mismatch of
// values plus range/depth differences up to order K, normalized by the same
// functional of the target. If grad is non-null it receives d(value)/d(pred).
double sobolev_h1_loss(const Mat& pred, const Mat& target, int K, Mat* grad = nullptr);

// Plain mean squared error (1/Q)*sum((pred-target)^2), with gradient.
double mse_loss(const Mat& pred, const Mat& target, Mat* grad = nullptr);

// One decoupled-weight-decay Adam step; complex tensors update componentwise
// on their re/im parts.
void adamw_step(ModelParams& params, const ModelGrads& grads, OptimizerState& state,
                const TrainConfig& cfg);

struct TrainSample {
  EncodedInput input;  // raw (unstandardized) channels
  TLField target;      // raw TL in dB
};

// Mini-batch AdamW over standardized pairs with the Sobolev loss.
// Standardization stats are fitted on train_set only. Returns the
// best-validation parameters (falls back to train loss when val_set is empty).
std::pair<ModelParams, TrainReport> train(const Hyperparams& hp, const TrainConfig& cfg,
                                          std::span<const TrainSample> train_set,
                                          std::span<const TrainSample> val_set);

// Same loop started from pretrained weights; all tensors remain trainable and
// the pretrained standardization stats are reused unchanged.
ModelParams finetune(const ModelParams& pretrained, const TrainConfig& cfg,
                     std::span<const TrainSample> set, std::span<const TrainSample> val_set,
                     TrainReport* report = nullptr);

void report_to_csv(const TrainReport& report, const std::string& path);

}  // namespace hfno
