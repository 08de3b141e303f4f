// Copyright 2026 The DGANN Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgann/dataset.h"
#include "dgann/model.h"
#include "dgann/parameters.h"
#include "dgann/preprocess.h"

namespace dgann {

struct TrainConfig {
  std::size_t epochs = 600;
  double lr0 = 1e-5;
  std::size_t decay_every = 150;
  double decay = 0.5;
  std::size_t batch_size = 64;
  /// Seam of the Huber loss, in transformed target units.
  double huber_delta = 1.0;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  Target target = Target::kMu;
  bool augment = true;
  /// Random shift half-width in Angstrom (0 disables).
  double translation = 0.0;
  /// Overrides the per-target LSM convention when set.
  std::optional<bool> use_lsm;
  bool standardize = true;
  double dropout = 0.0;
  /// Linear learning-rate ramp over the first steps (0 disables).
  std::size_t warmup_steps = 0;
  /// Stop after this many epochs without a validation improvement (0 never).
  std::size_t patience = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  /// Throws std::invalid_argument on non-positive sizes or rates, or a
  /// decay outside (0, 1].
  void validate() const;
};

/// lr0 * decay^floor(epoch / decay_every).
double lr_at_epoch(std::size_t epoch, const TrainConfig& config);

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState make_adam_state(const ParameterSet& params, double beta1 = 0.9, double beta2 = 0.999,
                          double epsilon = 1e-8);

/// Bias-corrected Adam update applied in parameter order. Throws ShapeError
/// when a gradient or moment shape differs from its parameter.
void adam_step(ParameterSet& params, const std::vector<Tensor>& grads, AdamState& state,
               double lr);

struct EpochMetrics {
  std::size_t epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  /// In original target units.
  double val_mae = 0.0;
};

struct SizeMae {
  std::size_t n_atoms = 0;
  std::size_t count = 0;
  double mae = 0.0;
};

struct Metrics {
  std::vector<EpochMetrics> epochs;
  std::size_t best_epoch = 0;
  double best_val_mae = std::numeric_limits<double>::infinity();
  double test_mae = std::numeric_limits<double>::quiet_NaN();
  std::vector<SizeMae> test_by_size;
};

/// Everything needed to reproduce predictions.
struct Checkpoint {
  ModelConfig model_config;
  TargetTransform transform;
  std::uint64_t seed = 0;
  std::size_t best_epoch = 0;
  double best_val_mae = 0.0;
  ParameterSet parameters;
};

struct SeedResult {
  std::uint64_t seed = 0;
  Metrics metrics;
};

struct TrainResult {
  Checkpoint checkpoint;
  /// Metrics of the selected seed.
  Metrics metrics;
  std::vector<SeedResult> seeds;
};

/// Raised when the loss becomes NaN or infinite.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& message, std::size_t epoch, std::size_t batch)
      : std::runtime_error(message), epoch_(epoch), batch_(batch) {}
  std::size_t epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }

 private:
  std::size_t epoch_;
  std::size_t batch_;
};

/// Called after every epoch; returning false ends training for that seed.
using EpochCallback =
    std::function<bool(std::uint64_t seed, const EpochMetrics& metrics, const DgannModel& model)>;

/// Trains one model per seed and keeps the one with the lowest validation
/// MAE. Within a seed, the parameters of the best validation epoch are
/// retained. The target transform is fitted on split.train only.
TrainResult train(const TrainConfig& config, const ModelConfig& model_config, const Dataset& ds,
                  const DatasetSplit& split, const EpochCallback& callback = {});

struct EvalResult {
  double mae = 0.0;
  /// In original units, aligned with the evaluated rows.
  std::vector<double> predictions;
  std::vector<double> targets;
  std::vector<SizeMae> by_size;
};

DgannModel model_from_checkpoint(const Checkpoint& ckpt);

/// Predictions in original units for every row of `ds`.
std::vector<double> predict_original(const Checkpoint& ckpt, const Dataset& ds,
                                     std::size_t batch_size = 64);

/// MAE over `rows` in original units. Throws std::invalid_argument if `target` differs from the
/// checkpoint's target, the dataset lacks targets or `rows` is empty.
EvalResult evaluate(const Checkpoint& ckpt, const Dataset& ds,
                    const std::vector<std::size_t>& rows, Target target);
EvalResult evaluate(const DgannModel& model, const TargetTransform& transform,
                    const Dataset& ds, const std::vector<std::size_t>& rows);

std::vector<SizeMae> mae_by_size(const std::vector<std::size_t>& atom_counts,
                                 const std::vector<double>& predictions,
                                 const std::vector<double>& targets);

/// "epoch,lr,train_loss,val_mae" rows.
std::string metrics_csv(const Metrics& metrics);
/// "n_atoms,count,mae" rows.
std::string size_mae_csv(const std::vector<SizeMae>& rows);

}  // namespace dgann
