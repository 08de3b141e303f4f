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

#include "dgann/train.h"

#include <cmath>
#include <charconv>
#include <map>

#include "dgann/ops.h"

namespace dgann {
namespace {

std::vector<SpeciesCounts> counts_for(const Dataset& ds, const std::vector<std::size_t>& rows) {
  std::vector<SpeciesCounts> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(species_counts(ds.molecules.at(r)));
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

struct SeedRun {
  Metrics metrics;
  ParameterSet best;
};

SeedRun train_seed(const TrainConfig& cfg, const ModelConfig& model_cfg, const Dataset& ds,
                   const DatasetSplit& split, const TargetTransform& transform,
                   const std::vector<double>& z, std::uint64_t seed,
                   const EpochCallback& callback) {
  DgannModel model(model_cfg, seed);
  AdamState adam = make_adam_state(model.parameters(), cfg.adam_beta1, cfg.adam_beta2,
                                   cfg.adam_epsilon);
  BatchOptions bopt;
  bopt.batch_size = cfg.batch_size;
  bopt.augment = cfg.augment;
  bopt.translation = cfg.translation;

  SeedRun run;
  run.best = model.parameters();
  std::mt19937_64 dropout_rng(seed ^ 0xd1b54a32d192ed03ULL);
  std::size_t since_best = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at_epoch(epoch, cfg);
    std::mt19937_64 rng = epoch_rng(seed, epoch);
    const std::vector<Batch> batches = make_batches(ds, split.train, z, bopt, rng);
    double loss_sum = 0.0;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      const Batch& b = batches[bi];
      Tape tape;
      const std::vector<Var> p = model.parameters().bind(tape, true);
      ForwardOptions fopt;
      fopt.dropout = cfg.dropout;
      fopt.rng = &dropout_rng;
      const ForwardResult fr = model.forward(p, b.graph, fopt);
      const Var target = tape.constant(Tensor(Shape{b.targets.size(), 1}, b.targets));
      const Var loss = ops::huber_loss(fr.predictions, target, cfg.huber_delta);
      const double value = loss.value().item();
      if (!std::isfinite(value)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                std::to_string(bi) + " (seed " + std::to_string(seed) + ")",
                            epoch, bi);
      }
      loss_sum += value * static_cast<double>(b.indices.size());
      tape.backward(loss);
      std::vector<Tensor> grads;
      grads.reserve(p.size());
      for (const Var& v : p) grads.push_back(v.grad());
      double step_lr = lr;
      if (cfg.warmup_steps > 0 && adam.step < cfg.warmup_steps) {
        step_lr *= static_cast<double>(adam.step + 1) / static_cast<double>(cfg.warmup_steps);
      }
      adam_step(model.parameters(), grads, adam, step_lr);
    }

    EpochMetrics em;
    em.epoch = epoch;
    em.lr = lr;
    em.train_loss = loss_sum / static_cast<double>(split.train.size());
    em.val_mae = evaluate(model, transform, ds, split.val).mae;
    run.metrics.epochs.push_back(em);
    if (em.val_mae < run.metrics.best_val_mae) {
      run.metrics.best_val_mae = em.val_mae;
      run.metrics.best_epoch = epoch;
      run.best = model.parameters();
      since_best = 0;
    } else {
      ++since_best;
    }
    if (callback && !callback(seed, em, model)) break;
    if (cfg.patience > 0 && since_best >= cfg.patience) break;
  }
  return run;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs == 0 || decay_every == 0 || batch_size == 0) {
    throw std::invalid_argument("epochs, decay_every and batch size must be positive");
  }
  if (!(lr0 > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(decay > 0.0 && decay <= 1.0)) throw std::invalid_argument("decay must lie in (0, 1]");
  if (!(huber_delta > 0.0)) throw std::invalid_argument("Huber delta must be positive");
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("dropout must lie in [0, 1)");
  if (translation < 0.0) throw std::invalid_argument("translation must be non-negative");
}

double lr_at_epoch(std::size_t epoch, const TrainConfig& config) {
  return config.lr0 * std::pow(config.decay, static_cast<double>(epoch / config.decay_every));
}

AdamState make_adam_state(const ParameterSet& params, double beta1, double beta2,
                          double epsilon) {
  AdamState s;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  for (const Parameter& p : params) {
    s.m.emplace_back(p.value.shape(), 0.0);
    s.v.emplace_back(p.value.shape(), 0.0);
  }
  return s;
}

void adam_step(ParameterSet& params, const std::vector<Tensor>& grads, AdamState& state,
               double lr) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw ShapeError("adam_step: expected " + std::to_string(params.size()) + " gradients, got " +
                     std::to_string(grads.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Shape& shape = params[i].value.shape();
    if (grads[i].shape() != shape || state.m[i].shape() != shape ||
        state.v[i].shape() != shape) {
      throw ShapeError("adam_step: gradient " + shape_string(grads[i].shape()) +
                       " does not match parameter '" + params[i].name + "' " +
                       shape_string(shape));
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double* w = params[i].value.data();
    double* m = state.m[i].data();
    double* v = state.v[i].data();
    const double* g = grads[i].data();
    for (std::size_t k = 0; k < grads[i].size(); ++k) {
      m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g[k];
      v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g[k] * g[k];
      const double mhat = m[k] / c1;
      const double vhat = v[k] / c2;
      w[k] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

std::vector<SizeMae> mae_by_size(const std::vector<std::size_t>& atom_counts,
                                 const std::vector<double>& predictions,
                                 const std::vector<double>& targets) {
  std::map<std::size_t, std::pair<std::size_t, double>> acc;
  for (std::size_t i = 0; i < atom_counts.size(); ++i) {
    auto& [count, sum] = acc[atom_counts[i]];
    ++count;
    sum += std::abs(predictions[i] - targets[i]);
  }
  std::vector<SizeMae> out;
  for (const auto& [n, cs] : acc) {
    out.push_back(SizeMae{n, cs.first, cs.second / static_cast<double>(cs.first)});
  }
  return out;
}

DgannModel model_from_checkpoint(const Checkpoint& ckpt) {
  return DgannModel(ckpt.model_config, ckpt.parameters);
}

EvalResult evaluate(const DgannModel& model, const TargetTransform& transform, const Dataset& ds,
                    const std::vector<std::size_t>& rows) {
  if (rows.empty()) throw std::invalid_argument("evaluate: no molecules to evaluate");
  if (!ds.has_targets()) throw std::invalid_argument("evaluate: dataset has no target values");
  std::vector<Molecule> mols;
  std::vector<MoleculeFeatures> feats;
  mols.reserve(rows.size());
  feats.reserve(rows.size());
  for (std::size_t r : rows) {
    mols.push_back(ds.molecules.at(r));
    feats.push_back(ds.features.at(r));
  }
  const std::vector<double> z = model.predict(mols, feats);
  EvalResult out;
  std::vector<std::size_t> sizes;
  double total = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SpeciesCounts counts = species_counts(mols[i]);
    const double pred = transform.inverse(counts, z[i]);
    const double y = ds.targets[rows[i]][static_cast<std::size_t>(transform.target)];
    out.predictions.push_back(pred);
    out.targets.push_back(y);
    sizes.push_back(mols[i].atoms.size());
    total += std::abs(pred - y);
  }
  out.mae = total / static_cast<double>(rows.size());
  out.by_size = mae_by_size(sizes, out.predictions, out.targets);
  return out;
}

EvalResult evaluate(const Checkpoint& ckpt, const Dataset& ds,
                    const std::vector<std::size_t>& rows, Target target) {
  if (target != ckpt.transform.target) {
    throw std::invalid_argument("checkpoint was trained on '" +
                                std::string(target_name(ckpt.transform.target)) +
                                "', not '" + std::string(target_name(target)) + "'");
  }
  return evaluate(model_from_checkpoint(ckpt), ckpt.transform, ds, rows);
}

std::vector<double> predict_original(const Checkpoint& ckpt, const Dataset& ds,
                                     std::size_t batch_size) {
  if (ds.size() == 0) throw std::invalid_argument("predict: no molecules");
  const DgannModel model = model_from_checkpoint(ckpt);
  std::vector<double> z = model.predict(ds.molecules, ds.features, batch_size);
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = ckpt.transform.inverse(species_counts(ds.molecules[i]), z[i]);
  }
  return z;
}

TrainResult train(const TrainConfig& config, const ModelConfig& model_config, const Dataset& ds,
                  const DatasetSplit& split, const EpochCallback& callback) {
  config.validate();
  model_config.validate();
  if (!ds.has_targets()) throw std::invalid_argument("training data has no target values");
  if (split.train.empty() || split.val.empty()) {
    throw std::invalid_argument("training and validation splits must be non-empty");
  }
  const std::vector<SpeciesCounts> train_counts = counts_for(ds, split.train);
  std::vector<double> train_values;
  for (std::size_t r : split.train) {
    train_values.push_back(ds.targets[r][static_cast<std::size_t>(config.target)]);
  }
  const TargetTransform transform = fit_target_transform(
      config.target, train_counts, train_values, config.use_lsm, config.standardize);
  std::vector<double> z(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    z[i] = transform.forward(species_counts(ds.molecules[i]),
                             ds.targets[i][static_cast<std::size_t>(config.target)]);
  }

  TrainResult result;
  std::optional<ParameterSet> best_params;
  for (std::uint64_t seed : config.seeds) {
    SeedRun run = train_seed(config, model_config, ds, split, transform, z, seed, callback);
    result.seeds.push_back(SeedResult{seed, run.metrics});
    if (!best_params || run.metrics.best_val_mae < result.metrics.best_val_mae) {
      result.metrics = run.metrics;
      best_params = std::move(run.best);
      result.checkpoint.seed = seed;
    }
  }
  Checkpoint& ckpt = result.checkpoint;
  ckpt.model_config = model_config;
  ckpt.transform = transform;
  ckpt.best_epoch = result.metrics.best_epoch;
  ckpt.best_val_mae = result.metrics.best_val_mae;
  ckpt.parameters = std::move(*best_params);
  if (!split.test.empty()) {
    const EvalResult test = evaluate(ckpt, ds, split.test, config.target);
    result.metrics.test_mae = test.mae;
    result.metrics.test_by_size = test.by_size;
  }
  return result;
}

std::string metrics_csv(const Metrics& metrics) {
  std::string out = "epoch,lr,train_loss,val_mae\n";
  for (const EpochMetrics& e : metrics.epochs) {
    out += std::to_string(e.epoch) + "," + format_number(e.lr) + "," +
           format_number(e.train_loss) + "," + format_number(e.val_mae) + "\n";
  }
  return out;
}

std::string size_mae_csv(const std::vector<SizeMae>& rows) {
  std::string out = "n_atoms,count,mae\n";
  for (const SizeMae& r : rows) {
    out += std::to_string(r.n_atoms) + "," + std::to_string(r.count) + "," +
           format_number(r.mae) + "\n";
  }
  return out;
}

}  // namespace dgann
