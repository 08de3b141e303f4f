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

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "dgann/dataset.h"
#include "dgann/model.h"
#include "dgann/preprocess.h"
#include "dgann/train.h"

namespace dgann {
namespace {

const Dataset& subset() {
  static const Dataset ds = load_dataset(std::filesystem::path(DGANN_REPO_DATA_DIR) / "qm9_subset");
  return ds;
}

// One optimizer step on a 32-molecule batch: forward, Huber loss, backward, Adam.
void BM_TrainingStep(benchmark::State& state) {
  const ModelConfig config{static_cast<std::size_t>(state.range(0)),
                           static_cast<std::size_t>(state.range(1)), 3, 3, 2};
  DgannModel model(config, 1);
  const Dataset& ds = subset();
  std::vector<std::size_t> rows(32);
  std::iota(rows.begin(), rows.end(), 0);
  const std::vector<double> targets = ds.target_column(Target::kMu);
  BatchOptions opt;
  opt.batch_size = rows.size();
  opt.shuffle = false;
  std::mt19937_64 rng(1);
  const Batch batch = make_batches(ds, rows, targets, opt, rng).front();
  AdamState adam = make_adam_state(model.parameters());
  for (auto _ : state) {
    Tape tape;
    const std::vector<Var> p = model.parameters().bind(tape, true);
    const ForwardResult fr = model.forward(p, batch.graph);
    const Var target = tape.constant(Tensor(Shape{batch.targets.size(), 1}, batch.targets));
    const Var loss = ops::huber_loss(fr.predictions, target, 1.0);
    tape.backward(loss);
    std::vector<Tensor> grads;
    for (const Var& v : p) grads.push_back(v.grad());
    adam_step(model.parameters(), grads, adam, 1e-5);
    benchmark::DoNotOptimize(loss.value().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows.size()));
}
BENCHMARK(BM_TrainingStep)->Args({64, 2})->Args({128, 4})->Unit(benchmark::kMillisecond);

// Batched inference over 256 molecules.
void BM_Predict(benchmark::State& state) {
  const DgannModel model(ModelConfig{128, 4, 3, 3, 2}, 1);
  const Dataset& ds = subset();
  const std::span<const Molecule> mols(ds.molecules.data(), 256);
  const std::span<const MoleculeFeatures> feats(ds.features.data(), 256);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(mols, feats));
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_Predict)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dgann
