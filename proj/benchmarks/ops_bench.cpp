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

#include <random>

#include "dgann/ops.h"
#include "dgann/tape.h"

namespace dgann {
namespace {

Tensor random_tensor(const Shape& shape, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Tensor t(shape);
  for (double& v : t.values()) v = dist(rng);
  return t;
}

void BM_LinearForwardBackward(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto width = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(1);
  const Tensor x = random_tensor({rows, width}, rng);
  const Tensor w = random_tensor({width, width}, rng);
  const Tensor b = random_tensor({1, width}, rng);
  for (auto _ : state) {
    Tape tape;
    const Var out = ops::linear(tape.variable(x), tape.variable(w), tape.variable(b));
    tape.backward(ops::sum(out));
    benchmark::DoNotOptimize(out.value().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_LinearForwardBackward)->Args({512, 64})->Args({512, 128})->Args({2048, 128});

// Each query attends over `fan_in` random key rows, as in a molecular batch.
void BM_SegmentAttendForwardBackward(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto width = static_cast<std::size_t>(state.range(1));
  const std::size_t heads = 4;
  const std::size_t fan_in = 4;
  std::mt19937_64 rng(2);
  const Tensor q = random_tensor({rows, width}, rng);
  const Tensor k = random_tensor({rows, width}, rng);
  const Tensor v = random_tensor({rows, width}, rng);
  ops::Segments groups;
  std::uniform_int_distribution<std::size_t> pick(0, rows - 1);
  for (std::size_t t = 0; t < rows; ++t) {
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < fan_in; ++j) members.push_back(pick(rng));
    groups.push_group(members);
  }
  for (auto _ : state) {
    Tape tape;
    const Var out = ops::segment_attend(tape.variable(q), tape.variable(k), tape.variable(v),
                                        groups, heads);
    tape.backward(ops::sum(out));
    benchmark::DoNotOptimize(out.value().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_SegmentAttendForwardBackward)->Args({512, 64})->Args({2048, 128});

}  // namespace
}  // namespace dgann
