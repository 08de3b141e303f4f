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
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "dgann/tape.h"
#include "dgann/tensor.h"

namespace dgann::ops {

/// Stabilizer added to the variance in layer_norm.
inline constexpr double kLayerNormEpsilon = 1e-5;

enum class OpKind : int {
  kMatmul,
  kLinear,
  kAdd,
  kSubtract,
  kScale,
  kMultiply,
  kGelu,
  kTanh,
  kLayerNorm,
  kSoftmax,
  kSegmentAttend,
  kConcat,
  kConcatRows,
  kGatherRows,
  kScatterAddRows,
  kSum,
  kMean,
  kDropout,
  kHuber,
};

inline constexpr int kNumOpKinds = static_cast<int>(OpKind::kHuber) + 1;

std::string_view op_name(OpKind kind);

/// Compressed row lists: group t owns indices[offsets[t], offsets[t+1]).
struct Segments {
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> indices;

  std::size_t size() const { return offsets.size() - 1; }
  std::span<const std::size_t> group(std::size_t t) const {
    return {indices.data() + offsets[t], offsets[t + 1] - offsets[t]};
  }
  void push_group(std::span<const std::size_t> members) {
    indices.insert(indices.end(), members.begin(), members.end());
    offsets.push_back(indices.size());
  }
};

/// Plain matrix product of rank-2 tensors: [m x k] * [k x n].
Var matmul(Var a, Var b);
/// Row-wise affine map x * W^T (+ b) with W stored as [out x in].
Var linear(Var x, Var weight);
Var linear(Var x, Var weight, Var bias);

Var add(Var a, Var b);
Var subtract(Var a, Var b);
Var scale(Var a, double factor);
Var multiply(Var a, Var b);

/// 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3))).
Var gelu(Var x);
double gelu(double x);
Var tanh(Var x);

/// Normalizes each row over the last axis, then applies gain and bias.
/// The last axis must have at least two entries.
Var layer_norm(Var x, Var gain, Var bias);

/// Softmax over the last axis. `valid` (same element count as x) marks the
/// entries that participate; excluded entries come out exactly zero. Every
/// row needs at least one valid entry.
Var softmax(Var x);
Var softmax(Var x, const std::vector<std::uint8_t>& valid);

/// Grouped multi-head scaled dot-product attention.
///
/// For target t and head h, attends query row t over the key/value rows in
/// `groups.group(t)`, using column slice h of width D/heads and scale
/// 1/sqrt(D/heads). Output is [T x D] with heads concatenated in ascending
/// order. When `weights` is non-null it receives the attention weights as a
/// [nnz x heads] tensor aligned with `groups.indices`.
Var segment_attend(Var queries, Var keys, Var values, const Segments& groups,
                   std::size_t heads = 1, Tensor* weights = nullptr);

/// Concatenation along the last axis of rank-2 tensors with equal rows.
Var concat(std::span<const Var> parts);
/// Concatenation along the first axis of rank-2 tensors with equal columns.
Var concat_rows(std::span<const Var> parts);

/// Rows of a rank-2 tensor, or copies of a rank-1 tensor treated as one row.
Var gather_rows(Var x, std::span<const std::size_t> index);
/// out[index[i]] += x[i] for an [out_rows x cols] result.
Var scatter_add_rows(Var x, std::span<const std::size_t> index, std::size_t out_rows);

Var sum(Var x);
Var mean(Var x);

/// Inverted dropout with keep probability 1 - p; identity when p == 0.
Var dropout(Var x, double p, std::mt19937_64& rng);

/// Mean over entries of r^2/2 (|r| <= delta) or delta (|r| - delta/2),
/// with r = prediction - target.
Var huber_loss(Var prediction, Var target, double delta);

namespace testing {

/// Multiplies the adjoint of `kind` by `factor` until reset. Used only as a
/// negative control for gradient checking.
void perturb_adjoint(OpKind kind, double factor);
void reset_adjoints();
double adjoint_scale(OpKind kind);

}  // namespace testing

}  // namespace dgann::ops
