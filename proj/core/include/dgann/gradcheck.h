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
#include <span>
#include <string>
#include <vector>

#include "dgann/model.h"
#include "dgann/tape.h"

namespace dgann {

struct GradcheckOptions {
  /// Central-difference step.
  double step = 1e-5;
  double tolerance = 1e-4;
  /// Perturbed coordinates per op.
  std::size_t points = 20;
  std::uint64_t seed = 20210;
  /// Lower bound on the relative-error denominator, so that gradients that
  /// are zero up to rounding compare on an absolute scale.
  double denominator_floor = 1e-3;
  /// Entries checked per model parameter tensor; 0 checks every entry.
  std::size_t model_entries_per_parameter = 0;
};

struct GradcheckResult {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t points = 0;
  bool passed = false;
};

/// |a - n| / max(|a|, |n|, floor).
double gradcheck_relative_error(double analytic, double numeric, double floor);

/// Builds the function under test on a fresh tape from leaf variables.
using GraphFn = std::function<Var(Tape& tape, std::span<const Var> inputs)>;

/// Compares the reverse-mode gradient of sum(f(inputs) * R), R a fixed
/// random tensor, with central differences at options.points coordinates
/// spread round-robin over the inputs.
GradcheckResult check_gradient(const std::string& name, const std::vector<Tensor>& inputs,
                               const GraphFn& fn, const GradcheckOptions& options = {});

/// One result per differentiable op, in OpKind order.
std::vector<GradcheckResult> check_all_ops(const GradcheckOptions& options = {});

/// Water molecule used by the full-model check.
Molecule gradcheck_water();

/// Gradient of the prediction for water with respect to every model
/// parameter, d_model 32, 4 heads, 2 interaction and 2 transformer blocks
/// unless `config` says otherwise. One result per parameter tensor.
std::vector<GradcheckResult> check_model_gradients(const GradcheckOptions& options = {},
                                                   const ModelConfig& config = {32, 4, 2, 2, 2});

}  // namespace dgann
