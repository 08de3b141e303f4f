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
#include <initializer_list>
#include <vector>

#include "dgann/tensor.h"

namespace dgann {

class Tape;

/// Handle to a tensor recorded on a Tape. Cheap to copy; valid as long as
/// the owning tape is alive.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  std::uint32_t id() const { return id_; }

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;
  /// dLoss/dThis after Tape::backward; zeros if the loss does not reach it.
  const Tensor& grad() const;

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

/// Define-by-run record of executed operations.
///
/// Every node is appended after its inputs, so index order is a topological
/// order and backward() is a single reverse sweep. A tape and its nodes
/// belong to one thread; separate tapes may run concurrently over shared
/// read-only parameter values.
class Tape {
 public:
  /// Adjoint of one recorded op. Reads the output gradient and accumulates
  /// into the gradients of inputs that require them.
  using BackwardFn = std::function<void(Tape& tape, const Tensor& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf that never receives a gradient.
  Var constant(Tensor value);
  /// Leaf that receives a gradient.
  Var variable(Tensor value);

  /// Appends an op output. `backward` may be empty for ops without inputs
  /// that need gradients; it is dropped when no input requires one.
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward);
  Var record(Tensor value, const std::vector<Var>& inputs, BackwardFn backward);

  /// Populates gradients of every requires_grad node with dLoss/dNode.
  /// Throws ShapeError unless `loss` holds exactly one element.
  void backward(Var loss);

  const Tensor& value(Var v) const;
  const Tensor& grad(Var v) const;
  bool requires_grad(Var v) const;

  /// Mutable gradient buffer for use inside BackwardFn; zero-initialized on
  /// first access.
  Tensor& grad_buffer(Var v);

  std::size_t size() const { return nodes_.size(); }
  /// Number of op adjoints executed by the most recent backward().
  std::size_t backward_visits() const { return backward_visits_; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Var push(Tensor value, bool requires_grad, BackwardFn backward);
  void check_owned(Var v) const;

  std::vector<Node> nodes_;
  std::size_t backward_visits_ = 0;
};

}  // namespace dgann
