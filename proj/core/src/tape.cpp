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

#include "dgann/tape.h"

#include <stdexcept>

namespace dgann {

const Tensor& Var::value() const { return tape_->value(*this); }
bool Var::requires_grad() const { return tape_->requires_grad(*this); }
const Tensor& Var::grad() const { return tape_->grad(*this); }

Var Tape::push(Tensor value, bool requires_grad, BackwardFn backward) {
  nodes_.push_back(Node{std::move(value), Tensor{}, requires_grad, std::move(backward)});
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::constant(Tensor value) { return push(std::move(value), false, {}); }

Var Tape::variable(Tensor value) { return push(std::move(value), true, {}); }

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
  bool needs = false;
  for (const Var& in : inputs) {
    check_owned(in);
    needs = needs || nodes_[in.id()].requires_grad;
  }
  return push(std::move(value), needs, needs ? std::move(backward) : BackwardFn{});
}

Var Tape::record(Tensor value, const std::vector<Var>& inputs, BackwardFn backward) {
  bool needs = false;
  for (const Var& in : inputs) {
    check_owned(in);
    needs = needs || nodes_[in.id()].requires_grad;
  }
  return push(std::move(value), needs, needs ? std::move(backward) : BackwardFn{});
}

void Tape::check_owned(Var v) const {
  if (v.tape() != this || v.id() >= nodes_.size()) {
    throw std::invalid_argument("Var does not belong to this tape");
  }
}

const Tensor& Tape::value(Var v) const {
  check_owned(v);
  return nodes_[v.id()].value;
}

bool Tape::requires_grad(Var v) const {
  check_owned(v);
  return nodes_[v.id()].requires_grad;
}

const Tensor& Tape::grad(Var v) const {
  check_owned(v);
  const Node& node = nodes_[v.id()];
  if (node.grad.empty() && !node.value.empty()) {
    // Not reached by the last backward pass: report zeros of the right shape.
    const_cast<Node&>(node).grad = Tensor(node.value.shape(), 0.0);
  }
  return node.grad;
}

Tensor& Tape::grad_buffer(Var v) {
  check_owned(v);
  Node& node = nodes_[v.id()];
  if (node.grad.empty()) node.grad = Tensor(node.value.shape(), 0.0);
  return node.grad;
}

void Tape::backward(Var loss) {
  check_owned(loss);
  if (nodes_[loss.id()].value.size() != 1) {
    throw ShapeError("backward() needs a scalar loss, got shape " +
                     shape_string(nodes_[loss.id()].value.shape()));
  }
  for (Node& node : nodes_) {
    if (node.requires_grad) {
      node.grad = Tensor(node.value.shape(), 0.0);
    } else {
      node.grad = Tensor{};
    }
  }
  backward_visits_ = 0;
  Node& root = nodes_[loss.id()];
  if (!root.requires_grad) return;
  root.grad.fill(1.0);
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.requires_grad || !node.backward) continue;
    // The closure may grow other nodes' grads but never this node's vector,
    // so the reference stays valid.
    node.backward(*this, node.grad);
    ++backward_visits_;
  }
}

}  // namespace dgann
