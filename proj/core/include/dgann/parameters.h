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

#include <map>
#include <string>
#include <vector>

#include "dgann/tape.h"
#include "dgann/tensor.h"

namespace dgann {

struct Parameter {
  std::string name;
  Tensor value;
};

/// Ordered, named collection of model weights. The insertion order is the
/// canonical order for initialization, optimizer state and checkpoints.
class ParameterSet {
 public:
  /// Returns the index of the new parameter. Names must be unique.
  std::size_t add(std::string name, Tensor value);

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  std::size_t index(const std::string& name) const;
  bool contains(const std::string& name) const { return by_name_.count(name) != 0; }
  const Tensor& value(const std::string& name) const { return params_[index(name)].value; }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  /// Total number of scalars.
  std::size_t scalar_count() const;

  /// Records every parameter on `tape`, as variables when `trainable` and
  /// as constants otherwise. The result is aligned with the set.
  std::vector<Var> bind(Tape& tape, bool trainable) const;

  friend bool operator==(const ParameterSet& a, const ParameterSet& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].name != b[i].name || !(a[i].value == b[i].value)) return false;
    }
    return true;
  }

 private:
  std::vector<Parameter> params_;
  std::map<std::string, std::size_t> by_name_;
};

}  // namespace dgann
