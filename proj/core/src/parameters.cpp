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

#include "dgann/parameters.h"

#include <stdexcept>

namespace dgann {

std::size_t ParameterSet::add(std::string name, Tensor value) {
  if (!by_name_.emplace(name, params_.size()).second) {
    throw std::invalid_argument("duplicate parameter '" + name + "'");
  }
  params_.push_back(Parameter{std::move(name), std::move(value)});
  return params_.size() - 1;
}

std::size_t ParameterSet::index(const std::string& name) const {
  const auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return it->second;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const Parameter& p : params_) n += p.value.size();
  return n;
}

std::vector<Var> ParameterSet::bind(Tape& tape, bool trainable) const {
  std::vector<Var> vars;
  vars.reserve(params_.size());
  for (const Parameter& p : params_) {
    vars.push_back(trainable ? tape.variable(p.value) : tape.constant(p.value));
  }
  return vars;
}

}  // namespace dgann
