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

#include "dgann/molecule.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "dgann/log.h"

namespace dgann {

std::string_view element_symbol(Element e) {
  switch (e) {
    case Element::kH: return "H";
    case Element::kC: return "C";
    case Element::kN: return "N";
    case Element::kO: return "O";
    case Element::kF: return "F";
  }
  return "?";
}

int atomic_number(Element e) {
  switch (e) {
    case Element::kH: return 1;
    case Element::kC: return 6;
    case Element::kN: return 7;
    case Element::kO: return 8;
    case Element::kF: return 9;
  }
  return 0;
}

std::optional<Element> parse_element(std::string_view symbol) {
  for (Element e : kAllElements) {
    if (element_symbol(e) == symbol) return e;
  }
  return std::nullopt;
}

ParseError::ParseError(const std::string& message, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
      line_(line),
      detail_(message) {}

void validate_molecule(const Molecule& m) {
  if (m.atoms.empty()) {
    throw std::invalid_argument("molecule '" + m.id + "' has no atoms");
  }
  for (const Atom& a : m.atoms) {
    for (double c : a.position) {
      if (!std::isfinite(c)) {
        throw std::invalid_argument("molecule '" + m.id + "' has non-finite coordinates");
      }
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const Bond& b : m.bonds) {
    if (b.a >= m.atoms.size() || b.b >= m.atoms.size()) {
      throw std::invalid_argument("molecule '" + m.id + "' has a bond to a missing atom");
    }
    if (b.a == b.b) {
      throw std::invalid_argument("molecule '" + m.id + "' has a self bond");
    }
    if (!seen.emplace(std::min(b.a, b.b), std::max(b.a, b.b)).second) {
      throw std::invalid_argument("molecule '" + m.id + "' has a duplicate bond " +
                                  std::to_string(b.a + 1) + "-" + std::to_string(b.b + 1));
    }
  }
  if (!is_connected(m)) {
    warn("molecule '" + m.id + "' is not connected");
  }
}

bool is_connected(const Molecule& m) {
  const std::size_t n = m.atoms.size();
  if (n <= 1) return true;
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const Bond& b : m.bonds) {
    const std::size_t ra = find(b.a);
    const std::size_t rb = find(b.b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

std::array<double, kNumElements> species_counts(const Molecule& m) {
  std::array<double, kNumElements> counts{};
  for (const Atom& a : m.atoms) counts[static_cast<std::size_t>(a.element)] += 1.0;
  return counts;
}

}  // namespace dgann
