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

#include "dgann/bond_perception.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dgann {
namespace {

// Backtracking search over extra bond orders (0, +1, +2) for bonds whose
// endpoints both have spare valence.
class OrderSearch {
 public:
  OrderSearch(std::vector<std::size_t> candidates, std::vector<Bond>& bonds,
              std::vector<int> spare)
      : candidates_(std::move(candidates)), bonds_(bonds), spare_(std::move(spare)) {
    extra_.assign(candidates_.size(), 0);
    best_extra_ = extra_;
    best_deficit_ = total_spare();
  }

  void run() {
    descend(0);
    for (std::size_t c = 0; c < candidates_.size(); ++c) {
      bonds_[candidates_[c]].order = static_cast<BondOrder>(best_extra_[c]);
    }
  }

 private:
  int total_spare() const {
    int s = 0;
    for (int v : spare_) s += v;
    return s;
  }

  void descend(std::size_t c) {
    if (best_deficit_ == 0 || ++visits_ > kMaxVisits) return;
    if (c == candidates_.size()) {
      const int deficit = total_spare();
      if (deficit < best_deficit_) {
        best_deficit_ = deficit;
        best_extra_ = extra_;
      }
      return;
    }
    const Bond& b = bonds_[candidates_[c]];
    const int limit = std::min({2, spare_[b.a], spare_[b.b]});
    for (int k = limit; k >= 0; --k) {
      spare_[b.a] -= k;
      spare_[b.b] -= k;
      extra_[c] = k;
      descend(c + 1);
      spare_[b.a] += k;
      spare_[b.b] += k;
      if (best_deficit_ == 0) return;
    }
    extra_[c] = 0;
  }

  static constexpr std::size_t kMaxVisits = 2'000'000;

  std::vector<std::size_t> candidates_;
  std::vector<Bond>& bonds_;
  std::vector<int> spare_;
  std::vector<int> extra_;
  std::vector<int> best_extra_;
  int best_deficit_ = 0;
  std::size_t visits_ = 0;
};

}  // namespace

double covalent_radius(Element e) {
  switch (e) {
    case Element::kH: return 0.31;
    case Element::kC: return 0.76;
    case Element::kN: return 0.71;
    case Element::kO: return 0.66;
    case Element::kF: return 0.57;
  }
  return 0.0;
}

int default_valence(Element e) {
  switch (e) {
    case Element::kH: return 1;
    case Element::kC: return 4;
    case Element::kN: return 3;
    case Element::kO: return 2;
    case Element::kF: return 1;
  }
  return 0;
}

std::vector<Bond> perceive_bonds(const Molecule& m) {
  const std::size_t n = m.atoms.size();
  std::vector<Bond> bonds;
  std::vector<int> spare(n);
  for (std::size_t i = 0; i < n; ++i) spare[i] = default_valence(m.atoms[i].element);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        const double d = m.atoms[a].position[c] - m.atoms[b].position[c];
        d2 += d * d;
      }
      const double cutoff = kBondToleranceFactor * (covalent_radius(m.atoms[a].element) +
                                                    covalent_radius(m.atoms[b].element));
      if (d2 <= cutoff * cutoff) {
        bonds.push_back(Bond{a, b, BondOrder::kSingle});
        --spare[a];
        --spare[b];
      }
    }
  }
  std::vector<std::size_t> candidates;
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    if (spare[bonds[k].a] > 0 && spare[bonds[k].b] > 0) candidates.push_back(k);
  }
  for (int& s : spare) s = std::max(s, 0);
  if (!candidates.empty()) OrderSearch(std::move(candidates), bonds, std::move(spare)).run();
  return bonds;
}

}  // namespace dgann
