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

#include <vector>

#include "dgann/features.h"
#include "dgann/molecule.h"

namespace dgann {

/// Directed-edge view of a molecule.
///
/// Bond b yields edge 2b (bonds[b].a -> bonds[b].b) and edge 2b+1 in the
/// opposite direction, so reverse(e) == e ^ 1. For an edge j->i, the
/// incoming list holds every edge k->j with k != i: the non-backtracking
/// predecessors whose states flow into it.
struct DirectedEdgeGraph {
  std::size_t num_atoms = 0;
  std::vector<std::size_t> source;
  std::vector<std::size_t> target;
  std::vector<BondFeatures> bond_features;
  /// Target position minus source position.
  std::vector<Vec3> vectors;
  std::vector<std::vector<std::size_t>> incoming;
  /// Edges terminating at each atom, ascending.
  std::vector<std::vector<std::size_t>> edges_into;
  std::vector<AtomFeatures> atom_features;
  std::vector<Vec3> positions;

  std::size_t num_edges() const { return source.size(); }
  static std::size_t reverse(std::size_t e) { return e ^ 1U; }
};

/// `features` must come from the same molecule (one row per atom and bond).
DirectedEdgeGraph build_directed_graph(const Molecule& m, const MoleculeFeatures& features);

}  // namespace dgann
