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

#include "dgann/graph.h"

#include <stdexcept>

namespace dgann {

DirectedEdgeGraph build_directed_graph(const Molecule& m, const MoleculeFeatures& features) {
  if (features.atoms.size() != m.atoms.size() || features.bonds.size() != m.bonds.size()) {
    throw std::invalid_argument("features do not match molecule '" + m.id + "'");
  }
  DirectedEdgeGraph g;
  g.num_atoms = m.atoms.size();
  g.atom_features = features.atoms;
  g.positions.reserve(g.num_atoms);
  for (const Atom& a : m.atoms) g.positions.push_back(a.position);

  const std::size_t n_edges = 2 * m.bonds.size();
  g.source.reserve(n_edges);
  g.target.reserve(n_edges);
  g.bond_features.reserve(n_edges);
  g.vectors.reserve(n_edges);
  for (std::size_t b = 0; b < m.bonds.size(); ++b) {
    const Bond& bond = m.bonds[b];
    for (auto [s, t] : {std::pair{bond.a, bond.b}, std::pair{bond.b, bond.a}}) {
      g.source.push_back(s);
      g.target.push_back(t);
      g.bond_features.push_back(features.bonds[b]);
      Vec3 r;
      for (std::size_t c = 0; c < 3; ++c) r[c] = g.positions[t][c] - g.positions[s][c];
      g.vectors.push_back(r);
    }
  }

  g.edges_into.assign(g.num_atoms, {});
  for (std::size_t e = 0; e < n_edges; ++e) g.edges_into[g.target[e]].push_back(e);
  g.incoming.resize(n_edges);
  for (std::size_t e = 0; e < n_edges; ++e) {
    for (std::size_t k : g.edges_into[g.source[e]]) {
      if (k != DirectedEdgeGraph::reverse(e)) g.incoming[e].push_back(k);
    }
  }
  return g;
}

}  // namespace dgann
