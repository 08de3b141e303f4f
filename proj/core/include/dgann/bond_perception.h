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

#include "dgann/molecule.h"

namespace dgann {

/// Single-bond covalent radius in Angstrom.
double covalent_radius(Element e);

/// Neutral valence used to saturate perceived bonds (H 1, C 4, N 3, O 2, F 1).
int default_valence(Element e);

/// Scale applied to the summed covalent radii when deciding connectivity.
inline constexpr double kBondToleranceFactor = 1.15;

/// Derives bonds from coordinates for inputs that carry no bond table.
///
/// Atoms closer than kBondToleranceFactor * (r_a + r_b) are bonded. Orders
/// are then raised to saturate neutral valences, searching exhaustively
/// over multiple-bond assignments and keeping the first one with the least
/// unsatisfied valence. The result is a Kekule structure: no bond is ever
/// marked aromatic. Bonds are listed with a < b in lexicographic order.
std::vector<Bond> perceive_bonds(const Molecule& m);

}  // namespace dgann
