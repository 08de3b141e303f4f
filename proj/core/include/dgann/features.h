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

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "dgann/molecule.h"

namespace dgann {

inline constexpr std::size_t kAtomFeatureDim = 13;
inline constexpr std::size_t kBondFeatureDim = 4;
/// Width of the chemical input of an edge: bond one-hot then source atom.
inline constexpr std::size_t kEdgeInputDim = kBondFeatureDim + kAtomFeatureDim;

using AtomFeatures = std::array<double, kAtomFeatureDim>;
using BondFeatures = std::array<double, kBondFeatureDim>;

/// Column layout of AtomFeatures.
namespace atom_feature {
inline constexpr std::size_t kElementH = 0;  // one-hot H, C, N, O, F in 0..4
inline constexpr std::size_t kAtomicNumber = 5;
inline constexpr std::size_t kAcceptor = 6;
inline constexpr std::size_t kDonor = 7;
inline constexpr std::size_t kAromatic = 8;
inline constexpr std::size_t kSp = 9;
inline constexpr std::size_t kSp2 = 10;
inline constexpr std::size_t kSp3 = 11;
inline constexpr std::size_t kNumHydrogens = 12;
}  // namespace atom_feature

/// Header names, in column order, of the atom-feature CSV format.
const std::array<std::string_view, kAtomFeatureDim>& atom_feature_names();

struct MoleculeFeatures {
  std::vector<AtomFeatures> atoms;
  /// Aligned with Molecule::bonds.
  std::vector<BondFeatures> bonds;
};

/// Rule-based features:
///   acceptor  N or O
///   donor     N or O bonded to at least one H
///   aromatic  atom touches an aromatic bond
///   hybrid.   for C/N/O only: a triple bond or two or more double bonds
///             gives sp; an aromatic bond or exactly one double bond gives
///             sp2; anything else sp3
BondFeatures bond_features(BondOrder order);
MoleculeFeatures featurize(const Molecule& m);

/// Reads one molecule's precomputed atom features: a header row equal to
/// atom_feature_names() and one row per atom. Throws ParseError on a bad
/// header, a wrong column count or a row count different from `n_atoms`.
std::vector<AtomFeatures> parse_atom_feature_csv(std::string_view text, std::size_t n_atoms);
std::string write_atom_feature_csv(const std::vector<AtomFeatures>& atoms);

}  // namespace dgann
