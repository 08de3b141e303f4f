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

#include "dgann/features.h"

#include <charconv>

#include "text_util.h"

namespace dgann {

const std::array<std::string_view, kAtomFeatureDim>& atom_feature_names() {
  static const std::array<std::string_view, kAtomFeatureDim> names = {
      "is_h",     "is_c",  "is_n", "is_o", "is_f", "atomic_number", "acceptor",
      "donor",    "aromatic", "sp", "sp2", "sp3",  "num_h"};
  return names;
}

BondFeatures bond_features(BondOrder order) {
  BondFeatures f{};
  f[static_cast<std::size_t>(order)] = 1.0;
  return f;
}

MoleculeFeatures featurize(const Molecule& m) {
  namespace af = atom_feature;
  const std::size_t n = m.atoms.size();
  std::vector<int> n_double(n, 0);
  std::vector<int> n_triple(n, 0);
  std::vector<int> n_aromatic(n, 0);
  std::vector<int> n_hydrogen(n, 0);

  MoleculeFeatures out;
  out.bonds.reserve(m.bonds.size());
  for (const Bond& b : m.bonds) {
    out.bonds.push_back(bond_features(b.order));
    for (std::size_t end : {b.a, b.b}) {
      if (b.order == BondOrder::kDouble) ++n_double[end];
      if (b.order == BondOrder::kTriple) ++n_triple[end];
      if (b.order == BondOrder::kAromatic) ++n_aromatic[end];
    }
    if (m.atoms[b.b].element == Element::kH) ++n_hydrogen[b.a];
    if (m.atoms[b.a].element == Element::kH) ++n_hydrogen[b.b];
  }

  out.atoms.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    AtomFeatures& f = out.atoms[i];
    f.fill(0.0);
    const Element e = m.atoms[i].element;
    f[af::kElementH + static_cast<std::size_t>(e)] = 1.0;
    f[af::kAtomicNumber] = atomic_number(e);
    const bool n_or_o = e == Element::kN || e == Element::kO;
    f[af::kAcceptor] = n_or_o ? 1.0 : 0.0;
    f[af::kDonor] = n_or_o && n_hydrogen[i] > 0 ? 1.0 : 0.0;
    f[af::kAromatic] = n_aromatic[i] > 0 ? 1.0 : 0.0;
    if (e == Element::kC || e == Element::kN || e == Element::kO) {
      if (n_triple[i] > 0 || n_double[i] >= 2) {
        f[af::kSp] = 1.0;
      } else if (n_aromatic[i] > 0 || n_double[i] == 1) {
        f[af::kSp2] = 1.0;
      } else {
        f[af::kSp3] = 1.0;
      }
    }
    f[af::kNumHydrogens] = n_hydrogen[i];
  }
  return out;
}

std::vector<AtomFeatures> parse_atom_feature_csv(std::string_view text, std::size_t n_atoms) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError("empty atom feature file", 1);
  const auto header = detail::split_char(detail::trim(lines[0]), ',');
  const auto& names = atom_feature_names();
  bool header_ok = header.size() == kAtomFeatureDim;
  for (std::size_t c = 0; header_ok && c < kAtomFeatureDim; ++c) {
    header_ok = detail::trim(header[c]) == names[c];
  }
  if (!header_ok) {
    std::string expected;
    for (std::size_t c = 0; c < kAtomFeatureDim; ++c) {
      if (c) expected += ",";
      expected += names[c];
    }
    throw ParseError("atom feature header must be " + expected, 1);
  }
  std::vector<AtomFeatures> atoms;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (detail::trim(lines[ln]).empty()) continue;
    const auto cells = detail::split_char(detail::trim(lines[ln]), ',');
    if (cells.size() != kAtomFeatureDim) {
      throw ParseError("expected " + std::to_string(kAtomFeatureDim) + " columns, found " +
                           std::to_string(cells.size()),
                       ln + 1);
    }
    AtomFeatures f{};
    for (std::size_t c = 0; c < kAtomFeatureDim; ++c) {
      if (!detail::parse_double(cells[c], f[c])) {
        throw ParseError("cannot parse feature '" + std::string(cells[c]) + "'", ln + 1);
      }
    }
    atoms.push_back(f);
  }
  if (atoms.size() != n_atoms) {
    throw ParseError("feature file has " + std::to_string(atoms.size()) + " rows for " +
                         std::to_string(n_atoms) + " atoms",
                     0);
  }
  return atoms;
}

std::string write_atom_feature_csv(const std::vector<AtomFeatures>& atoms) {
  std::string out;
  const auto& names = atom_feature_names();
  for (std::size_t c = 0; c < kAtomFeatureDim; ++c) {
    if (c) out += ",";
    out += names[c];
  }
  out += "\n";
  char buf[64];
  for (const AtomFeatures& f : atoms) {
    for (std::size_t c = 0; c < kAtomFeatureDim; ++c) {
      if (c) out += ",";
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), f[c]);
      out.append(buf, ptr);
    }
    out += "\n";
  }
  return out;
}

}  // namespace dgann
