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

#include "dgann/dataset.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dgann/bond_perception.h"
#include "dgann/sdf.h"

namespace dgann {
namespace {

namespace fs = std::filesystem;

std::vector<fs::path> files_with_extension(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool same_atoms(const Molecule& a, const Molecule& b) {
  if (a.atoms.size() != b.atoms.size()) return false;
  for (std::size_t i = 0; i < a.atoms.size(); ++i) {
    if (a.atoms[i].element != b.atoms[i].element) return false;
  }
  return true;
}

void apply_feature_overrides(Dataset& ds, const fs::path& dir) {
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const fs::path file = dir / (ds.molecules[i].id + ".csv");
    if (!fs::exists(file)) continue;
    try {
      ds.features[i].atoms =
          parse_atom_feature_csv(read_text_file(file), ds.molecules[i].atoms.size());
    } catch (const ParseError& e) {
      throw ParseError(file.string() + ": " + e.detail(), e.line());
    }
  }
}

}  // namespace

std::vector<double> Dataset::target_column(Target t) const {
  if (!has_targets()) throw std::invalid_argument("dataset has no target values");
  std::vector<double> out;
  out.reserve(targets.size());
  for (const auto& row : targets) out.push_back(row[static_cast<std::size_t>(t)]);
  return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  for (std::size_t i : indices) {
    if (i >= size()) throw std::out_of_range("dataset index " + std::to_string(i));
    out.molecules.push_back(molecules[i]);
    out.features.push_back(features[i]);
    if (has_targets()) out.targets.push_back(targets[i]);
  }
  return out;
}

Dataset make_dataset(std::vector<QM9Record> records, const AtomRefTable* atomref) {
  Dataset ds;
  ds.molecules.reserve(records.size());
  for (QM9Record& r : records) {
    std::array<double, kNumTargets> row{};
    for (std::size_t t = 0; t < kNumTargets; ++t) {
      row[t] = r.target(static_cast<Target>(t), atomref);
      if (!std::isfinite(row[t])) {
        throw std::invalid_argument("record '" + r.molecule.id + "' has a non-finite " +
                                    std::string(target_name(static_cast<Target>(t))));
      }
    }
    validate_molecule(r.molecule);
    ds.features.push_back(featurize(r.molecule));
    ds.molecules.push_back(std::move(r.molecule));
    ds.targets.push_back(row);
  }
  return ds;
}

Dataset make_dataset(std::vector<Molecule> molecules) {
  Dataset ds;
  for (Molecule& m : molecules) {
    validate_molecule(m);
    ds.features.push_back(featurize(m));
    ds.molecules.push_back(std::move(m));
  }
  return ds;
}

Dataset load_dataset(const fs::path& path, const DatasetOptions& options) {
  std::vector<fs::path> xyz_files;
  std::vector<fs::path> sdf_files;
  if (fs::is_directory(path)) {
    xyz_files = files_with_extension(path, ".xyz");
    sdf_files = files_with_extension(path, ".sdf");
  } else if (fs::is_regular_file(path)) {
    (path.extension() == ".sdf" ? sdf_files : xyz_files).push_back(path);
  } else {
    throw std::runtime_error("no such file or directory: " + path.string());
  }

  std::vector<Molecule> sdf_molecules;
  for (const fs::path& f : sdf_files) {
    auto mols = read_sdf_file(f);
    std::move(mols.begin(), mols.end(), std::back_inserter(sdf_molecules));
  }

  Dataset ds;
  if (xyz_files.empty()) {
    if (sdf_molecules.empty()) {
      throw std::runtime_error("no molecules found in " + path.string());
    }
    ds = make_dataset(std::move(sdf_molecules));
  } else {
    std::map<std::string, const Molecule*> by_id;
    for (const Molecule& m : sdf_molecules) by_id.emplace(m.id, &m);
    std::vector<QM9Record> records;
    for (const fs::path& f : xyz_files) {
      auto recs = read_qm9_xyz_file(f, Qm9ParseOptions{.perceive_bonds = false});
      for (QM9Record& r : recs) {
        const auto it = by_id.find(r.molecule.id);
        if (it != by_id.end() && same_atoms(*it->second, r.molecule)) {
          r.molecule.bonds = it->second->bonds;
        } else {
          r.molecule.bonds = perceive_bonds(r.molecule);
        }
        records.push_back(std::move(r));
      }
    }
    if (records.empty()) throw std::runtime_error("no QM9 records found in " + path.string());
    std::optional<AtomRefTable> atomref;
    if (options.atomref_path) atomref = parse_atomref_csv(read_text_file(*options.atomref_path));
    ds = make_dataset(std::move(records), atomref ? &*atomref : nullptr);
  }
  if (options.feature_dir) apply_feature_overrides(ds, *options.feature_dir);
  return ds;
}

}  // namespace dgann
