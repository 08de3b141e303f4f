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
#include <filesystem>
#include <optional>
#include <vector>

#include "dgann/features.h"
#include "dgann/molecule.h"
#include "dgann/qm9_xyz.h"

namespace dgann {

struct DatasetOptions {
  /// Free-atom energy table; when set the *_atom targets are atomization
  /// energies, otherwise total energies.
  std::optional<std::filesystem::path> atomref_path;
  /// Directory of per-molecule atom feature files named <id>.csv that
  /// replace the rule-based atom features when present.
  std::optional<std::filesystem::path> feature_dir;
};

/// Molecules with features and, for QM9 inputs, all twelve targets.
struct Dataset {
  std::vector<Molecule> molecules;
  std::vector<MoleculeFeatures> features;
  /// Empty when the source carried no properties (plain SDF input).
  std::vector<std::array<double, kNumTargets>> targets;

  std::size_t size() const { return molecules.size(); }
  bool has_targets() const { return !targets.empty(); }
  std::vector<double> target_column(Target t) const;
  /// Rows `indices` in the given order.
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

/// Loads a dataset from a file or a directory.
///
/// A directory contributes every *.xyz file (QM9 records) and every *.sdf
/// file, in lexicographic file order. SDF records whose title equals a QM9
/// record's id ("gdb_<index>") and whose elements match atom for atom
/// supply that record's bonds; other QM9 records get perceived bonds. When
/// a directory holds no *.xyz files, or a single *.sdf file is given, the
/// SDF molecules themselves form a target-less dataset.
Dataset load_dataset(const std::filesystem::path& path, const DatasetOptions& options = {});

/// Builds a dataset directly from parsed records (bonds already attached).
Dataset make_dataset(std::vector<QM9Record> records, const AtomRefTable* atomref = nullptr);
Dataset make_dataset(std::vector<Molecule> molecules);

}  // namespace dgann
