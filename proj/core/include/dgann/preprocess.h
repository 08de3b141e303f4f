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
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dgann/dataset.h"
#include "dgann/model.h"
#include "dgann/qm9_xyz.h"

namespace dgann {

using SpeciesCounts = std::array<double, kNumElements>;

std::vector<SpeciesCounts> species_count_matrix(const Dataset& ds);

/// Linear baseline y ~ counts . theta[0..4] + theta[5] over species in
/// H, C, N, O, F order with a trailing bias term.
struct LsmModel {
  std::array<double, kNumElements + 1> theta{};
  bool fitted = false;

  double baseline(const SpeciesCounts& counts) const;
  double residualize(const SpeciesCounts& counts, double y) const;
  double inverse(const SpeciesCounts& counts, double residual) const;
};

/// Least-squares fit by column-pivoted QR. A rank-deficient design (for
/// example a species that never occurs) triggers a warning and the minimum
/// norm solution. Throws std::invalid_argument for fewer than 6 rows.
LsmModel fit_lsm(std::span<const SpeciesCounts> counts, std::span<const double> targets);

/// Optional LSM residual followed by standardization, both fitted on the
/// training split. Values are mapped y -> ((y - baseline) - mean) / std.
struct TargetTransform {
  Target target = Target::kMu;
  std::optional<LsmModel> lsm;
  double mean = 0.0;
  double std = 1.0;

  double forward(const SpeciesCounts& counts, double y) const;
  double inverse(const SpeciesCounts& counts, double z) const;
};

/// LSM is applied when `use_lsm` (default: the target's convention).
TargetTransform fit_target_transform(Target target, std::span<const SpeciesCounts> counts,
                                     std::span<const double> values,
                                     std::optional<bool> use_lsm = std::nullopt,
                                     bool standardize = true);

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

/// Seeded shuffle of 0..n-1. Validation and test each receive round(0.05 n)
/// rows; training receives the rest.
DatasetSplit split_dataset(std::size_t n, std::uint64_t seed);

/// CSV "index,split" with split in {train, val, test}, sorted by index.
std::string write_split_manifest(const DatasetSplit& split);
/// Every index in 0..n-1 must appear exactly once.
DatasetSplit parse_split_manifest(std::string_view text, std::size_t n);

struct BatchOptions {
  std::size_t batch_size = 64;
  bool shuffle = true;
  /// Random rotation after centering.
  bool augment = false;
  /// Half-width in Angstrom of a uniform random shift after centering and
  /// rotation. Off by default; it hampers convergence.
  double translation = 0.0;
};

struct Batch {
  /// Dataset rows in batch order.
  std::vector<std::size_t> indices;
  std::vector<std::size_t> atom_counts;
  GraphBatch graph;
  /// Transformed targets aligned with indices (empty without targets).
  std::vector<double> targets;
};

/// One pass over `indices`. Every molecule is centered; it is also
/// rotated when options.augment. `targets`, when non-empty, holds one
/// transformed value per dataset row.
std::vector<Batch> make_batches(const Dataset& ds, std::span<const std::size_t> indices,
                                std::span<const double> targets, const BatchOptions& options,
                                std::mt19937_64& rng);

/// Generator for epoch e of a run seeded with `seed`; independent of how
/// many random numbers earlier epochs consumed.
std::mt19937_64 epoch_rng(std::uint64_t seed, std::size_t epoch);

}  // namespace dgann
