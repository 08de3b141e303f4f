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

#include "dgann/preprocess.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dgann/geometry.h"
#include "dgann/log.h"
#include "text_util.h"

namespace dgann {

std::vector<SpeciesCounts> species_count_matrix(const Dataset& ds) {
  std::vector<SpeciesCounts> out;
  out.reserve(ds.size());
  for (const Molecule& m : ds.molecules) out.push_back(species_counts(m));
  return out;
}

double LsmModel::baseline(const SpeciesCounts& counts) const {
  if (!fitted) throw std::logic_error("LSM model is not fitted");
  double b = theta[kNumElements];
  for (std::size_t s = 0; s < kNumElements; ++s) b += counts[s] * theta[s];
  return b;
}

double LsmModel::residualize(const SpeciesCounts& counts, double y) const {
  return y - baseline(counts);
}

double LsmModel::inverse(const SpeciesCounts& counts, double residual) const {
  return residual + baseline(counts);
}

LsmModel fit_lsm(std::span<const SpeciesCounts> counts, std::span<const double> targets) {
  constexpr std::size_t kCols = kNumElements + 1;
  if (counts.size() != targets.size()) {
    throw std::invalid_argument("fit_lsm: counts and targets differ in length");
  }
  if (counts.size() < kCols) {
    throw std::invalid_argument("fit_lsm: need at least 6 rows, got " +
                                std::to_string(counts.size()));
  }
  const auto n = static_cast<Eigen::Index>(counts.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(kCols));
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < kNumElements; ++s) {
      x(i, static_cast<Eigen::Index>(s)) = counts[static_cast<std::size_t>(i)][s];
    }
    x(i, static_cast<Eigen::Index>(kNumElements)) = 1.0;
    y(i) = targets[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd theta;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() == static_cast<Eigen::Index>(kCols)) {
    theta = qr.solve(y);
  } else {
    warn("fit_lsm: design matrix has rank " + std::to_string(qr.rank()) +
         " < 6; using the minimum-norm solution");
    theta = x.completeOrthogonalDecomposition().solve(y);
  }
  LsmModel m;
  for (std::size_t k = 0; k < kCols; ++k) m.theta[k] = theta(static_cast<Eigen::Index>(k));
  m.fitted = true;
  return m;
}

double TargetTransform::forward(const SpeciesCounts& counts, double y) const {
  const double r = lsm ? lsm->residualize(counts, y) : y;
  return (r - mean) / std;
}

double TargetTransform::inverse(const SpeciesCounts& counts, double z) const {
  const double r = z * std + mean;
  return lsm ? lsm->inverse(counts, r) : r;
}

TargetTransform fit_target_transform(Target target, std::span<const SpeciesCounts> counts,
                                     std::span<const double> values,
                                     std::optional<bool> use_lsm, bool standardize) {
  if (counts.size() != values.size() || values.empty()) {
    throw std::invalid_argument("fit_target_transform: need matching, non-empty inputs");
  }
  TargetTransform t;
  t.target = target;
  if (use_lsm.value_or(uses_lsm(target))) t.lsm = fit_lsm(counts, values);
  if (standardize) {
    std::vector<double> r(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      r[i] = t.lsm ? t.lsm->residualize(counts[i], values[i]) : values[i];
    }
    const double n = static_cast<double>(r.size());
    t.mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
    double var = 0.0;
    for (double v : r) var += (v - t.mean) * (v - t.mean);
    t.std = std::sqrt(var / n);
    if (!(t.std > 0.0)) t.std = 1.0;
  }
  return t;
}

DatasetSplit split_dataset(std::size_t n, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("split_dataset: need at least 3 rows");
  DatasetSplit s;
  s.seed = seed;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw so the permutation does not depend
  // on the standard library's shuffle implementation.
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng() % (i + 1)]);
  }
  const auto n_holdout = static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(n)));
  const std::size_t n_train = n - 2 * n_holdout;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
               order.begin() + static_cast<std::ptrdiff_t>(n_train + n_holdout));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_holdout), order.end());
  return s;
}

std::string write_split_manifest(const DatasetSplit& split) {
  const std::size_t n = split.train.size() + split.val.size() + split.test.size();
  std::vector<const char*> label(n, nullptr);
  for (std::size_t i : split.train) label.at(i) = "train";
  for (std::size_t i : split.val) label.at(i) = "val";
  for (std::size_t i : split.test) label.at(i) = "test";
  std::string out = "index,split\n";
  for (std::size_t i = 0; i < n; ++i) {
    out += std::to_string(i) + "," + label[i] + "\n";
  }
  return out;
}

DatasetSplit parse_split_manifest(std::string_view text, std::size_t n) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines[0]) != "index,split") {
    throw ParseError("split manifest header must be index,split", 1);
  }
  DatasetSplit s;
  std::vector<bool> seen(n, false);
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto line = detail::trim(lines[ln]);
    if (line.empty()) continue;
    const auto cells = detail::split_char(line, ',');
    double idx_value = 0.0;
    if (cells.size() != 2 || !detail::parse_double(cells[0], idx_value) || idx_value < 0 ||
        idx_value != std::floor(idx_value)) {
      throw ParseError("expected 'index,split'", ln + 1);
    }
    const auto idx = static_cast<std::size_t>(idx_value);
    if (idx >= n) throw ParseError("index " + std::to_string(idx) + " out of range", ln + 1);
    if (seen[idx]) throw ParseError("index " + std::to_string(idx) + " listed twice", ln + 1);
    seen[idx] = true;
    const auto name = detail::trim(cells[1]);
    if (name == "train") {
      s.train.push_back(idx);
    } else if (name == "val") {
      s.val.push_back(idx);
    } else if (name == "test") {
      s.test.push_back(idx);
    } else {
      throw ParseError("unknown split '" + std::string(name) + "'", ln + 1);
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ParseError("split manifest does not cover all " + std::to_string(n) + " rows", 0);
  }
  return s;
}

std::mt19937_64 epoch_rng(std::uint64_t seed, std::size_t epoch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), 0x5eedU};
  return std::mt19937_64(seq);
}

std::vector<Batch> make_batches(const Dataset& ds, std::span<const std::size_t> indices,
                                std::span<const double> targets, const BatchOptions& options,
                                std::mt19937_64& rng) {
  if (options.batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!targets.empty() && targets.size() != ds.size()) {
    throw std::invalid_argument("make_batches: one target per dataset row required");
  }
  std::vector<std::size_t> order(indices.begin(), indices.end());
  if (options.shuffle) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng() % i]);
    }
  }
  std::uniform_real_distribution<double> shift(-options.translation, options.translation);
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
    const std::size_t end = std::min(order.size(), start + options.batch_size);
    Batch b;
    std::vector<DirectedEdgeGraph> graphs;
    for (std::size_t k = start; k < end; ++k) {
      const std::size_t row = order[k];
      Molecule m = center_molecule(ds.molecules.at(row));
      if (options.augment) m = random_rotation(std::move(m), rng);
      if (options.translation > 0.0) m = translate_molecule(std::move(m), {shift(rng), shift(rng), shift(rng)});
      graphs.push_back(build_directed_graph(m, ds.features[row]));
      b.indices.push_back(row);
      b.atom_counts.push_back(m.atoms.size());
      if (!targets.empty()) b.targets.push_back(targets[row]);
    }
    b.graph = make_graph_batch(graphs);
    batches.push_back(std::move(b));
  }
  return batches;
}

}  // namespace dgann
