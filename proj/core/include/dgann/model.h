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

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "dgann/features.h"
#include "dgann/graph.h"
#include "dgann/molecule.h"
#include "dgann/ops.h"
#include "dgann/parameters.h"
#include "dgann/tape.h"

namespace dgann {

struct ModelConfig {
  std::size_t d_model = 512;
  std::size_t n_heads = 8;
  std::size_t n_interaction = 5;
  std::size_t n_transformer = 6;
  std::size_t ffn_multiplier = 2;

  std::size_t d_out() const { return d_model / n_heads; }
  /// Throws std::invalid_argument unless d_model is divisible by n_heads,
  /// d_out >= 2 (layer norm width) and every count is at least 1.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Several molecules flattened into one ragged batch.
///
/// Edges and atoms of molecule m occupy contiguous global ranges. The
/// readout sees B + N tokens: B [CLS] rows followed by all atoms. The
/// padded-sequence view (padded_length, mask) defines which tokens attend
/// to each other; padded slots are never materialized.
struct GraphBatch {
  std::size_t num_molecules = 0;
  std::size_t num_atoms = 0;
  std::size_t num_edges = 0;
  std::vector<std::size_t> atom_offsets{0};
  std::vector<std::size_t> edge_offsets{0};

  /// Largest atom count in the batch.
  std::size_t padded_length = 0;
  /// num_molecules x padded_length; 1 for real atoms, 0 for padding.
  std::vector<std::uint8_t> mask;

  Tensor edge_inputs;    // [E x 17]: bond one-hot, source atom features
  Tensor edge_vectors;   // [E x 3]
  Tensor atom_features;  // [N x 13]
  Tensor positions;      // [N x 3]

  /// Edge e attends over rows of [h_l; h0]: its incoming edges, then E + e.
  ops::Segments interaction_groups;
  /// Atom i attends over rows of [h_L; h_init]: edges into i, then E + i.
  ops::Segments output_groups;
  /// Token t attends over the [CLS] row and real atoms of its molecule.
  ops::Segments readout_groups;
};

GraphBatch make_graph_batch(std::span<const DirectedEdgeGraph> graphs);

/// Per-block attention weights captured during a forward pass, each
/// [nnz x heads] and aligned with the block's Segments indices.
struct AttentionTrace {
  std::vector<Tensor> interaction;
  Tensor output;
  std::vector<Tensor> transformer;
};

struct ForwardOptions {
  /// Dropout rate after each attention mixing and FFN stage (0 disables).
  double dropout = 0.0;
  std::mt19937_64* rng = nullptr;
  AttentionTrace* trace = nullptr;
};

struct ForwardResult {
  Var fingerprints;  // [B x d_model]
  Var predictions;   // [B x 1]
};

/// Directed graph attention network: edge embedding, interaction blocks,
/// output block, [CLS] transformer readout and a two-layer head.
class DgannModel {
 public:
  /// Random initialization: uniform(+-sqrt(6 / (fan_in + fan_out))) for
  /// matrices, zero biases, unit layer-norm gains, unit-norm [CLS].
  DgannModel(const ModelConfig& config, std::uint64_t seed);
  /// Adopts existing parameters; names and shapes must match `config`.
  DgannModel(const ModelConfig& config, ParameterSet parameters);

  const ModelConfig& config() const { return config_; }
  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }

  /// Parameter shapes implied by a configuration, in canonical order.
  static std::vector<std::pair<std::string, Shape>> parameter_shapes(const ModelConfig& config);

  // Building blocks. `p` is the result of parameters().bind(tape, ...).
  Var init_edge_hidden(std::span<const Var> p, Var edge_inputs, Var edge_vectors) const;
  Var interaction_layer(std::span<const Var> p, std::size_t layer, Var h_prev, Var h0,
                        const ops::Segments& groups, const ForwardOptions& options = {},
                        Tensor* weights = nullptr) const;
  Var output_block(std::span<const Var> p, Var h_last, Var atom_features,
                   const ops::Segments& groups, const ForwardOptions& options = {},
                   Tensor* weights = nullptr) const;
  /// Returns the [CLS] states, one row per molecule.
  Var readout(std::span<const Var> p, Var h_atoms, Var positions, const GraphBatch& batch,
              const ForwardOptions& options = {}) const;
  Var head(std::span<const Var> p, Var fingerprints) const;

  ForwardResult forward(std::span<const Var> p, const GraphBatch& batch,
                        const ForwardOptions& options = {}) const;

  /// Centers every molecule, then predicts in the model's (transformed)
  /// target space. `features` is aligned with `molecules`.
  std::vector<double> predict(std::span<const Molecule> molecules,
                              std::span<const MoleculeFeatures> features,
                              std::size_t batch_size = 64) const;
  /// [CLS] fingerprints of centered molecules, one row per molecule.
  Tensor fingerprints(std::span<const Molecule> molecules,
                      std::span<const MoleculeFeatures> features,
                      std::size_t batch_size = 64) const;

 private:
  struct Mlp {
    std::vector<std::size_t> weights;
    std::vector<std::size_t> gains;
    std::vector<std::size_t> biases;
  };
  struct AttentionBlock {
    std::vector<std::size_t> wq, wk, wv;
    std::size_t w0, ln_attn_gain, ln_attn_bias;
    std::size_t w1, b1, w2, ln_ffn_gain, ln_ffn_bias;
  };

  void index_parameters();
  Var mlp(std::span<const Var> p, const Mlp& m, Var x) const;
  Var attention(std::span<const Var> p, const AttentionBlock& blk, Var query_in, Var kv_in,
                const ops::Segments& groups, const ForwardOptions& options,
                Tensor* weights) const;
  Var maybe_dropout(Var x, const ForwardOptions& options) const;
  template <typename Fn>
  void run_batches(std::span<const Molecule> molecules, std::span<const MoleculeFeatures> features,
                   std::size_t batch_size, Fn&& fn) const;

  ModelConfig config_;
  ParameterSet params_;
  Mlp edge_chem_, edge_geom_, atom_embed_, pos_embed_;
  std::vector<AttentionBlock> interaction_;
  AttentionBlock output_;
  std::vector<AttentionBlock> transformer_;
  std::size_t cls_ = 0;
  std::size_t head_w1_ = 0, head_b1_ = 0, head_w2_ = 0, head_b2_ = 0;
};

}  // namespace dgann
