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

#include "dgann/model.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dgann/geometry.h"

namespace dgann {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void add_mlp_shapes(std::vector<std::pair<std::string, Shape>>& out, const std::string& prefix,
                    const std::vector<std::pair<std::size_t, std::size_t>>& layers) {
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const std::string stage = prefix + "." + std::to_string(k + 1);
    out.emplace_back(stage + ".w", Shape{layers[k].first, layers[k].second});
    out.emplace_back(stage + ".ln.gain", Shape{layers[k].first});
    out.emplace_back(stage + ".ln.bias", Shape{layers[k].first});
  }
}

void add_attention_shapes(std::vector<std::pair<std::string, Shape>>& out,
                          const std::string& prefix, const ModelConfig& c) {
  const std::size_t d = c.d_model;
  for (std::size_t h = 0; h < c.n_heads; ++h) {
    const std::string head = prefix + ".head." + std::to_string(h);
    out.emplace_back(head + ".wq", Shape{c.d_out(), d});
    out.emplace_back(head + ".wk", Shape{c.d_out(), d});
    out.emplace_back(head + ".wv", Shape{c.d_out(), d});
  }
  const std::size_t hidden = c.ffn_multiplier * d;
  out.emplace_back(prefix + ".w0", Shape{d, d});
  out.emplace_back(prefix + ".ln_attn.gain", Shape{d});
  out.emplace_back(prefix + ".ln_attn.bias", Shape{d});
  out.emplace_back(prefix + ".ffn.w1", Shape{hidden, d});
  out.emplace_back(prefix + ".ffn.b1", Shape{hidden});
  out.emplace_back(prefix + ".ffn.w2", Shape{d, hidden});
  out.emplace_back(prefix + ".ln_ffn.gain", Shape{d});
  out.emplace_back(prefix + ".ln_ffn.bias", Shape{d});
}

}  // namespace

void ModelConfig::validate() const {
  if (d_model == 0 || n_heads == 0 || n_interaction == 0 || n_transformer == 0 ||
      ffn_multiplier == 0) {
    throw std::invalid_argument("model dimensions and block counts must be at least 1");
  }
  if (d_model % n_heads != 0) {
    throw std::invalid_argument("d_model " + std::to_string(d_model) +
                                " is not divisible by " + std::to_string(n_heads) + " heads");
  }
  if (d_out() < 2) {
    throw std::invalid_argument("per-head width d_model / n_heads must be at least 2");
  }
}

GraphBatch make_graph_batch(std::span<const DirectedEdgeGraph> graphs) {
  GraphBatch b;
  b.num_molecules = graphs.size();
  for (const DirectedEdgeGraph& g : graphs) {
    if (g.num_atoms == 0) throw std::invalid_argument("molecule without atoms in batch");
    b.atom_offsets.push_back(b.atom_offsets.back() + g.num_atoms);
    b.edge_offsets.push_back(b.edge_offsets.back() + g.num_edges());
    b.padded_length = std::max(b.padded_length, g.num_atoms);
  }
  b.num_atoms = b.atom_offsets.back();
  b.num_edges = b.edge_offsets.back();
  const std::size_t n_mol = b.num_molecules;
  const std::size_t n_edges = b.num_edges;

  b.edge_inputs = Tensor(Shape{n_edges, kEdgeInputDim});
  b.edge_vectors = Tensor(Shape{n_edges, 3});
  b.atom_features = Tensor(Shape{b.num_atoms, kAtomFeatureDim});
  b.positions = Tensor(Shape{b.num_atoms, 3});
  b.mask.assign(n_mol * b.padded_length, 0);

  std::vector<std::size_t> members;
  for (std::size_t m = 0; m < n_mol; ++m) {
    const DirectedEdgeGraph& g = graphs[m];
    const std::size_t eoff = b.edge_offsets[m];
    const std::size_t aoff = b.atom_offsets[m];
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      double* row = b.edge_inputs.row(eoff + e).data();
      std::copy(g.bond_features[e].begin(), g.bond_features[e].end(), row);
      const AtomFeatures& src = g.atom_features[g.source[e]];
      std::copy(src.begin(), src.end(), row + kBondFeatureDim);
      std::copy(g.vectors[e].begin(), g.vectors[e].end(), b.edge_vectors.row(eoff + e).data());
      members.clear();
      for (std::size_t k : g.incoming[e]) members.push_back(eoff + k);
      members.push_back(n_edges + eoff + e);
      b.interaction_groups.push_group(members);
    }
    for (std::size_t i = 0; i < g.num_atoms; ++i) {
      std::copy(g.atom_features[i].begin(), g.atom_features[i].end(),
                b.atom_features.row(aoff + i).data());
      std::copy(g.positions[i].begin(), g.positions[i].end(), b.positions.row(aoff + i).data());
      b.mask[m * b.padded_length + i] = 1;
    }
  }
  for (std::size_t m = 0; m < n_mol; ++m) {
    const DirectedEdgeGraph& g = graphs[m];
    for (std::size_t i = 0; i < g.num_atoms; ++i) {
      members.clear();
      for (std::size_t k : g.edges_into[i]) members.push_back(b.edge_offsets[m] + k);
      members.push_back(n_edges + b.atom_offsets[m] + i);
      b.output_groups.push_group(members);
    }
  }

  // Readout tokens: rows [0, B) are [CLS], row B + a is global atom a.
  std::vector<std::vector<std::size_t>> token_groups(n_mol);
  for (std::size_t m = 0; m < n_mol; ++m) {
    token_groups[m].push_back(m);
    for (std::size_t p = 0; p < b.padded_length; ++p) {
      if (b.mask[m * b.padded_length + p]) token_groups[m].push_back(n_mol + b.atom_offsets[m] + p);
    }
  }
  for (std::size_t m = 0; m < n_mol; ++m) b.readout_groups.push_group(token_groups[m]);
  for (std::size_t m = 0; m < n_mol; ++m) {
    for (std::size_t i = b.atom_offsets[m]; i < b.atom_offsets[m + 1]; ++i) {
      b.readout_groups.push_group(token_groups[m]);
    }
  }
  return b;
}

std::vector<std::pair<std::string, Shape>> DgannModel::parameter_shapes(const ModelConfig& c) {
  c.validate();
  const std::size_t d = c.d_model;
  const std::size_t o = c.d_out();
  std::vector<std::pair<std::string, Shape>> out;
  add_mlp_shapes(out, "edge_embed.chem", {{o, kEdgeInputDim}, {d, o}});
  add_mlp_shapes(out, "edge_embed.geom", {{o, 3}, {o, o}, {d, o}});
  for (std::size_t l = 0; l < c.n_interaction; ++l) {
    add_attention_shapes(out, "interaction." + std::to_string(l), c);
  }
  add_mlp_shapes(out, "output.atom_embed", {{o, kAtomFeatureDim}, {d, o}});
  add_attention_shapes(out, "output", c);
  add_mlp_shapes(out, "readout.pos_embed", {{o, 3}, {o, o}, {d, o}});
  out.emplace_back("readout.cls", Shape{d});
  for (std::size_t l = 0; l < c.n_transformer; ++l) {
    add_attention_shapes(out, "transformer." + std::to_string(l), c);
  }
  out.emplace_back("head.w1", Shape{d, d});
  out.emplace_back("head.b1", Shape{d});
  out.emplace_back("head.w2", Shape{1, d});
  out.emplace_back("head.b2", Shape{1});
  return out;
}

DgannModel::DgannModel(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  std::mt19937_64 rng(seed);
  for (auto& [name, shape] : parameter_shapes(config_)) {
    Tensor t(shape, 0.0);
    if (ends_with(name, ".gain")) {
      t.fill(1.0);
    } else if (name == "readout.cls") {
      std::normal_distribution<double> normal(0.0, 1.0);
      double norm = 0.0;
      for (double& v : t.values()) {
        v = normal(rng);
        norm += v * v;
      }
      norm = std::sqrt(norm);
      for (double& v : t.values()) v /= norm;
    } else if (shape.size() == 2) {
      const double bound = std::sqrt(6.0 / static_cast<double>(shape[0] + shape[1]));
      std::uniform_real_distribution<double> uniform(-bound, bound);
      for (double& v : t.values()) v = uniform(rng);
    }
    params_.add(name, std::move(t));
  }
  index_parameters();
}

DgannModel::DgannModel(const ModelConfig& config, ParameterSet parameters)
    : config_(config), params_(std::move(parameters)) {
  const auto shapes = parameter_shapes(config_);
  if (shapes.size() != params_.size()) {
    throw std::invalid_argument("expected " + std::to_string(shapes.size()) +
                                " parameters, found " + std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (params_[i].name != shapes[i].first || params_[i].value.shape() != shapes[i].second) {
      throw std::invalid_argument("parameter " + std::to_string(i) + " is '" + params_[i].name +
                                  "' " + shape_string(params_[i].value.shape()) + ", expected '" +
                                  shapes[i].first + "' " + shape_string(shapes[i].second));
    }
  }
  index_parameters();
}

void DgannModel::index_parameters() {
  auto mlp_of = [&](const std::string& prefix, std::size_t stages) {
    Mlp m;
    for (std::size_t k = 1; k <= stages; ++k) {
      const std::string stage = prefix + "." + std::to_string(k);
      m.weights.push_back(params_.index(stage + ".w"));
      m.gains.push_back(params_.index(stage + ".ln.gain"));
      m.biases.push_back(params_.index(stage + ".ln.bias"));
    }
    return m;
  };
  auto block_of = [&](const std::string& prefix) {
    AttentionBlock b;
    for (std::size_t h = 0; h < config_.n_heads; ++h) {
      const std::string head = prefix + ".head." + std::to_string(h);
      b.wq.push_back(params_.index(head + ".wq"));
      b.wk.push_back(params_.index(head + ".wk"));
      b.wv.push_back(params_.index(head + ".wv"));
    }
    b.w0 = params_.index(prefix + ".w0");
    b.ln_attn_gain = params_.index(prefix + ".ln_attn.gain");
    b.ln_attn_bias = params_.index(prefix + ".ln_attn.bias");
    b.w1 = params_.index(prefix + ".ffn.w1");
    b.b1 = params_.index(prefix + ".ffn.b1");
    b.w2 = params_.index(prefix + ".ffn.w2");
    b.ln_ffn_gain = params_.index(prefix + ".ln_ffn.gain");
    b.ln_ffn_bias = params_.index(prefix + ".ln_ffn.bias");
    return b;
  };
  edge_chem_ = mlp_of("edge_embed.chem", 2);
  edge_geom_ = mlp_of("edge_embed.geom", 3);
  atom_embed_ = mlp_of("output.atom_embed", 2);
  pos_embed_ = mlp_of("readout.pos_embed", 3);
  interaction_.clear();
  for (std::size_t l = 0; l < config_.n_interaction; ++l) {
    interaction_.push_back(block_of("interaction." + std::to_string(l)));
  }
  output_ = block_of("output");
  transformer_.clear();
  for (std::size_t l = 0; l < config_.n_transformer; ++l) {
    transformer_.push_back(block_of("transformer." + std::to_string(l)));
  }
  cls_ = params_.index("readout.cls");
  head_w1_ = params_.index("head.w1");
  head_b1_ = params_.index("head.b1");
  head_w2_ = params_.index("head.w2");
  head_b2_ = params_.index("head.b2");
}

Var DgannModel::mlp(std::span<const Var> p, const Mlp& m, Var x) const {
  for (std::size_t k = 0; k < m.weights.size(); ++k) {
    if (k > 0) x = ops::gelu(x);
    x = ops::layer_norm(ops::linear(x, p[m.weights[k]]), p[m.gains[k]], p[m.biases[k]]);
  }
  return x;
}

Var DgannModel::maybe_dropout(Var x, const ForwardOptions& options) const {
  if (options.dropout <= 0.0) return x;
  if (!options.rng) throw std::invalid_argument("dropout requires a random generator");
  return ops::dropout(x, options.dropout, *options.rng);
}

Var DgannModel::attention(std::span<const Var> p, const AttentionBlock& blk, Var query_in,
                          Var kv_in, const ops::Segments& groups, const ForwardOptions& options,
                          Tensor* weights) const {
  auto stacked = [&](const std::vector<std::size_t>& ids) {
    std::vector<Var> parts;
    parts.reserve(ids.size());
    for (std::size_t id : ids) parts.push_back(p[id]);
    return ops::concat_rows(parts);
  };
  const Var q = ops::linear(query_in, stacked(blk.wq));
  const Var k = ops::linear(kv_in, stacked(blk.wk));
  const Var v = ops::linear(kv_in, stacked(blk.wv));
  const Var heads = ops::segment_attend(q, k, v, groups, config_.n_heads, weights);
  const Var mixed = maybe_dropout(ops::linear(heads, p[blk.w0]), options);
  const Var m = ops::layer_norm(mixed, p[blk.ln_attn_gain], p[blk.ln_attn_bias]);
  const Var hidden = ops::gelu(ops::linear(m, p[blk.w1], p[blk.b1]));
  const Var ffn = maybe_dropout(ops::linear(hidden, p[blk.w2]), options);
  return ops::layer_norm(ops::add(m, ffn), p[blk.ln_ffn_gain], p[blk.ln_ffn_bias]);
}

Var DgannModel::init_edge_hidden(std::span<const Var> p, Var edge_inputs,
                                 Var edge_vectors) const {
  if (edge_inputs.value().cols() != kEdgeInputDim) {
    throw ShapeError("edge inputs must have " + std::to_string(kEdgeInputDim) + " columns, got " +
                     shape_string(edge_inputs.shape()));
  }
  if (edge_vectors.value().cols() != 3) {
    throw ShapeError("edge vectors must have 3 columns, got " +
                     shape_string(edge_vectors.shape()));
  }
  const Var chem = mlp(p, edge_chem_, edge_inputs);
  const Var geom = mlp(p, edge_geom_, edge_vectors);
  return ops::scale(ops::add(chem, geom), kInvSqrt2);
}

Var DgannModel::interaction_layer(std::span<const Var> p, std::size_t layer, Var h_prev, Var h0,
                                  const ops::Segments& groups, const ForwardOptions& options,
                                  Tensor* weights) const {
  const std::array<Var, 2> rows{h_prev, h0};
  return attention(p, interaction_.at(layer), h0, ops::concat_rows(rows), groups, options,
                   weights);
}

Var DgannModel::output_block(std::span<const Var> p, Var h_last, Var atom_features,
                             const ops::Segments& groups, const ForwardOptions& options,
                             Tensor* weights) const {
  const Var h_init = mlp(p, atom_embed_, atom_features);
  const std::array<Var, 2> rows{h_last, h_init};
  return attention(p, output_, h_init, ops::concat_rows(rows), groups, options, weights);
}

Var DgannModel::readout(std::span<const Var> p, Var h_atoms, Var positions,
                        const GraphBatch& batch, const ForwardOptions& options) const {
  if (batch.num_molecules == 0 || batch.num_atoms == 0) {
    throw std::invalid_argument("readout needs at least one real atom");
  }
  const Var pos = mlp(p, pos_embed_, positions);
  const Var h_input = ops::scale(ops::add(h_atoms, pos), kInvSqrt2);
  const std::vector<std::size_t> zeros(batch.num_molecules, 0);
  const std::array<Var, 2> rows{ops::gather_rows(p[cls_], zeros), h_input};
  Var tokens = ops::concat_rows(rows);
  for (std::size_t l = 0; l < transformer_.size(); ++l) {
    Tensor* w = nullptr;
    if (options.trace) w = &options.trace->transformer.emplace_back();
    tokens = attention(p, transformer_[l], tokens, tokens, batch.readout_groups, options, w);
  }
  std::vector<std::size_t> cls_rows(batch.num_molecules);
  std::iota(cls_rows.begin(), cls_rows.end(), 0);
  return ops::gather_rows(tokens, cls_rows);
}

Var DgannModel::head(std::span<const Var> p, Var fingerprints) const {
  const Var hidden = ops::gelu(ops::linear(fingerprints, p[head_w1_], p[head_b1_]));
  return ops::linear(hidden, p[head_w2_], p[head_b2_]);
}

ForwardResult DgannModel::forward(std::span<const Var> p, const GraphBatch& batch,
                                  const ForwardOptions& options) const {
  Tape& tape = *p.front().tape();
  const Var h0 = init_edge_hidden(p, tape.constant(batch.edge_inputs),
                                  tape.constant(batch.edge_vectors));
  Var h = h0;
  for (std::size_t l = 0; l < interaction_.size(); ++l) {
    Tensor* w = nullptr;
    if (options.trace) w = &options.trace->interaction.emplace_back();
    h = interaction_layer(p, l, h, h0, batch.interaction_groups, options, w);
  }
  const Var atoms = output_block(p, h, tape.constant(batch.atom_features), batch.output_groups,
                                 options, options.trace ? &options.trace->output : nullptr);
  ForwardResult r;
  r.fingerprints = readout(p, atoms, tape.constant(batch.positions), batch, options);
  r.predictions = head(p, r.fingerprints);
  return r;
}

template <typename Fn>
void DgannModel::run_batches(std::span<const Molecule> molecules,
                             std::span<const MoleculeFeatures> features, std::size_t batch_size,
                             Fn&& fn) const {
  if (molecules.size() != features.size()) {
    throw std::invalid_argument("molecule and feature counts differ");
  }
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  for (std::size_t start = 0; start < molecules.size(); start += batch_size) {
    const std::size_t end = std::min(molecules.size(), start + batch_size);
    std::vector<DirectedEdgeGraph> graphs;
    graphs.reserve(end - start);
    for (std::size_t i = start; i < end; ++i) {
      graphs.push_back(build_directed_graph(center_molecule(molecules[i]), features[i]));
    }
    const GraphBatch batch = make_graph_batch(graphs);
    Tape tape;
    const std::vector<Var> p = params_.bind(tape, false);
    fn(start, forward(p, batch));
  }
}

std::vector<double> DgannModel::predict(std::span<const Molecule> molecules,
                                        std::span<const MoleculeFeatures> features,
                                        std::size_t batch_size) const {
  std::vector<double> out(molecules.size());
  run_batches(molecules, features, batch_size, [&](std::size_t start, const ForwardResult& r) {
    const Tensor& y = r.predictions.value();
    for (std::size_t i = 0; i < y.size(); ++i) out[start + i] = y[i];
  });
  return out;
}

Tensor DgannModel::fingerprints(std::span<const Molecule> molecules,
                                std::span<const MoleculeFeatures> features,
                                std::size_t batch_size) const {
  Tensor out(Shape{molecules.size(), config_.d_model});
  run_batches(molecules, features, batch_size, [&](std::size_t start, const ForwardResult& r) {
    const Tensor& f = r.fingerprints.value();
    std::copy(f.values().begin(), f.values().end(), out.data() + start * config_.d_model);
  });
  return out;
}

}  // namespace dgann
