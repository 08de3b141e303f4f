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

#include "dgann/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "dgann/features.h"
#include "dgann/geometry.h"
#include "dgann/ops.h"

namespace dgann {
namespace {

// sum(x * weights) recorded without an op-kind hook, so that perturbing an
// adjoint only affects the op under test.
Var project(Var x, const Tensor& weights) {
  const Tensor& xv = x.value();
  if (xv.size() != weights.size()) throw ShapeError("projection size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) total += xv[i] * weights[i];
  return x.tape()->record(Tensor::scalar(total), {x}, [x, weights](Tape& t, const Tensor& g) {
    const double s = g.item();
    Tensor& gx = t.grad_buffer(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += s * weights[i];
  });
}

Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = u(rng);
  return t;
}

double evaluate_projection(const std::vector<Tensor>& inputs, const GraphFn& fn,
                           const Tensor& weights) {
  Tape tape;
  std::vector<Var> vars;
  for (const Tensor& t : inputs) vars.push_back(tape.constant(t));
  return project(fn(tape, vars), weights).value().item();
}

}  // namespace

double gradcheck_relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradcheckResult check_gradient(const std::string& name, const std::vector<Tensor>& inputs,
                               const GraphFn& fn, const GradcheckOptions& options) {
  std::mt19937_64 rng(options.seed ^ std::hash<std::string>{}(name));
  Tensor weights;
  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    for (const Tensor& t : inputs) vars.push_back(tape.variable(t));
    const Var out = fn(tape, vars);
    weights = random_tensor(out.shape(), rng);
    tape.backward(project(out, weights));
    for (const Var& v : vars) analytic.push_back(v.grad());
  }

  GradcheckResult r;
  r.name = name;
  std::vector<Tensor> work = inputs;
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() > 0) usable.push_back(i);
  }
  for (std::size_t k = 0; k < options.points && !usable.empty(); ++k) {
    const std::size_t which = usable[k % usable.size()];
    const std::size_t entry = rng() % inputs[which].size();
    const double x0 = inputs[which][entry];
    work[which][entry] = x0 + options.step;
    const double fp = evaluate_projection(work, fn, weights);
    work[which][entry] = x0 - options.step;
    const double fm = evaluate_projection(work, fn, weights);
    work[which][entry] = x0;
    const double numeric = (fp - fm) / (2.0 * options.step);
    r.max_relative_error =
        std::max(r.max_relative_error, gradcheck_relative_error(analytic[which][entry], numeric,
                                                                options.denominator_floor));
    ++r.points;
  }
  r.passed = r.points > 0 && r.max_relative_error <= options.tolerance;
  return r;
}

std::vector<GradcheckResult> check_all_ops(const GradcheckOptions& options) {
  using ops::OpKind;
  std::mt19937_64 rng(options.seed);
  auto rnd = [&](Shape s) { return random_tensor(std::move(s), rng); };
  std::vector<GradcheckResult> out;
  auto run = [&](OpKind kind, std::vector<Tensor> inputs, GraphFn fn) {
    out.push_back(check_gradient(std::string(ops::op_name(kind)), inputs, fn, options));
  };

  run(OpKind::kMatmul, {rnd({3, 4}), rnd({4, 2})},
      [](Tape&, std::span<const Var> x) { return ops::matmul(x[0], x[1]); });
  run(OpKind::kLinear, {rnd({5, 4}), rnd({3, 4}), rnd({3})},
      [](Tape&, std::span<const Var> x) { return ops::linear(x[0], x[1], x[2]); });
  run(OpKind::kAdd, {rnd({3, 4}), rnd({3, 4})},
      [](Tape&, std::span<const Var> x) { return ops::add(x[0], x[1]); });
  run(OpKind::kSubtract, {rnd({3, 4}), rnd({3, 4})},
      [](Tape&, std::span<const Var> x) { return ops::subtract(x[0], x[1]); });
  run(OpKind::kScale, {rnd({3, 4})},
      [](Tape&, std::span<const Var> x) { return ops::scale(x[0], -1.7); });
  run(OpKind::kMultiply, {rnd({3, 4}), rnd({3, 4})},
      [](Tape&, std::span<const Var> x) { return ops::multiply(x[0], x[1]); });
  run(OpKind::kGelu, {random_tensor({4, 5}, rng, -3.0, 3.0)},
      [](Tape&, std::span<const Var> x) { return ops::gelu(x[0]); });
  run(OpKind::kTanh, {random_tensor({4, 5}, rng, -2.0, 2.0)},
      [](Tape&, std::span<const Var> x) { return ops::tanh(x[0]); });
  run(OpKind::kLayerNorm, {rnd({4, 6}), random_tensor({6}, rng, 0.5, 1.5), rnd({6})},
      [](Tape&, std::span<const Var> x) { return ops::layer_norm(x[0], x[1], x[2]); });
  run(OpKind::kSoftmax, {random_tensor({3, 5}, rng, -2.0, 2.0)},
      [](Tape&, std::span<const Var> x) {
        const std::vector<std::uint8_t> valid = {1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 0, 0, 1, 0, 1};
        return ops::softmax(x[0], valid);
      });
  run(OpKind::kSegmentAttend, {rnd({3, 4}), rnd({5, 4}), rnd({5, 4})},
      [](Tape&, std::span<const Var> x) {
        ops::Segments g;
        g.push_group(std::vector<std::size_t>{0, 2, 4});
        g.push_group(std::vector<std::size_t>{1});
        g.push_group(std::vector<std::size_t>{3, 4, 0, 1});
        return ops::segment_attend(x[0], x[1], x[2], g, 2);
      });
  run(OpKind::kConcat, {rnd({3, 2}), rnd({3, 4})}, [](Tape&, std::span<const Var> x) {
    return ops::concat(std::vector<Var>{x[0], x[1]});
  });
  run(OpKind::kConcatRows, {rnd({2, 3}), rnd({4, 3})}, [](Tape&, std::span<const Var> x) {
    return ops::concat_rows(std::vector<Var>{x[0], x[1]});
  });
  run(OpKind::kGatherRows, {rnd({4, 3})}, [](Tape&, std::span<const Var> x) {
    return ops::gather_rows(x[0], std::vector<std::size_t>{3, 0, 3, 1});
  });
  run(OpKind::kScatterAddRows, {rnd({5, 3})}, [](Tape&, std::span<const Var> x) {
    return ops::scatter_add_rows(x[0], std::vector<std::size_t>{2, 0, 2, 1, 0}, 4);
  });
  run(OpKind::kSum, {rnd({3, 4})}, [](Tape&, std::span<const Var> x) { return ops::sum(x[0]); });
  run(OpKind::kMean, {rnd({3, 4})}, [](Tape&, std::span<const Var> x) { return ops::mean(x[0]); });
  run(OpKind::kDropout, {rnd({4, 5})}, [](Tape&, std::span<const Var> x) {
    std::mt19937_64 mask_rng(99);
    return ops::dropout(x[0], 0.3, mask_rng);
  });
  run(OpKind::kHuber, {random_tensor({8, 1}, rng, -3.0, 3.0), rnd({8, 1})},
      [](Tape&, std::span<const Var> x) { return ops::huber_loss(x[0], x[1], 1.0); });
  return out;
}

Molecule gradcheck_water() {
  Molecule m;
  m.id = "water";
  m.atoms = {Atom{Element::kO, {0.0, 0.0, 0.1173}},
             Atom{Element::kH, {0.0, 0.7572, -0.4692}},
             Atom{Element::kH, {0.0, -0.7572, -0.4692}}};
  m.bonds = {Bond{0, 1, BondOrder::kSingle}, Bond{0, 2, BondOrder::kSingle}};
  return m;
}

std::vector<GradcheckResult> check_model_gradients(const GradcheckOptions& options,
                                                   const ModelConfig& config) {
  const Molecule water = center_molecule(gradcheck_water());
  const std::vector<DirectedEdgeGraph> graphs = {build_directed_graph(water, featurize(water))};
  const GraphBatch batch = make_graph_batch(graphs);
  DgannModel model(config, options.seed);
  const ParameterSet& params = model.parameters();

  std::vector<Tensor> analytic;
  {
    Tape tape;
    const std::vector<Var> p = params.bind(tape, true);
    tape.backward(project(model.forward(p, batch).predictions, Tensor(Shape{1, 1}, 1.0)));
    for (const Var& v : p) analytic.push_back(v.grad());
  }
  std::vector<Tensor> values;
  for (const Parameter& p : params) values.push_back(p.value);
  auto loss_at = [&](const std::vector<Tensor>& vals) {
    Tape tape;
    std::vector<Var> p;
    for (const Tensor& v : vals) p.push_back(tape.constant(v));
    return model.forward(p, batch).predictions.value().item();
  };

  std::mt19937_64 rng(options.seed + 1);
  std::vector<GradcheckResult> out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    GradcheckResult r;
    r.name = params[i].name;
    const std::size_t n = values[i].size();
    const std::size_t count =
        options.model_entries_per_parameter == 0 ? n : std::min(n, options.model_entries_per_parameter);
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t entry = count == n ? k : rng() % n;
      const double x0 = values[i][entry];
      values[i][entry] = x0 + options.step;
      const double fp = loss_at(values);
      values[i][entry] = x0 - options.step;
      const double fm = loss_at(values);
      values[i][entry] = x0;
      const double numeric = (fp - fm) / (2.0 * options.step);
      r.max_relative_error = std::max(
          r.max_relative_error,
          gradcheck_relative_error(analytic[i][entry], numeric, options.denominator_floor));
      ++r.points;
    }
    r.passed = r.max_relative_error <= options.tolerance;
    out.push_back(r);
  }
  return out;
}

}  // namespace dgann
