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

#include "dgann/ops.h"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>

namespace dgann::ops {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using RowVec = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using ConstRowVecMap = Eigen::Map<const RowVec>;
using RowVecMap = Eigen::Map<RowVec>;

ConstMatMap as_matrix(const Tensor& t) {
  return ConstMatMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                     static_cast<Eigen::Index>(t.cols()));
}

MatMap as_matrix(Tensor& t) {
  return MatMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                static_cast<Eigen::Index>(t.cols()));
}

std::array<std::atomic<double>, kNumOpKinds>& adjoint_scales() {
  static std::array<std::atomic<double>, kNumOpKinds> scales;
  static const bool initialized = [] {
    for (auto& s : scales) s.store(1.0);
    return true;
  }();
  (void)initialized;
  return scales;
}

// Output gradient seen by an op's adjoint; copies only when the test hook
// has perturbed this op.
class Adjoint {
 public:
  Adjoint(OpKind kind, const Tensor& g) : ref_(&g) {
    const double s = testing::adjoint_scale(kind);
    if (s != 1.0) {
      scaled_ = g;
      for (double& x : scaled_.values()) x *= s;
      ref_ = &scaled_;
    }
  }
  const Tensor& operator*() const { return *ref_; }
  const Tensor* operator->() const { return ref_; }

 private:
  const Tensor* ref_;
  Tensor scaled_;
};

void require_rank2(const Tensor& t, const char* op, const char* what) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(op) + ": " + what + " must be rank 2, got " +
                     shape_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                     " vs " + shape_string(b.shape()));
  }
}

template <typename F>
Var unary_elementwise(Var x, OpKind kind, F&& fn_and_derivative) {
  Tape& tape = *x.tape();
  const Tensor& in = x.value();
  Tensor out(in.shape());
  Tensor deriv(in.shape());
  for (std::size_t i = 0; i < in.size(); ++i) {
    auto [y, dy] = fn_and_derivative(in[i]);
    out[i] = y;
    deriv[i] = dy;
  }
  return tape.record(std::move(out), {x},
                     [x, kind, deriv = std::move(deriv)](Tape& t, const Tensor& g) {
                       Adjoint adj(kind, g);
                       Tensor& gx = t.grad_buffer(x);
                       for (std::size_t i = 0; i < gx.size(); ++i) {
                         gx[i] += (*adj)[i] * deriv[i];
                       }
                     });
}

}  // namespace

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kMatmul: return "matmul";
    case OpKind::kLinear: return "linear";
    case OpKind::kAdd: return "add";
    case OpKind::kSubtract: return "subtract";
    case OpKind::kScale: return "scale";
    case OpKind::kMultiply: return "multiply";
    case OpKind::kGelu: return "gelu";
    case OpKind::kTanh: return "tanh";
    case OpKind::kLayerNorm: return "layer_norm";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kSegmentAttend: return "segment_attend";
    case OpKind::kConcat: return "concat";
    case OpKind::kConcatRows: return "concat_rows";
    case OpKind::kGatherRows: return "gather_rows";
    case OpKind::kScatterAddRows: return "scatter_add_rows";
    case OpKind::kSum: return "sum";
    case OpKind::kMean: return "mean";
    case OpKind::kDropout: return "dropout";
    case OpKind::kHuber: return "huber_loss";
  }
  return "unknown";
}

namespace testing {

void perturb_adjoint(OpKind kind, double factor) {
  adjoint_scales()[static_cast<int>(kind)].store(factor);
}

void reset_adjoints() {
  for (auto& s : adjoint_scales()) s.store(1.0);
}

double adjoint_scale(OpKind kind) {
  return adjoint_scales()[static_cast<int>(kind)].load(std::memory_order_relaxed);
}

}  // namespace testing

Var matmul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank2(av, "matmul", "lhs");
  require_rank2(bv, "matmul", "rhs");
  if (av.cols() != bv.rows()) {
    throw ShapeError("matmul: inner dimensions disagree, " + shape_string(av.shape()) +
                     " * " + shape_string(bv.shape()));
  }
  Tensor out(Shape{av.rows(), bv.cols()});
  as_matrix(out).noalias() = as_matrix(av) * as_matrix(bv);
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    Adjoint adj(OpKind::kMatmul, g);
    if (t.requires_grad(a)) {
      as_matrix(t.grad_buffer(a)).noalias() +=
          as_matrix(*adj) * as_matrix(t.value(b)).transpose();
    }
    if (t.requires_grad(b)) {
      as_matrix(t.grad_buffer(b)).noalias() +=
          as_matrix(t.value(a)).transpose() * as_matrix(*adj);
    }
  });
}

namespace {

Var linear_impl(Var x, Var weight, const Var* bias) {
  const Tensor& xv = x.value();
  const Tensor& wv = weight.value();
  require_rank2(xv, "linear", "input");
  require_rank2(wv, "linear", "weight");
  if (xv.cols() != wv.cols()) {
    throw ShapeError("linear: input " + shape_string(xv.shape()) +
                     " does not match weight " + shape_string(wv.shape()));
  }
  Tensor out(Shape{xv.rows(), wv.rows()});
  auto y = as_matrix(out);
  y.noalias() = as_matrix(xv) * as_matrix(wv).transpose();
  std::vector<Var> inputs{x, weight};
  if (bias) {
    const Tensor& bv = bias->value();
    if (bv.size() != wv.rows()) {
      throw ShapeError("linear: bias " + shape_string(bv.shape()) +
                       " does not match weight " + shape_string(wv.shape()));
    }
    y.rowwise() += ConstRowVecMap(bv.data(), static_cast<Eigen::Index>(bv.size()));
    inputs.push_back(*bias);
  }
  const Var b = bias ? *bias : Var{};
  return x.tape()->record(std::move(out), inputs, [x, weight, b](Tape& t, const Tensor& g) {
    Adjoint adj(OpKind::kLinear, g);
    const auto dy = as_matrix(*adj);
    if (t.requires_grad(x)) {
      as_matrix(t.grad_buffer(x)).noalias() += dy * as_matrix(t.value(weight));
    }
    if (t.requires_grad(weight)) {
      as_matrix(t.grad_buffer(weight)).noalias() += dy.transpose() * as_matrix(t.value(x));
    }
    if (b.valid() && t.requires_grad(b)) {
      Tensor& gb = t.grad_buffer(b);
      RowVecMap(gb.data(), static_cast<Eigen::Index>(gb.size())) += dy.colwise().sum();
    }
  });
}

}  // namespace

Var linear(Var x, Var weight) { return linear_impl(x, weight, nullptr); }
Var linear(Var x, Var weight, Var bias) { return linear_impl(x, weight, &bias); }

Var add(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_same_shape(av, bv, "add");
  Tensor out = av;
  out.add_inplace(bv);
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    Adjoint adj(OpKind::kAdd, g);
    if (t.requires_grad(a)) t.grad_buffer(a).add_inplace(*adj);
    if (t.requires_grad(b)) t.grad_buffer(b).add_inplace(*adj);
  });
}

Var subtract(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_same_shape(av, bv, "subtract");
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    Adjoint adj(OpKind::kSubtract, g);
    if (t.requires_grad(a)) t.grad_buffer(a).add_inplace(*adj);
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad_buffer(b);
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= (*adj)[i];
    }
  });
}

Var scale(Var a, double factor) {
  Tensor out = a.value();
  for (double& v : out.values()) v *= factor;
  return a.tape()->record(std::move(out), {a}, [a, factor](Tape& t, const Tensor& g) {
    Adjoint adj(OpKind::kScale, g);
    Tensor& ga = t.grad_buffer(a);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += factor * (*adj)[i];
  });
}

Var multiply(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_same_shape(av, bv, "multiply");
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return a.tape()->record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    Adjoint adj(OpKind::kMultiply, g);
    const Tensor& av = t.value(a);
    const Tensor& bv = t.value(b);
    if (t.requires_grad(a)) {
      Tensor& ga = t.grad_buffer(a);
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += (*adj)[i] * bv[i];
    }
    if (t.requires_grad(b)) {
      Tensor& gb = t.grad_buffer(b);
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += (*adj)[i] * av[i];
    }
  });
}

double gelu(double x) {
  constexpr double kC = 0.7978845608028654;  // sqrt(2/pi)
  return 0.5 * x * (1.0 + std::tanh(kC * (x + 0.044715 * x * x * x)));
}

Var gelu(Var x) {
  return unary_elementwise(x, OpKind::kGelu, [](double v) {
    constexpr double kC = 0.7978845608028654;
    const double u = kC * (v + 0.044715 * v * v * v);
    const double th = std::tanh(u);
    const double y = 0.5 * v * (1.0 + th);
    const double du = kC * (1.0 + 3.0 * 0.044715 * v * v);
    const double dy = 0.5 * (1.0 + th) + 0.5 * v * (1.0 - th * th) * du;
    return std::pair{y, dy};
  });
}

Var tanh(Var x) {
  return unary_elementwise(x, OpKind::kTanh, [](double v) {
    const double th = std::tanh(v);
    return std::pair{th, 1.0 - th * th};
  });
}

Var layer_norm(Var x, Var gain, Var bias) {
  const Tensor& xv = x.value();
  const std::size_t d = xv.cols();
  if (xv.rank() == 0 || d < 2) {
    throw ShapeError("layer_norm: last axis must have at least 2 entries, got " +
                     shape_string(xv.shape()));
  }
  if (gain.value().size() != d || bias.value().size() != d) {
    throw ShapeError("layer_norm: gain/bias must have " + std::to_string(d) + " entries");
  }
  const std::size_t rows = xv.rows();
  Tensor normalized(xv.shape());
  std::vector<double> inv_std(rows);
  Tensor out(xv.shape());
  const Tensor& gv = gain.value();
  const Tensor& bv = bias.value();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xv.data() + r * d;
    double mean = 0.0;
    for (std::size_t c = 0; c < d; ++c) mean += in[c];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t c = 0; c < d; ++c) var += (in[c] - mean) * (in[c] - mean);
    var /= static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + kLayerNormEpsilon);
    inv_std[r] = is;
    double* nrm = normalized.data() + r * d;
    double* o = out.data() + r * d;
    for (std::size_t c = 0; c < d; ++c) {
      nrm[c] = (in[c] - mean) * is;
      o[c] = nrm[c] * gv[c] + bv[c];
    }
  }
  return x.tape()->record(
      std::move(out), {x, gain, bias},
      [x, gain, bias, d, normalized = std::move(normalized),
       inv_std = std::move(inv_std)](Tape& t, const Tensor& g) {
        Adjoint adj(OpKind::kLayerNorm, g);
        const std::size_t rows = normalized.rows();
        const Tensor& gv = t.value(gain);
        if (t.requires_grad(gain)) {
          Tensor& gg = t.grad_buffer(gain);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < d; ++c)
              gg[c] += (*adj)[r * d + c] * normalized[r * d + c];
        }
        if (t.requires_grad(bias)) {
          Tensor& gb = t.grad_buffer(bias);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < d; ++c) gb[c] += (*adj)[r * d + c];
        }
        if (t.requires_grad(x)) {
          Tensor& gx = t.grad_buffer(x);
          const double inv_d = 1.0 / static_cast<double>(d);
          for (std::size_t r = 0; r < rows; ++r) {
            const double* dy = adj->data() + r * d;
            const double* nrm = normalized.data() + r * d;
            double mean_dn = 0.0;
            double mean_dn_n = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
              const double dn = dy[c] * gv[c];
              mean_dn += dn;
              mean_dn_n += dn * nrm[c];
            }
            mean_dn *= inv_d;
            mean_dn_n *= inv_d;
            double* out_g = gx.data() + r * d;
            for (std::size_t c = 0; c < d; ++c) {
              const double dn = dy[c] * gv[c];
              out_g[c] += inv_std[r] * (dn - mean_dn - nrm[c] * mean_dn_n);
            }
          }
        }
      });
}

namespace {

Var softmax_impl(Var x, const std::vector<std::uint8_t>* valid) {
  const Tensor& xv = x.value();
  if (valid && valid->size() != xv.size()) {
    throw ShapeError("softmax: mask has " + std::to_string(valid->size()) +
                     " entries for tensor " + shape_string(xv.shape()));
  }
  const std::size_t rows = xv.rows();
  const std::size_t n = xv.cols();
  Tensor out(xv.shape(), 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t c = 0; c < n; ++c) {
      if (valid && !(*valid)[r * n + c]) continue;
      mx = std::max(mx, xv[r * n + c]);
      any = true;
    }
    if (!any) {
      throw std::invalid_argument("softmax: row " + std::to_string(r) +
                                  " has every entry masked");
    }
    double total = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (valid && !(*valid)[r * n + c]) continue;
      const double e = std::exp(xv[r * n + c] - mx);
      out[r * n + c] = e;
      total += e;
    }
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] /= total;
  }
  Tensor y = out;
  return x.tape()->record(std::move(out), {x}, [x, y = std::move(y)](Tape& t, const Tensor& g) {
    Adjoint adj(OpKind::kSoftmax, g);
    Tensor& gx = t.grad_buffer(x);
    const std::size_t rows = y.rows();
    const std::size_t n = y.cols();
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < n; ++c) dot += y[r * n + c] * (*adj)[r * n + c];
      for (std::size_t c = 0; c < n; ++c) {
        gx[r * n + c] += y[r * n + c] * ((*adj)[r * n + c] - dot);
      }
    }
  });
}

}  // namespace

Var softmax(Var x) { return softmax_impl(x, nullptr); }
Var softmax(Var x, const std::vector<std::uint8_t>& valid) { return softmax_impl(x, &valid); }

Var segment_attend(Var queries, Var keys, Var values, const Segments& groups,
                   std::size_t heads, Tensor* weights_out) {
  const Tensor& q = queries.value();
  const Tensor& k = keys.value();
  const Tensor& v = values.value();
  require_rank2(q, "segment_attend", "queries");
  require_rank2(k, "segment_attend", "keys");
  require_rank2(v, "segment_attend", "values");
  const std::size_t dim = q.cols();
  if (k.cols() != dim || v.cols() != dim || k.rows() != v.rows()) {
    throw ShapeError("segment_attend: queries " + shape_string(q.shape()) + ", keys " +
                     shape_string(k.shape()) + ", values " + shape_string(v.shape()));
  }
  if (heads == 0 || dim % heads != 0) {
    throw ShapeError("segment_attend: width " + std::to_string(dim) +
                     " is not divisible by " + std::to_string(heads) + " heads");
  }
  if (groups.size() != q.rows()) {
    throw ShapeError("segment_attend: " + std::to_string(groups.size()) + " groups for " +
                     std::to_string(q.rows()) + " queries");
  }
  const std::size_t sources = k.rows();
  for (std::size_t t = 0; t < groups.size(); ++t) {
    if (groups.offsets[t + 1] <= groups.offsets[t]) {
      throw std::invalid_argument("segment_attend: empty group for target " +
                                  std::to_string(t));
    }
  }
  for (std::size_t idx : groups.indices) {
    if (idx >= sources) {
      throw std::out_of_range("segment_attend: group index " + std::to_string(idx) +
                              " >= " + std::to_string(sources) + " key rows");
    }
  }

  const std::size_t head_dim = dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  const std::size_t nnz = groups.indices.size();
  Tensor weights(Shape{nnz, heads});
  Tensor out(Shape{q.rows(), dim}, 0.0);
  std::vector<double> scores;
  for (std::size_t t = 0; t < groups.size(); ++t) {
    const auto members = groups.group(t);
    const std::size_t base = groups.offsets[t];
    scores.resize(members.size());
    for (std::size_t h = 0; h < heads; ++h) {
      const double* qh = q.data() + t * dim + h * head_dim;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < members.size(); ++j) {
        const double* kh = k.data() + members[j] * dim + h * head_dim;
        double s = 0.0;
        for (std::size_t c = 0; c < head_dim; ++c) s += qh[c] * kh[c];
        scores[j] = s * scale;
        mx = std::max(mx, scores[j]);
      }
      double total = 0.0;
      for (double& s : scores) {
        s = std::exp(s - mx);
        total += s;
      }
      double* oh = out.data() + t * dim + h * head_dim;
      for (std::size_t j = 0; j < members.size(); ++j) {
        const double w = scores[j] / total;
        weights[(base + j) * heads + h] = w;
        const double* vh = v.data() + members[j] * dim + h * head_dim;
        for (std::size_t c = 0; c < head_dim; ++c) oh[c] += w * vh[c];
      }
    }
  }
  if (weights_out) *weights_out = weights;

  return queries.tape()->record(
      std::move(out), {queries, keys, values},
      [queries, keys, values, groups, heads, head_dim, scale,
       weights = std::move(weights)](Tape& t, const Tensor& g) {
        Adjoint adj(OpKind::kSegmentAttend, g);
        const Tensor& q = t.value(queries);
        const Tensor& k = t.value(keys);
        const Tensor& v = t.value(values);
        const std::size_t dim = q.cols();
        const bool need_q = t.requires_grad(queries);
        const bool need_k = t.requires_grad(keys);
        const bool need_v = t.requires_grad(values);
        Tensor* gq = need_q ? &t.grad_buffer(queries) : nullptr;
        Tensor* gk = need_k ? &t.grad_buffer(keys) : nullptr;
        Tensor* gv = need_v ? &t.grad_buffer(values) : nullptr;
        std::vector<double> dw;
        for (std::size_t tg = 0; tg < groups.size(); ++tg) {
          const auto members = groups.group(tg);
          const std::size_t base = groups.offsets[tg];
          dw.resize(members.size());
          for (std::size_t h = 0; h < heads; ++h) {
            const double* go = adj->data() + tg * dim + h * head_dim;
            double weighted = 0.0;
            for (std::size_t j = 0; j < members.size(); ++j) {
              const double w = weights[(base + j) * heads + h];
              const double* vh = v.data() + members[j] * dim + h * head_dim;
              double s = 0.0;
              for (std::size_t c = 0; c < head_dim; ++c) s += go[c] * vh[c];
              dw[j] = s;
              weighted += w * s;
              if (gv) {
                double* gvh = gv->data() + members[j] * dim + h * head_dim;
                for (std::size_t c = 0; c < head_dim; ++c) gvh[c] += w * go[c];
              }
            }
            if (!gq && !gk) continue;
            const double* qh = q.data() + tg * dim + h * head_dim;
            for (std::size_t j = 0; j < members.size(); ++j) {
              const double w = weights[(base + j) * heads + h];
              const double ds = w * (dw[j] - weighted) * scale;
              const double* kh = k.data() + members[j] * dim + h * head_dim;
              if (gq) {
                double* gqh = gq->data() + tg * dim + h * head_dim;
                for (std::size_t c = 0; c < head_dim; ++c) gqh[c] += ds * kh[c];
              }
              if (gk) {
                double* gkh = gk->data() + members[j] * dim + h * head_dim;
                for (std::size_t c = 0; c < head_dim; ++c) gkh[c] += ds * qh[c];
              }
            }
          }
        }
      });
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no inputs");
  const std::size_t rows = parts[0].value().rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Var& p : parts) {
    const Tensor& pv = p.value();
    require_rank2(pv, "concat", "input");
    if (pv.rows() != rows) {
      throw ShapeError("concat: row count mismatch " + shape_string(parts[0].shape()) +
                       " vs " + shape_string(pv.shape()));
    }
    widths.push_back(pv.cols());
    total += pv.cols();
  }
  Tensor out(Shape{rows, total});
  std::size_t col = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Tensor& pv = parts[i].value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(pv.data() + r * widths[i], widths[i], out.data() + r * total + col);
    }
    col += widths[i];
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts[0].tape()->record(
      std::move(out), inputs, [inputs, widths, total](Tape& t, const Tensor& g) {
        Adjoint adj(OpKind::kConcat, g);
        const std::size_t rows = adj->rows();
        std::size_t col = 0;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
          if (t.requires_grad(inputs[i])) {
            Tensor& gi = t.grad_buffer(inputs[i]);
            for (std::size_t r = 0; r < rows; ++r)
              for (std::size_t c = 0; c < widths[i]; ++c)
                gi[r * widths[i] + c] += (*adj)[r * total + col + c];
          }
          col += widths[i];
        }
      });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
  const std::size_t cols = parts[0].value().cols();
  std::size_t rows = 0;
  for (const Var& p : parts) {
    const Tensor& pv = p.value();
    require_rank2(pv, "concat_rows", "input");
    if (pv.cols() != cols) {
      throw ShapeError("concat_rows: column mismatch " + shape_string(parts[0].shape()) +
                       " vs " + shape_string(pv.shape()));
    }
    rows += pv.rows();
  }
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const Var& p : parts) {
    const auto vals = p.value().values();
    data.insert(data.end(), vals.begin(), vals.end());
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts[0].tape()->record(
      Tensor(Shape{rows, cols}, std::move(data)), inputs, [inputs](Tape& t, const Tensor& g) {
        Adjoint adj(OpKind::kConcatRows, g);
        std::size_t offset = 0;
        for (const Var& in : inputs) {
          const std::size_t n = t.value(in).size();
          if (t.requires_grad(in)) {
            Tensor& gi = t.grad_buffer(in);
            for (std::size_t i = 0; i < n; ++i) gi[i] += (*adj)[offset + i];
          }
          offset += n;
        }
      });
}

Var gather_rows(Var x, std::span<const std::size_t> index) {
  const Tensor& xv = x.value();
  if (xv.rank() != 1 && xv.rank() != 2) {
    throw ShapeError("gather_rows: input must be rank 1 or 2, got " + shape_string(xv.shape()));
  }
  const std::size_t cols = xv.cols();
  Tensor out(Shape{index.size(), cols});
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= xv.rows()) {
      throw std::out_of_range("gather_rows: index " + std::to_string(index[i]) +
                              " >= " + std::to_string(xv.rows()) + " rows");
    }
    std::copy_n(xv.data() + index[i] * cols, cols, out.data() + i * cols);
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return x.tape()->record(std::move(out), {x}, [x, idx = std::move(idx)](Tape& t, const Tensor& g) {
    Adjoint adj(OpKind::kGatherRows, g);
    Tensor& gx = t.grad_buffer(x);
    const std::size_t cols = gx.cols();
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t c = 0; c < cols; ++c) gx[idx[i] * cols + c] += (*adj)[i * cols + c];
  });
}

Var scatter_add_rows(Var x, std::span<const std::size_t> index, std::size_t out_rows) {
  const Tensor& xv = x.value();
  require_rank2(xv, "scatter_add_rows", "input");
  if (index.size() != xv.rows()) {
    throw ShapeError("scatter_add_rows: " + std::to_string(index.size()) + " indices for " +
                     std::to_string(xv.rows()) + " rows");
  }
  const std::size_t cols = xv.cols();
  Tensor out(Shape{out_rows, cols}, 0.0);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= out_rows) {
      throw std::out_of_range("scatter_add_rows: index " + std::to_string(index[i]) +
                              " >= " + std::to_string(out_rows));
    }
    for (std::size_t c = 0; c < cols; ++c) out[index[i] * cols + c] += xv[i * cols + c];
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return x.tape()->record(std::move(out), {x}, [x, idx = std::move(idx)](Tape& t, const Tensor& g) {
    Adjoint adj(OpKind::kScatterAddRows, g);
    Tensor& gx = t.grad_buffer(x);
    const std::size_t cols = gx.cols();
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t c = 0; c < cols; ++c) gx[i * cols + c] += (*adj)[idx[i] * cols + c];
  });
}

Var sum(Var x) {
  double total = 0.0;
  for (double v : x.value().values()) total += v;
  return x.tape()->record(Tensor::scalar(total), {x}, [x](Tape& t, const Tensor& g) {
    Adjoint adj(OpKind::kSum, g);
    const double s = adj->item();
    for (double& v : t.grad_buffer(x).values()) v += s;
  });
}

Var mean(Var x) {
  const std::size_t n = x.value().size();
  if (n == 0) throw std::invalid_argument("mean: empty tensor");
  double total = 0.0;
  for (double v : x.value().values()) total += v;
  const double inv = 1.0 / static_cast<double>(n);
  return x.tape()->record(Tensor::scalar(total * inv), {x}, [x, inv](Tape& t, const Tensor& g) {
    Adjoint adj(OpKind::kMean, g);
    const double s = adj->item() * inv;
    for (double& v : t.grad_buffer(x).values()) v += s;
  });
}

Var dropout(Var x, double p, std::mt19937_64& rng) {
  if (p < 0.0 || p >= 1.0) {
    throw std::invalid_argument("dropout: probability must lie in [0, 1)");
  }
  if (p == 0.0) return x;
  const Tensor& xv = x.value();
  std::bernoulli_distribution keep(1.0 - p);
  const double inv_keep = 1.0 / (1.0 - p);
  Tensor mask(xv.shape());
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    mask[i] = keep(rng) ? inv_keep : 0.0;
    out[i] = xv[i] * mask[i];
  }
  return x.tape()->record(std::move(out), {x}, [x, mask = std::move(mask)](Tape& t, const Tensor& g) {
    Adjoint adj(OpKind::kDropout, g);
    Tensor& gx = t.grad_buffer(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += (*adj)[i] * mask[i];
  });
}

Var huber_loss(Var prediction, Var target, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("huber_loss: delta must be positive");
  const Tensor& pv = prediction.value();
  const Tensor& tv = target.value();
  require_same_shape(pv, tv, "huber_loss");
  if (pv.size() == 0) throw std::invalid_argument("huber_loss: empty batch");
  const double inv_n = 1.0 / static_cast<double>(pv.size());
  double total = 0.0;
  Tensor slope(pv.shape());
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double r = pv[i] - tv[i];
    const double a = std::abs(r);
    if (a <= delta) {
      total += 0.5 * r * r;
      slope[i] = r;
    } else {
      total += delta * (a - 0.5 * delta);
      slope[i] = r > 0 ? delta : -delta;
    }
  }
  return prediction.tape()->record(
      Tensor::scalar(total * inv_n), {prediction, target},
      [prediction, target, inv_n, slope = std::move(slope)](Tape& t, const Tensor& g) {
        Adjoint adj(OpKind::kHuber, g);
        const double s = adj->item() * inv_n;
        if (t.requires_grad(prediction)) {
          Tensor& gp = t.grad_buffer(prediction);
          for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += s * slope[i];
        }
        if (t.requires_grad(target)) {
          Tensor& gt = t.grad_buffer(target);
          for (std::size_t i = 0; i < gt.size(); ++i) gt[i] -= s * slope[i];
        }
      });
}

}  // namespace dgann::ops
