// Copyright 2026 The glagent Authors.
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

#include "glagent/engine/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glagent/error.hpp"
#include "glagent/rng.hpp"

namespace glagent::engine {

namespace {

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw Error(ErrorCode::DimensionMismatch,
              std::string(op) + ": " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                  " vs " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

void accumulate(Matrix& into, const Matrix& delta) {
  for (std::size_t i = 0; i < into.data.size(); ++i) into.data[i] += delta.data[i];
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, false, {}});
  return Var{nodes_.size() - 1};
}

Var Tape::variable(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, true, {}});
  return Var{nodes_.size() - 1};
}

Var Tape::push(Matrix value, std::initializer_list<Var> parents, Backward backward) {
  bool needs = false;
  for (Var p : parents) needs = needs || nodes_[p.id].requires_grad;
  nodes_.push_back(Node{std::move(value), {}, needs, needs ? std::move(backward) : Backward{}});
  return Var{nodes_.size() - 1};
}

Matrix& Tape::grad_buffer(Var v) {
  Node& n = nodes_[v.id];
  if (n.grad.rows != n.value.rows || n.grad.cols != n.value.cols)
    n.grad = Matrix(n.value.rows, n.value.cols);
  return n.grad;
}

void Tape::note_activation_pattern(std::span<const double> pre) {
  std::uint64_t h = activation_signature_;
  for (double v : pre) {
    h ^= (v > 0.0) ? 0x9dULL : 0x3bULL;
    h *= 0x100000001b3ULL;
  }
  activation_signature_ = h;
}

void Tape::backward(Var loss) {
  if (nodes_[loss.id].value.size() != 1)
    throw Error(ErrorCode::DimensionMismatch, "backward expects a 1x1 loss");
  for (auto& n : nodes_) n.grad = Matrix();
  grad_buffer(loss).data[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || !n.backward || n.grad.size() == 0) continue;
    // The node's own gradient is complete once every later node has run.
    const Matrix g = n.grad;
    n.backward(*this, g);
  }
}

Var matmul(Tape& t, Var a, Var b) {
  const Matrix& av = t.value(a);
  const Matrix& bv = t.value(b);
  if (av.cols != bv.rows) shape_error("matmul", av, bv);
  return t.push(engine::matmul(av, bv), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) accumulate(tp.grad_buffer(a), engine::matmul(g, transpose(tp.value(b))));
    if (tp.requires_grad(b)) accumulate(tp.grad_buffer(b), engine::matmul(transpose(tp.value(a)), g));
  });
}

Var add(Tape& t, Var a, Var b) {
  const Matrix& av = t.value(a);
  const Matrix& bv = t.value(b);
  if (!av.same_shape(bv)) shape_error("add", av, bv);
  Matrix out = av;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += bv.data[i];
  return t.push(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) accumulate(tp.grad_buffer(a), g);
    if (tp.requires_grad(b)) accumulate(tp.grad_buffer(b), g);
  });
}

Var add_row(Tape& t, Var a, Var bias) {
  const Matrix& av = t.value(a);
  const Matrix& bv = t.value(bias);
  if (bv.rows != 1 || bv.cols != av.cols) shape_error("add_row", av, bv);
  Matrix out = av;
  for (std::size_t r = 0; r < out.rows; ++r)
    for (std::size_t c = 0; c < out.cols; ++c) out(r, c) += bv.data[c];
  return t.push(std::move(out), {a, bias}, [a, bias](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) accumulate(tp.grad_buffer(a), g);
    if (tp.requires_grad(bias)) {
      Matrix& gb = tp.grad_buffer(bias);
      for (std::size_t r = 0; r < g.rows; ++r)
        for (std::size_t c = 0; c < g.cols; ++c) gb.data[c] += g(r, c);
    }
  });
}

Var hadamard(Tape& t, Var a, Var b) {
  const Matrix& av = t.value(a);
  const Matrix& bv = t.value(b);
  if (!av.same_shape(bv)) shape_error("hadamard", av, bv);
  Matrix out = av;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= bv.data[i];
  return t.push(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) {
      Matrix& ga = tp.grad_buffer(a);
      const Matrix& bv2 = tp.value(b);
      for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i] * bv2.data[i];
    }
    if (tp.requires_grad(b)) {
      Matrix& gb = tp.grad_buffer(b);
      const Matrix& av2 = tp.value(a);
      for (std::size_t i = 0; i < g.data.size(); ++i) gb.data[i] += g.data[i] * av2.data[i];
    }
  });
}

Var scale(Tape& t, Var a, double c) {
  Matrix out = t.value(a);
  for (double& v : out.data) v *= c;
  return t.push(std::move(out), {a}, [a, c](Tape& tp, const Matrix& g) {
    Matrix& ga = tp.grad_buffer(a);
    for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] += c * g.data[i];
  });
}

Var scale_by(Tape& t, Var a, Var s) {
  const Matrix& sv = t.value(s);
  if (sv.size() != 1) shape_error("scale_by", t.value(a), sv);
  const double c = sv.data[0];
  Matrix out = t.value(a);
  for (double& v : out.data) v *= c;
  return t.push(std::move(out), {a, s}, [a, s](Tape& tp, const Matrix& g) {
    const double c2 = tp.value(s).data[0];
    if (tp.requires_grad(a)) {
      Matrix& ga = tp.grad_buffer(a);
      for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] += c2 * g.data[i];
    }
    if (tp.requires_grad(s)) {
      const Matrix& av = tp.value(a);
      double acc = 0.0;
      for (std::size_t i = 0; i < g.data.size(); ++i) acc += g.data[i] * av.data[i];
      tp.grad_buffer(s).data[0] += acc;
    }
  });
}

Var reciprocal(Tape& t, Var s) {
  const Matrix& sv = t.value(s);
  if (sv.size() != 1) shape_error("reciprocal", sv, sv);
  Matrix out(1, 1, 1.0 / sv.data[0]);
  return t.push(std::move(out), {s}, [s](Tape& tp, const Matrix& g) {
    const double x = tp.value(s).data[0];
    tp.grad_buffer(s).data[0] += -g.data[0] / (x * x);
  });
}

Var relu(Tape& t, Var a) {
  const Matrix& av = t.value(a);
  t.note_activation_pattern(av.data);
  Matrix out = av;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return t.push(std::move(out), {a}, [a](Tape& tp, const Matrix& g) {
    Matrix& ga = tp.grad_buffer(a);
    const Matrix& av2 = tp.value(a);
    for (std::size_t i = 0; i < g.data.size(); ++i)
      if (av2.data[i] > 0.0) ga.data[i] += g.data[i];
  });
}

Var sigmoid(Tape& t, Var a) {
  Matrix y = t.value(a);
  for (double& v : y.data) v = logistic(v);
  Matrix ycopy = y;
  return t.push(std::move(y), {a}, [a, y = std::move(ycopy)](Tape& tp, const Matrix& g) {
    Matrix& ga = tp.grad_buffer(a);
    for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i] * y.data[i] * (1.0 - y.data[i]);
  });
}

Var softmax_row(Tape& t, Var a) {
  const Matrix& av = t.value(a);
  if (av.rows != 1) shape_error("softmax_row", av, av);
  Matrix y(1, av.cols);
  const double mx = *std::max_element(av.data.begin(), av.data.end());
  double z = 0.0;
  for (std::size_t k = 0; k < av.cols; ++k) z += (y.data[k] = std::exp(av.data[k] - mx));
  for (double& v : y.data) v /= z;
  Matrix ycopy = y;
  return t.push(std::move(y), {a}, [a, y = std::move(ycopy)](Tape& tp, const Matrix& g) {
    double dot = 0.0;
    for (std::size_t k = 0; k < y.cols; ++k) dot += g.data[k] * y.data[k];
    Matrix& ga = tp.grad_buffer(a);
    for (std::size_t k = 0; k < y.cols; ++k) ga.data[k] += y.data[k] * (g.data[k] - dot);
  });
}

Var element(Tape& t, Var a, std::size_t r, std::size_t c) {
  const Matrix& av = t.value(a);
  if (r >= av.rows || c >= av.cols) shape_error("element", av, av);
  return t.push(Matrix(1, 1, av(r, c)), {a}, [a, r, c](Tape& tp, const Matrix& g) {
    tp.grad_buffer(a)(r, c) += g.data[0];
  });
}

Var dropout(Tape& t, Var a, double p, Rng& rng) {
  if (p <= 0.0) return a;
  const Matrix& av = t.value(a);
  Matrix mask(av.rows, av.cols);
  const double keep = 1.0 / (1.0 - p);
  for (double& m : mask.data) m = rng.bernoulli(p) ? 0.0 : keep;
  Matrix out = av;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= mask.data[i];
  return t.push(std::move(out), {a}, [a, mask = std::move(mask)](Tape& tp, const Matrix& g) {
    Matrix& ga = tp.grad_buffer(a);
    for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i] * mask.data[i];
  });
}

Var spmm(Tape& t, const SparseOperatorPtr& op, Var a) {
  Matrix out = op->forward.multiply(t.value(a));
  return t.push(std::move(out), {a}, [a, op](Tape& tp, const Matrix& g) {
    accumulate(tp.grad_buffer(a), op->adjoint.multiply(g));
  });
}

Var concat_cols(Tape& t, Var a, Var b) {
  const Matrix& av = t.value(a);
  const Matrix& bv = t.value(b);
  if (av.rows != bv.rows) shape_error("concat_cols", av, bv);
  Matrix out(av.rows, av.cols + bv.cols);
  for (std::size_t r = 0; r < av.rows; ++r) {
    std::copy(av.row(r).begin(), av.row(r).end(), out.row(r).begin());
    std::copy(bv.row(r).begin(), bv.row(r).end(), out.row(r).begin() + av.cols);
  }
  const std::size_t split = av.cols;
  return t.push(std::move(out), {a, b}, [a, b, split](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) {
      Matrix& ga = tp.grad_buffer(a);
      for (std::size_t r = 0; r < g.rows; ++r)
        for (std::size_t c = 0; c < split; ++c) ga(r, c) += g(r, c);
    }
    if (tp.requires_grad(b)) {
      Matrix& gb = tp.grad_buffer(b);
      for (std::size_t r = 0; r < g.rows; ++r)
        for (std::size_t c = split; c < g.cols; ++c) gb(r, c - split) += g(r, c);
    }
  });
}

Var gather_rows(Tape& t, Var a, std::span<const std::size_t> rows) {
  const Matrix& av = t.value(a);
  Matrix out(rows.size(), av.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= av.rows) shape_error("gather_rows", av, out);
    std::copy(av.row(rows[i]).begin(), av.row(rows[i]).end(), out.row(i).begin());
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return t.push(std::move(out), {a}, [a, idx = std::move(idx)](Tape& tp, const Matrix& g) {
    Matrix& ga = tp.grad_buffer(a);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t c = 0; c < g.cols; ++c) ga(idx[i], c) += g(i, c);
  });
}

Var row_dot(Tape& t, Var a, Var b) {
  const Matrix& av = t.value(a);
  const Matrix& bv = t.value(b);
  if (!av.same_shape(bv)) shape_error("row_dot", av, bv);
  Matrix out(av.rows, 1);
  for (std::size_t r = 0; r < av.rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < av.cols; ++c) acc += av(r, c) * bv(r, c);
    out.data[r] = acc;
  }
  return t.push(std::move(out), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    const Matrix& av2 = tp.value(a);
    const Matrix& bv2 = tp.value(b);
    if (tp.requires_grad(a)) {
      Matrix& ga = tp.grad_buffer(a);
      for (std::size_t r = 0; r < av2.rows; ++r)
        for (std::size_t c = 0; c < av2.cols; ++c) ga(r, c) += g.data[r] * bv2(r, c);
    }
    if (tp.requires_grad(b)) {
      Matrix& gb = tp.grad_buffer(b);
      for (std::size_t r = 0; r < av2.rows; ++r)
        for (std::size_t c = 0; c < av2.cols; ++c) gb(r, c) += g.data[r] * av2(r, c);
    }
  });
}

namespace {

Var segment_reduce(Tape& t, Var a, std::span<const std::size_t> offsets, bool mean) {
  const Matrix& av = t.value(a);
  if (offsets.empty() || offsets.back() != av.rows) shape_error("segment_reduce", av, av);
  const std::size_t groups = offsets.size() - 1;
  Matrix out(groups, av.cols);
  std::vector<double> inv(groups, 1.0);
  std::vector<double> column;
  for (std::size_t g = 0; g < groups; ++g) {
    // Values are summed in sorted order so the result does not depend on row order.
    for (std::size_t c = 0; c < av.cols; ++c) {
      column.clear();
      for (std::size_t r = offsets[g]; r < offsets[g + 1]; ++r) column.push_back(av(r, c));
      std::sort(column.begin(), column.end());
      double acc = 0.0;
      for (double v : column) acc += v;
      out(g, c) = acc;
    }
    const std::size_t count = offsets[g + 1] - offsets[g];
    if (mean && count > 0) {
      inv[g] = 1.0 / static_cast<double>(count);
      for (std::size_t c = 0; c < av.cols; ++c) out(g, c) *= inv[g];
    }
  }
  std::vector<std::size_t> off(offsets.begin(), offsets.end());
  return t.push(std::move(out), {a},
                [a, off = std::move(off), inv = std::move(inv)](Tape& tp, const Matrix& g) {
                  Matrix& ga = tp.grad_buffer(a);
                  for (std::size_t s = 0; s + 1 < off.size(); ++s)
                    for (std::size_t r = off[s]; r < off[s + 1]; ++r)
                      for (std::size_t c = 0; c < g.cols; ++c) ga(r, c) += g(s, c) * inv[s];
                });
}

}  // namespace

Var segment_sum(Tape& t, Var a, std::span<const std::size_t> offsets) {
  return segment_reduce(t, a, offsets, false);
}

Var segment_mean(Tape& t, Var a, std::span<const std::size_t> offsets) {
  return segment_reduce(t, a, offsets, true);
}

Var cross_entropy(Tape& t, Var logits, std::span<const int> labels, std::span<const std::size_t> rows) {
  const Matrix& z = t.value(logits);
  if (rows.empty()) throw Error(ErrorCode::InvalidParameter, "cross_entropy over an empty row set");
  Matrix probs(rows.size(), z.cols);
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    const int y = labels[r];
    if (y < 0 || static_cast<std::size_t>(y) >= z.cols)
      throw Error(ErrorCode::DimensionMismatch, "label out of range for logits");
    double mx = z(r, 0);
    for (std::size_t c = 1; c < z.cols; ++c) mx = std::max(mx, z(r, c));
    double sum = 0.0;
    for (std::size_t c = 0; c < z.cols; ++c) sum += (probs(i, c) = std::exp(z(r, c) - mx));
    for (std::size_t c = 0; c < z.cols; ++c) probs(i, c) /= sum;
    loss += -(z(r, y) - mx - std::log(sum));
  }
  const double n = static_cast<double>(rows.size());
  std::vector<std::size_t> rs(rows.begin(), rows.end());
  std::vector<int> ys;
  ys.reserve(rows.size());
  for (std::size_t r : rows) ys.push_back(labels[r]);
  return t.push(Matrix(1, 1, loss / n), {logits},
                [logits, rs = std::move(rs), ys = std::move(ys), probs = std::move(probs), n](
                    Tape& tp, const Matrix& g) {
                  Matrix& gz = tp.grad_buffer(logits);
                  const double s = g.data[0] / n;
                  for (std::size_t i = 0; i < rs.size(); ++i) {
                    for (std::size_t c = 0; c < probs.cols; ++c) gz(rs[i], c) += s * probs(i, c);
                    gz(rs[i], static_cast<std::size_t>(ys[i])) -= s;
                  }
                });
}

Var bpr_loss(Tape& t, Var pos, Var neg) {
  const Matrix& p = t.value(pos);
  const Matrix& q = t.value(neg);
  if (!p.same_shape(q) || p.cols != 1 || p.rows == 0) shape_error("bpr_loss", p, q);
  double loss = 0.0;
  for (std::size_t i = 0; i < p.rows; ++i) loss += softplus(q.data[i] - p.data[i]);
  const double n = static_cast<double>(p.rows);
  return t.push(Matrix(1, 1, loss / n), {pos, neg}, [pos, neg, n](Tape& tp, const Matrix& g) {
    const Matrix& p2 = tp.value(pos);
    const Matrix& q2 = tp.value(neg);
    const double s = g.data[0] / n;
    Matrix* gp = tp.requires_grad(pos) ? &tp.grad_buffer(pos) : nullptr;
    Matrix* gq = tp.requires_grad(neg) ? &tp.grad_buffer(neg) : nullptr;
    for (std::size_t i = 0; i < p2.rows; ++i) {
      const double d = logistic(q2.data[i] - p2.data[i]) * s;
      if (gp) gp->data[i] -= d;
      if (gq) gq->data[i] += d;
    }
  });
}

Var half_mse(Tape& t, Var pred, const Matrix& target) {
  const Matrix& p = t.value(pred);
  if (!p.same_shape(target)) shape_error("half_mse", p, target);
  double loss = 0.0;
  for (std::size_t i = 0; i < p.data.size(); ++i) {
    const double d = p.data[i] - target.data[i];
    loss += 0.5 * d * d;
  }
  const double n = static_cast<double>(p.data.size());
  return t.push(Matrix(1, 1, loss / n), {pred}, [pred, target, n](Tape& tp, const Matrix& g) {
    Matrix& gp = tp.grad_buffer(pred);
    const Matrix& p2 = tp.value(pred);
    for (std::size_t i = 0; i < p2.data.size(); ++i)
      gp.data[i] += g.data[0] * (p2.data[i] - target.data[i]) / n;
  });
}

}  // namespace glagent::engine
