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

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "glagent/engine/matrix.hpp"

namespace glagent {
class Rng;
}

namespace glagent::engine {

struct Var {
  std::size_t id = 0;
};

// Reverse-mode differentiation over dense matrices. Nodes are appended in
// evaluation order; backward() walks them in reverse.
class Tape {
 public:
  Var constant(Matrix value);
  Var variable(Matrix value);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  // Zero-shaped until backward() touches the node.
  const Matrix& grad(Var v) const { return nodes_[v.id].grad; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  void backward(Var scalar_loss);

  // Hash of every ReLU on/off pattern seen so far; used to detect kink crossings.
  std::uint64_t activation_signature() const { return activation_signature_; }

  // Op plumbing.
  using Backward = std::function<void(Tape&, const Matrix& out_grad)>;
  Var push(Matrix value, std::initializer_list<Var> parents, Backward backward);
  Matrix& grad_buffer(Var v);
  void note_activation_pattern(std::span<const double> pre);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Backward backward;
  };
  std::vector<Node> nodes_;
  std::uint64_t activation_signature_ = 0xcbf29ce484222325ULL;
};

// Differentiable ops. Shapes are checked; mismatches throw DimensionMismatch.
Var matmul(Tape& t, Var a, Var b);
Var add(Tape& t, Var a, Var b);
Var add_row(Tape& t, Var a, Var bias);  // bias is 1 x cols, broadcast over rows
Var hadamard(Tape& t, Var a, Var b);
Var scale(Tape& t, Var a, double c);
Var scale_by(Tape& t, Var a, Var s);  // s is 1 x 1
Var reciprocal(Tape& t, Var s);       // s is 1 x 1
Var relu(Tape& t, Var a);
Var sigmoid(Tape& t, Var a);
Var softmax_row(Tape& t, Var a);      // a is 1 x k
Var element(Tape& t, Var a, std::size_t r, std::size_t c);
Var dropout(Tape& t, Var a, double p, Rng& rng);
Var spmm(Tape& t, const SparseOperatorPtr& op, Var a);
Var concat_cols(Tape& t, Var a, Var b);
Var gather_rows(Tape& t, Var a, std::span<const std::size_t> rows);
Var row_dot(Tape& t, Var a, Var b);   // n x 1
// Segment reductions over contiguous row ranges given by offsets (size G+1).
Var segment_sum(Tape& t, Var a, std::span<const std::size_t> offsets);
Var segment_mean(Tape& t, Var a, std::span<const std::size_t> offsets);

// Mean softmax cross-entropy over the listed rows.
Var cross_entropy(Tape& t, Var logits, std::span<const int> labels, std::span<const std::size_t> rows);
// Mean pairwise logistic loss: mean(log(1 + exp(neg - pos))).
Var bpr_loss(Tape& t, Var pos, Var neg);
// 0.5 * mean squared error over all entries.
Var half_mse(Tape& t, Var pred, const Matrix& target);

}  // namespace glagent::engine
