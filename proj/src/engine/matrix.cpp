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

#include "glagent/engine/matrix.hpp"

#include <cmath>

#include "glagent/error.hpp"

namespace glagent::engine {

bool Matrix::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw Error(ErrorCode::DimensionMismatch, "matmul " + std::to_string(a.rows) + "x" +
                                                  std::to_string(a.cols) + " by " +
                                                  std::to_string(b.rows) + "x" +
                                                  std::to_string(b.cols));
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* out = c.data.data() + i * c.cols;
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a.data[i * a.cols + k];
      if (aik == 0.0) continue;
      const double* brow = b.data.data() + k * b.cols;
      for (std::size_t j = 0; j < b.cols; ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

SparseMatrix SparseMatrix::transposed() const {
  SparseMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.row_ptr.assign(cols + 1, 0);
  for (std::size_t c : col_idx) ++t.row_ptr[c + 1];
  for (std::size_t i = 0; i < cols; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
  t.col_idx.resize(nnz());
  t.values.resize(nnz());
  std::vector<std::size_t> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
  // Rows visited in ascending order, so transposed columns stay sorted.
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      const std::size_t pos = cursor[col_idx[k]]++;
      t.col_idx[pos] = r;
      t.values[pos] = values[k];
    }
  }
  return t;
}

Matrix SparseMatrix::multiply(const Matrix& x) const {
  if (x.rows != cols)
    throw Error(ErrorCode::DimensionMismatch, "sparse multiply: operator has " +
                                                  std::to_string(cols) + " columns, input has " +
                                                  std::to_string(x.rows) + " rows");
  Matrix y(rows, x.cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double* out = y.data.data() + r * y.cols;
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      const double w = values[k];
      const double* in = x.data.data() + col_idx[k] * x.cols;
      for (std::size_t j = 0; j < x.cols; ++j) out[j] += w * in[j];
    }
  }
  return y;
}

}  // namespace glagent::engine
