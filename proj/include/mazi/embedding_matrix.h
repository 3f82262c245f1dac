// Copyright 2026 The Mazi Authors.
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

#ifndef MAZI_EMBEDDING_MATRIX_H_
#define MAZI_EMBEDDING_MATRIX_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mazi {

// Dense row-major n x d matrix of node representations.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim, double fill = 0.0)
      : rows_(rows), dim_(dim), values_(rows * dim, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return rows_ == 0; }

  std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double& at(std::size_t i, std::size_t j) { return values_[i * dim_ + j]; }
  double at(std::size_t i, std::size_t j) const { return values_[i * dim_ + j]; }

  bool all_finite() const {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// log(sigmoid(z)) without overflow.
inline double log_sigmoid(double z) {
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

// word2vec-style text: header "n d", then "node_id v1 ... vd" per row.
// Values are written in shortest round-trip form.
void save_embeddings(const EmbeddingMatrix& x, const std::filesystem::path& path);
// Rows are placed by node id; every id in [0, n) must appear once.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

}  // namespace mazi

#endif  // MAZI_EMBEDDING_MATRIX_H_
