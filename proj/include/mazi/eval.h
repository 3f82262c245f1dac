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


// Downstream evaluation: link prediction ranked against sampled non-edges,
// learnable edge decoders, and one-vs-rest logistic-regression node
// classification.

#ifndef MAZI_EVAL_H_
#define MAZI_EVAL_H_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mazi/embedding_matrix.h"
#include "mazi/graph.h"

namespace mazi {

using NodePair = std::pair<NodeId, NodeId>;

// Held-out positives of one query set, each with its own negatives.
struct QuerySet {
  std::vector<NodePair> positives;
  std::vector<std::vector<NodePair>> negatives;
};

struct EdgeSplit {
  Graph train;
  std::vector<QuerySet> sets;
  int negatives_per_positive = 0;
};

// Removes llround(fraction * m) edges per set (in order) from g. An edge is
// only taken if neither endpoint would be left without edges. Negatives are
// uniform non-edges of g, distinct within one positive's list.
EdgeSplit make_edge_split(const Graph& g, const std::vector<double>& fractions, int negatives,
                          std::uint64_t seed);

// Link-prediction split: set 0 is validation, set 1 is test.
struct LinkSplit {
  Graph train;
  QuerySet val;
  QuerySet test;
  int negatives_per_positive = 0;
};
LinkSplit make_link_split(const Graph& g, double val_frac = 0.05, double test_frac = 0.10,
                          int negatives = 99, std::uint64_t seed = 1);

// 1 / rank of the positive, counting every negative scored at least as high.
double query_average_precision(double positive, std::span<const double> negatives);
double map_score(std::span<const double> positives,
                 const std::vector<std::vector<double>>& negatives);

enum class DecoderKind { kDot, kDistMult, kMlp2 };
DecoderKind parse_decoder_kind(const std::string& name);
const char* to_string(DecoderKind kind);

// Scores the element-wise product e = x_u * x_v of two embeddings:
//   dot:      sum(e)
//   distmult: relation . e
//   mlp2:     w2 . relu(w1 e + b1) + b2
struct DecoderModel {
  DecoderKind kind = DecoderKind::kDot;
  Eigen::VectorXd relation;
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;
  double b2 = 0.0;

  // Dot model, all-ones relation, or an mlp2 with zero weights.
  static DecoderModel zeros_like(DecoderKind kind, std::size_t dim, std::size_t hidden);
  double logit(const Eigen::Ref<const Eigen::VectorXd>& e) const;
  double score(const EmbeddingMatrix& x, NodePair pair) const;
  std::size_t num_parameters() const;
};

// Mean binary cross-entropy of logits on rows of `features` against 0/1
// labels. When `grad` is given it receives the gradient in the model's
// shape.
double decoder_loss(const DecoderModel& model, const Eigen::MatrixXd& features,
                    const Eigen::VectorXd& labels, DecoderModel* grad = nullptr);

double map_score(const EmbeddingMatrix& x, const QuerySet& queries, const DecoderModel& model);

struct DecoderOptions {
  DecoderKind kind = DecoderKind::kDistMult;
  std::size_t hidden = 0;  // 0 means the embedding dimension
  int epochs = 300;
  double lr = 0.01;
  int eval_every = 10;
  std::uint64_t seed = 1;
};

struct DecoderFit {
  DecoderModel model;
  double val_ap = 0.0;
  double test_ap = 0.0;
};

// Trains on split.sets[0] (positives and their negatives), keeps the
// snapshot with the best validation AP on sets[1] and reports AP on sets[2].
DecoderFit fit_decoder(const EmbeddingMatrix& x, const EdgeSplit& split,
                       const DecoderOptions& options);

// Binary L2 logistic regression minimizing
//   sum_i NLL_i + ||w||^2 / (2C)      (bias unregularized)
struct LogisticModel {
  Eigen::VectorXd w;
  double b = 0.0;
  int iterations = 0;
};
LogisticModel fit_logistic(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                           double c, int max_iter = 5000, double tol = 1e-6,
                           std::vector<double>* objective_trace = nullptr);
double logistic_objective(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                          double c, const Eigen::VectorXd& w, double b);

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
};
// Label sets per sample. Macro averages over labels present in either truth
// or prediction.
F1Scores f1_scores(const std::vector<std::vector<std::int32_t>>& truth,
                   const std::vector<std::vector<std::int32_t>>& predicted);

struct ClassifierOptions {
  int per_class = 10;
  std::vector<double> c_grid{0.1, 1.0, 10.0};
  // Train count per class becomes min(floor(0.75 * class size), per_class).
  bool imbalance = false;
  // Threshold at 0.5 instead of taking the top label.
  bool multilabel = false;
  int max_iter = 5000;
  double tol = 1e-6;
  std::uint64_t seed = 1;
};

struct ClassifierModel {
  Eigen::MatrixXd weights;  // labels x dim
  Eigen::VectorXd bias;
  double c = 1.0;

  std::vector<std::vector<std::int32_t>> predict(const Eigen::MatrixXd& features,
                                                 bool multilabel) const;
};

struct ClassificationResult {
  ClassifierModel model;
  F1Scores val;
  F1Scores test;
  std::vector<NodeId> train_nodes, val_nodes, test_nodes;
};

ClassifierModel train_one_vs_rest(const Eigen::MatrixXd& features,
                                  const std::vector<std::vector<std::int32_t>>& labels,
                                  std::int32_t num_labels, double c, int max_iter, double tol);

ClassificationResult fit_classifier(const EmbeddingMatrix& x, const NodeLabels& labels,
                                    const ClassifierOptions& options);

// Copies selected rows into an Eigen matrix.
Eigen::MatrixXd gather_rows(const EmbeddingMatrix& x, std::span<const NodeId> rows);

}  // namespace mazi

#endif  // MAZI_EVAL_H_
