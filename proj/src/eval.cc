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


#include "mazi/eval.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "mazi/random.h"

namespace mazi {

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

}  // namespace

EdgeSplit make_edge_split(const Graph& g, const std::vector<double>& fractions, int negatives,
                          std::uint64_t seed) {
  if (negatives < 0) throw std::invalid_argument("negatives per positive must be nonnegative");
  std::vector<NodePair> edges;
  std::vector<int> remaining(static_cast<std::size_t>(g.num_nodes()), 0);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (const Neighbor& nb : g.neighbors(u)) {
      ++remaining[u];
      if (nb.id > u) edges.emplace_back(u, nb.id);
    }
  }
  const auto m = static_cast<double>(edges.size());
  std::vector<std::size_t> need;
  for (double f : fractions) {
    if (!(f >= 0.0) || f > 1.0) throw std::invalid_argument("split fractions must lie in [0, 1]");
    need.push_back(static_cast<std::size_t>(std::llround(f * m)));
  }
  Rng rng = make_rng(seed, Stream::kSplit);
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle_in_place(order, rng);

  EdgeSplit split;
  split.negatives_per_positive = negatives;
  split.sets.resize(fractions.size());
  std::vector<char> held(edges.size(), 0);
  std::size_t cursor = 0;
  for (std::size_t s = 0; s < need.size(); ++s) {
    auto& positives = split.sets[s].positives;
    while (positives.size() < need[s]) {
      if (cursor == order.size()) {
        throw std::runtime_error("graph too sparse: held out " + std::to_string(positives.size()) +
                                 " of " + std::to_string(need[s]) + " edges for set " +
                                 std::to_string(s) + " without isolating a node");
      }
      const std::size_t e = order[cursor++];
      auto [u, v] = edges[e];
      if (remaining[u] > 1 && remaining[v] > 1) {
        --remaining[u];
        --remaining[v];
        held[e] = 1;
        positives.push_back(edges[e]);
      }
    }
  }

  GraphBuilder builder(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    if (g.self_loop_weight(u) > 0.0) builder.add_edge(u, u, g.self_loop_weight(u));
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!held[e]) builder.add_edge(edges[e].first, edges[e].second, g.edge_weight(edges[e].first, edges[e].second));
  }
  split.train = std::move(builder).build();

  const auto n = static_cast<std::uint64_t>(g.num_nodes());
  const double non_edges = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0 - m;
  if (negatives > 0 && non_edges < negatives) {
    throw std::runtime_error("graph has only " + std::to_string(static_cast<long long>(non_edges)) +
                             " non-edges, fewer than the requested negatives");
  }
  for (std::size_t s = 0; s < split.sets.size(); ++s) {
    Rng neg_rng = make_rng(seed, Stream::kSplit, {s + 1});
    auto& set = split.sets[s];
    set.negatives.resize(set.positives.size());
    for (auto& list : set.negatives) {
      std::set<NodePair> seen;
      while (list.size() < static_cast<std::size_t>(negatives)) {
        auto a = static_cast<NodeId>(uniform_index(neg_rng, n));
        auto b = static_cast<NodeId>(uniform_index(neg_rng, n));
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        if (g.has_edge(a, b) || !seen.emplace(a, b).second) continue;
        list.emplace_back(a, b);
      }
    }
  }
  return split;
}

LinkSplit make_link_split(const Graph& g, double val_frac, double test_frac, int negatives,
                          std::uint64_t seed) {
  EdgeSplit s = make_edge_split(g, {val_frac, test_frac}, negatives, seed);
  return {std::move(s.train), std::move(s.sets[0]), std::move(s.sets[1]), negatives};
}

double query_average_precision(double positive, std::span<const double> negatives) {
  std::size_t ahead = 0;
  for (double s : negatives) {
    if (s >= positive) ++ahead;
  }
  return 1.0 / static_cast<double>(1 + ahead);
}

double map_score(std::span<const double> positives,
                 const std::vector<std::vector<double>>& negatives) {
  if (positives.size() != negatives.size()) {
    throw std::invalid_argument("every positive needs its own negative list");
  }
  if (positives.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    sum += query_average_precision(positives[i], negatives[i]);
  }
  return sum / static_cast<double>(positives.size());
}

DecoderKind parse_decoder_kind(const std::string& name) {
  if (name == "dot") return DecoderKind::kDot;
  if (name == "distmult") return DecoderKind::kDistMult;
  if (name == "mlp2") return DecoderKind::kMlp2;
  throw std::invalid_argument("unknown decoder '" + name + "' (expected dot, distmult or mlp2)");
}

const char* to_string(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::kDot: return "dot";
    case DecoderKind::kDistMult: return "distmult";
    case DecoderKind::kMlp2: return "mlp2";
  }
  return "dot";
}

DecoderModel DecoderModel::zeros_like(DecoderKind kind, std::size_t dim, std::size_t hidden) {
  DecoderModel m;
  m.kind = kind;
  const auto d = static_cast<Eigen::Index>(dim);
  const auto h = static_cast<Eigen::Index>(hidden);
  if (kind == DecoderKind::kDistMult) m.relation = Eigen::VectorXd::Ones(d);
  if (kind == DecoderKind::kMlp2) {
    m.w1 = Eigen::MatrixXd::Zero(h, d);
    m.b1 = Eigen::VectorXd::Zero(h);
    m.w2 = Eigen::VectorXd::Zero(h);
  }
  return m;
}

double DecoderModel::logit(const Eigen::Ref<const Eigen::VectorXd>& e) const {
  switch (kind) {
    case DecoderKind::kDot: return e.sum();
    case DecoderKind::kDistMult: return relation.dot(e);
    case DecoderKind::kMlp2: return w2.dot((w1 * e + b1).cwiseMax(0.0)) + b2;
  }
  return 0.0;
}

double DecoderModel::score(const EmbeddingMatrix& x, NodePair pair) const {
  auto a = x.row(static_cast<std::size_t>(pair.first));
  auto b = x.row(static_cast<std::size_t>(pair.second));
  if (kind == DecoderKind::kDot) return dot(a, b);
  Eigen::VectorXd e(static_cast<Eigen::Index>(a.size()));
  for (std::size_t t = 0; t < a.size(); ++t) e[static_cast<Eigen::Index>(t)] = a[t] * b[t];
  return logit(e);
}

std::size_t DecoderModel::num_parameters() const {
  return static_cast<std::size_t>(relation.size() + w1.size() + b1.size() + w2.size()) +
         (kind == DecoderKind::kMlp2 ? 1 : 0);
}

double decoder_loss(const DecoderModel& model, const Eigen::MatrixXd& features,
                    const Eigen::VectorXd& labels, DecoderModel* grad) {
  const auto n = features.rows();
  if (n == 0) throw std::invalid_argument("decoder loss needs at least one sample");
  Eigen::VectorXd z;
  Eigen::MatrixXd pre, hidden;
  switch (model.kind) {
    case DecoderKind::kDot: z = features.rowwise().sum(); break;
    case DecoderKind::kDistMult: z = features * model.relation; break;
    case DecoderKind::kMlp2:
      pre = (features * model.w1.transpose()).rowwise() + model.b1.transpose();
      hidden = pre.cwiseMax(0.0);
      z = (hidden * model.w2).array() + model.b2;
      break;
  }
  double loss = 0.0;
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    loss += softplus(z[i]) - labels[i] * z[i];
    r[i] = (1.0 / (1.0 + std::exp(-z[i])) - labels[i]) / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);
  if (grad != nullptr) {
    *grad = DecoderModel{};
    grad->kind = model.kind;
    if (model.kind == DecoderKind::kDistMult) grad->relation = features.transpose() * r;
    if (model.kind == DecoderKind::kMlp2) {
      grad->w2 = hidden.transpose() * r;
      grad->b2 = r.sum();
      Eigen::MatrixXd delta = (r * model.w2.transpose()).array() * (pre.array() > 0.0).cast<double>();
      grad->w1 = delta.transpose() * features;
      grad->b1 = delta.colwise().sum().transpose();
    }
  }
  return loss;
}

double map_score(const EmbeddingMatrix& x, const QuerySet& queries, const DecoderModel& model) {
  std::vector<double> pos;
  std::vector<std::vector<double>> neg;
  pos.reserve(queries.positives.size());
  for (std::size_t i = 0; i < queries.positives.size(); ++i) {
    pos.push_back(model.score(x, queries.positives[i]));
    std::vector<double> ns;
    ns.reserve(queries.negatives[i].size());
    for (const NodePair& p : queries.negatives[i]) ns.push_back(model.score(x, p));
    neg.push_back(std::move(ns));
  }
  return map_score(pos, neg);
}

namespace {

// Parameters of a decoder viewed as one flat list of blocks.
template <typename Fn>
void for_each_block(DecoderModel& a, DecoderModel& b, Fn&& fn) {
  fn(a.relation, b.relation);
  fn(a.w1, b.w1);
  fn(a.b1, b.b1);
  fn(a.w2, b.w2);
}

class Adam {
 public:
  explicit Adam(const DecoderModel& shape) : m_(shape), v_(shape) {
    auto zero = [](auto& x, auto&) { x.setZero(); };
    for_each_block(m_, v_, zero);
    for_each_block(v_, m_, zero);
  }

  void step(DecoderModel& model, DecoderModel& grad, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(kB1, t_), c2 = 1.0 - std::pow(kB2, t_);
    auto update = [&](auto& p, auto& g, auto& m, auto& v) {
      if (p.size() == 0) return;
      m = kB1 * m + (1.0 - kB1) * g;
      v = kB2 * v + (1.0 - kB2) * g.cwiseProduct(g);
      p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
    };
    update(model.relation, grad.relation, m_.relation, v_.relation);
    update(model.w1, grad.w1, m_.w1, v_.w1);
    update(model.b1, grad.b1, m_.b1, v_.b1);
    update(model.w2, grad.w2, m_.w2, v_.w2);
    m_.b2 = kB1 * m_.b2 + (1.0 - kB1) * grad.b2;
    v_.b2 = kB2 * v_.b2 + (1.0 - kB2) * grad.b2 * grad.b2;
    model.b2 -= lr * (m_.b2 / c1) / (std::sqrt(v_.b2 / c2) + kEps);
  }

 private:
  static constexpr double kB1 = 0.9, kB2 = 0.999, kEps = 1e-8;
  DecoderModel m_, v_;
  int t_ = 0;
};

void append_product(const EmbeddingMatrix& x, NodePair p, Eigen::MatrixXd& out, Eigen::Index row) {
  auto a = x.row(static_cast<std::size_t>(p.first));
  auto b = x.row(static_cast<std::size_t>(p.second));
  for (std::size_t t = 0; t < a.size(); ++t) out(row, static_cast<Eigen::Index>(t)) = a[t] * b[t];
}

}  // namespace

DecoderFit fit_decoder(const EmbeddingMatrix& x, const EdgeSplit& split,
                       const DecoderOptions& options) {
  if (split.sets.size() != 3) throw std::invalid_argument("decoder split needs train, val and test sets");
  const std::size_t d = x.dim();
  const std::size_t hidden = options.hidden == 0 ? d : options.hidden;
  DecoderFit fit;
  fit.model = DecoderModel::zeros_like(options.kind, d, hidden);
  if (options.kind == DecoderKind::kMlp2) {
    Rng rng = make_rng(options.seed, Stream::kDecoder);
    const double a1 = std::sqrt(6.0 / static_cast<double>(d + hidden));
    const double a2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
    for (Eigen::Index i = 0; i < fit.model.w1.size(); ++i) fit.model.w1.data()[i] = a1 * (2.0 * uniform01(rng) - 1.0);
    for (Eigen::Index i = 0; i < fit.model.w2.size(); ++i) fit.model.w2[i] = a2 * (2.0 * uniform01(rng) - 1.0);
  }
  const QuerySet& train = split.sets[0];
  std::size_t rows = train.positives.size();
  for (const auto& list : train.negatives) rows += list.size();
  Eigen::MatrixXd features(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  Eigen::VectorXd labels(static_cast<Eigen::Index>(rows));
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < train.positives.size(); ++i) {
    append_product(x, train.positives[i], features, r);
    labels[r++] = 1.0;
    for (const NodePair& p : train.negatives[i]) {
      append_product(x, p, features, r);
      labels[r++] = 0.0;
    }
  }

  DecoderModel best = fit.model;
  double best_val = map_score(x, split.sets[1], fit.model);
  if (options.kind != DecoderKind::kDot && rows > 0) {
    Adam adam(fit.model);
    DecoderModel grad;
    for (int epoch = 1; epoch <= options.epochs; ++epoch) {
      const double loss = decoder_loss(fit.model, features, labels, &grad);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("decoder training diverged at epoch " + std::to_string(epoch));
      }
      adam.step(fit.model, grad, options.lr);
      if (epoch % std::max(1, options.eval_every) == 0 || epoch == options.epochs) {
        const double val = map_score(x, split.sets[1], fit.model);
        if (val > best_val) {
          best_val = val;
          best = fit.model;
        }
      }
    }
  }
  fit.model = std::move(best);
  fit.val_ap = best_val;
  fit.test_ap = map_score(x, split.sets[2], fit.model);
  return fit;
}

double logistic_objective(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                          double c, const Eigen::VectorXd& w, double b) {
  const Eigen::VectorXd z = (features * w).array() + b;
  double f = 0.5 * w.squaredNorm() / c;
  for (Eigen::Index i = 0; i < z.size(); ++i) f += softplus(z[i]) - labels[i] * z[i];
  return f;
}

LogisticModel fit_logistic(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels,
                           double c, int max_iter, double tol,
                           std::vector<double>* objective_trace) {
  if (!(c > 0.0)) throw std::invalid_argument("regularization C must be positive");
  const Eigen::Index d = features.cols();
  const Eigen::Index n = features.rows();
  // Parameters theta = [w; b].
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  auto evaluate = [&](const Eigen::VectorXd& t, Eigen::VectorXd& grad) {
    const Eigen::VectorXd z = (features * t.head(d)).array() + t[d];
    double f = 0.5 * t.head(d).squaredNorm() / c;
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      f += softplus(z[i]) - labels[i] * z[i];
      r[i] = 1.0 / (1.0 + std::exp(-z[i])) - labels[i];
    }
    grad.resize(d + 1);
    grad.head(d) = features.transpose() * r + t.head(d) / c;
    grad[d] = r.sum();
    return f;
  };
  Eigen::VectorXd grad, new_grad, new_theta;
  double f = evaluate(theta, grad);
  if (objective_trace) objective_trace->push_back(f);
  const double threshold = tol * std::max(1.0, grad.norm());
  constexpr int kMemory = 10;
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  LogisticModel model;
  int iter = 0;
  for (; iter < max_iter && grad.norm() > threshold; ++iter) {
    // Two-loop recursion for the quasi-Newton direction.
    Eigen::VectorXd q = grad;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * s_hist[k].dot(q);
      q -= alpha[k] * y_hist[k];
    }
    if (!s_hist.empty()) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(q);
      q += (alpha[k] - beta) * s_hist[k];
    }
    Eigen::VectorXd direction = -q;
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {
      direction = -grad;
      slope = -grad.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }
    double step = s_hist.empty() ? std::min(1.0, 1.0 / grad.norm()) : 1.0;
    double new_f = 0.0;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      new_theta = theta + step * direction;
      new_f = evaluate(new_theta, new_grad);
      if (new_f <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    Eigen::VectorXd s = new_theta - theta;
    Eigen::VectorXd y = new_grad - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * y.squaredNorm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    theta.swap(new_theta);
    grad.swap(new_grad);
    f = new_f;
    if (objective_trace) objective_trace->push_back(f);
  }
  model.w = theta.head(d);
  model.b = theta[d];
  model.iterations = iter;
  return model;
}

F1Scores f1_scores(const std::vector<std::vector<std::int32_t>>& truth,
                   const std::vector<std::vector<std::int32_t>>& predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("prediction count mismatch");
  std::int32_t num_labels = 0;
  for (const auto* sets : {&truth, &predicted}) {
    for (const auto& s : *sets) {
      for (std::int32_t l : s) num_labels = std::max(num_labels, l + 1);
    }
  }
  std::vector<double> tp(static_cast<std::size_t>(num_labels), 0.0), fp = tp, fn = tp;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& t = truth[i];
    const auto& p = predicted[i];
    for (std::int32_t l : p) {
      (std::find(t.begin(), t.end(), l) != t.end() ? tp : fp)[l] += 1.0;
    }
    for (std::int32_t l : t) {
      if (std::find(p.begin(), p.end(), l) == p.end()) fn[l] += 1.0;
    }
  }
  F1Scores out;
  double stp = 0.0, sfp = 0.0, sfn = 0.0, macro = 0.0;
  int present = 0;
  for (std::int32_t l = 0; l < num_labels; ++l) {
    stp += tp[l];
    sfp += fp[l];
    sfn += fn[l];
    const double denom = 2.0 * tp[l] + fp[l] + fn[l];
    if (denom == 0.0) continue;
    macro += 2.0 * tp[l] / denom;
    ++present;
  }
  const double denom = 2.0 * stp + sfp + sfn;
  out.micro = denom > 0.0 ? 2.0 * stp / denom : 0.0;
  out.macro = present > 0 ? macro / present : 0.0;
  return out;
}

std::vector<std::vector<std::int32_t>> ClassifierModel::predict(const Eigen::MatrixXd& features,
                                                                bool multilabel) const {
  const Eigen::MatrixXd scores = (features * weights.transpose()).rowwise() + bias.transpose();
  std::vector<std::vector<std::int32_t>> out(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    if (multilabel) {
      for (Eigen::Index l = 0; l < scores.cols(); ++l) {
        if (scores(i, l) > 0.0) out[i].push_back(static_cast<std::int32_t>(l));
      }
    } else if (scores.cols() > 0) {
      Eigen::Index best = 0;
      for (Eigen::Index l = 1; l < scores.cols(); ++l) {
        if (scores(i, l) > scores(i, best)) best = l;
      }
      out[i].push_back(static_cast<std::int32_t>(best));
    }
  }
  return out;
}

ClassifierModel train_one_vs_rest(const Eigen::MatrixXd& features,
                                  const std::vector<std::vector<std::int32_t>>& labels,
                                  std::int32_t num_labels, double c, int max_iter, double tol) {
  ClassifierModel model;
  model.c = c;
  model.weights = Eigen::MatrixXd::Zero(num_labels, features.cols());
  // Labels without a positive training sample never fire.
  model.bias = Eigen::VectorXd::Constant(num_labels, -std::numeric_limits<double>::infinity());
  Eigen::VectorXd y(features.rows());
  for (std::int32_t l = 0; l < num_labels; ++l) {
    bool any = false;
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      const auto& ls = labels[static_cast<std::size_t>(i)];
      y[i] = std::find(ls.begin(), ls.end(), l) != ls.end() ? 1.0 : 0.0;
      any = any || y[i] > 0.0;
    }
    if (!any) continue;
    LogisticModel m = fit_logistic(features, y, c, max_iter, tol);
    model.weights.row(l) = m.w.transpose();
    model.bias[l] = m.b;
  }
  return model;
}

Eigen::MatrixXd gather_rows(const EmbeddingMatrix& x, std::span<const NodeId> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(x.dim()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto r = x.row(static_cast<std::size_t>(rows[i]));
    for (std::size_t t = 0; t < r.size(); ++t) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = r[t];
  }
  return out;
}

ClassificationResult fit_classifier(const EmbeddingMatrix& x, const NodeLabels& labels,
                                    const ClassifierOptions& options) {
  if (labels.labels.size() != x.rows()) {
    throw std::invalid_argument("label count " + std::to_string(labels.labels.size()) +
                                " does not match embedding rows " + std::to_string(x.rows()));
  }
  if (options.c_grid.empty()) throw std::invalid_argument("empty C grid");
  if (options.per_class < 1) throw std::invalid_argument("per_class must be at least 1");
  Rng rng = make_rng(options.seed, Stream::kClassifier);
  std::vector<std::vector<NodeId>> members(static_cast<std::size_t>(labels.num_labels));
  for (NodeId v = 0; v < static_cast<NodeId>(labels.labels.size()); ++v) {
    for (std::int32_t l : labels.labels[v]) members[l].push_back(v);
  }
  std::vector<char> in_train(labels.labels.size(), 0);
  ClassificationResult result;
  for (std::int32_t l = 0; l < labels.num_labels; ++l) {
    auto& pool = members[l];
    if (pool.empty()) continue;
    shuffle_in_place(pool, rng);
    std::size_t want = static_cast<std::size_t>(options.per_class);
    if (options.imbalance) {
      want = std::min(want, static_cast<std::size_t>(std::floor(0.75 * static_cast<double>(pool.size()))));
    }
    std::size_t taken = 0;
    for (NodeId v : pool) {
      if (taken == want) break;
      if (in_train[v]) {
        ++taken;  // already a training sample through another label
        continue;
      }
      in_train[v] = 1;
      result.train_nodes.push_back(v);
      ++taken;
    }
    const bool present = std::any_of(pool.begin(), pool.end(), [&](NodeId v) { return in_train[v] != 0; });
    if (!present) {
      throw std::runtime_error("label " + std::to_string(l) + " has no training sample");
    }
  }
  std::sort(result.train_nodes.begin(), result.train_nodes.end());
  std::vector<NodeId> rest;
  for (NodeId v = 0; v < static_cast<NodeId>(labels.labels.size()); ++v) {
    if (!in_train[v] && !labels.labels[v].empty()) rest.push_back(v);
  }
  shuffle_in_place(rest, rng);
  const std::size_t half = rest.size() / 2;
  result.val_nodes.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(half));
  result.test_nodes.assign(rest.begin() + static_cast<std::ptrdiff_t>(half), rest.end());
  std::sort(result.val_nodes.begin(), result.val_nodes.end());
  std::sort(result.test_nodes.begin(), result.test_nodes.end());

  auto truth_of = [&](const std::vector<NodeId>& nodes) {
    std::vector<std::vector<std::int32_t>> t;
    for (NodeId v : nodes) t.push_back(labels.labels[v]);
    return t;
  };
  const Eigen::MatrixXd train_x = gather_rows(x, result.train_nodes);
  const Eigen::MatrixXd val_x = gather_rows(x, result.val_nodes);
  const Eigen::MatrixXd test_x = gather_rows(x, result.test_nodes);
  const auto train_y = truth_of(result.train_nodes);
  const auto val_y = truth_of(result.val_nodes);
  const auto test_y = truth_of(result.test_nodes);
  bool first = true;
  for (double c : options.c_grid) {
    ClassifierModel model =
        train_one_vs_rest(train_x, train_y, labels.num_labels, c, options.max_iter, options.tol);
    const F1Scores val = f1_scores(val_y, model.predict(val_x, options.multilabel));
    if (first || val.macro > result.val.macro) {
      result.model = std::move(model);
      result.val = val;
      first = false;
    }
  }
  result.test = f1_scores(test_y, result.model.predict(test_x, options.multilabel));
  return result;
}

}  // namespace mazi
