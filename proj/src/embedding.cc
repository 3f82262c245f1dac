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


#include "mazi/embedding.h"

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace mazi {

namespace {

// Vose's construction into caller-provided slices.
void build_alias(std::span<const double> weights, double* prob, std::uint32_t* alias) {
  const std::size_t n = weights.size();
  double sum = 0.0;
  for (double w : weights) sum += w;
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / sum;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    prob[s] = scaled[s];
    alias[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::uint32_t i : large) {
    prob[i] = 1.0;
    alias[i] = i;
  }
  for (std::uint32_t i : small) {
    prob[i] = 1.0;
    alias[i] = i;
  }
}

// Per-node alias tables over adjacency lists, aligned with the CSR layout.
class NeighborSampler {
 public:
  explicit NeighborSampler(const Graph& g) : g_(g) {
    offsets_.assign(static_cast<std::size_t>(g.num_nodes()) + 1, 0);
    for (NodeId v = 0; v < g.num_nodes(); ++v) offsets_[v + 1] = offsets_[v] + g.neighbors(v).size();
    prob_.resize(offsets_.back());
    alias_.resize(offsets_.back());
    std::vector<double> w;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      auto nbrs = g.neighbors(v);
      if (nbrs.empty()) continue;
      w.resize(nbrs.size());
      for (std::size_t i = 0; i < nbrs.size(); ++i) w[i] = nbrs[i].weight;
      build_alias(w, prob_.data() + offsets_[v], alias_.data() + offsets_[v]);
    }
  }

  // Returns -1 when v has no neighbour other than itself.
  NodeId next(NodeId v, Rng& rng) const {
    const std::size_t begin = offsets_[v];
    const std::size_t count = offsets_[v + 1] - begin;
    if (count == 0) return -1;
    auto column = static_cast<std::uint32_t>(uniform_index(rng, count));
    if (uniform01(rng) >= prob_[begin + column]) column = alias_[begin + column];
    return g_.neighbors(v)[column].id;
  }

 private:
  const Graph& g_;
  std::vector<std::size_t> offsets_;
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace

AliasTable::AliasTable(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("alias table needs at least one weight");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("invalid sampling weight");
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("sampling weights sum to zero");
  prob_.resize(weights.size());
  alias_.resize(weights.size());
  normalized_.resize(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) normalized_[i] = weights[i] / sum;
  build_alias(weights, prob_.data(), alias_.data());
}

AliasTable negative_table(const Graph& g) {
  std::vector<double> w(static_cast<std::size_t>(g.num_nodes()));
  for (NodeId v = 0; v < g.num_nodes(); ++v) w[v] = std::pow(g.degree_unchecked(v), 0.75);
  if (std::accumulate(w.begin(), w.end(), 0.0) <= 0.0) std::fill(w.begin(), w.end(), 1.0);
  return AliasTable(w);
}

WalkCorpus random_walks(const Graph& g, const WalkOptions& options, std::uint64_t seed,
                        std::uint64_t call) {
  if (options.walk_length < 2) throw std::invalid_argument("walk length must be at least 2");
  if (options.walks_per_node < 0) throw std::invalid_argument("negative walks per node");
  if (!(options.p > 0.0) || !(options.q > 0.0)) {
    throw std::invalid_argument("p and q must be positive");
  }
  NeighborSampler sampler(g);
  const bool second_order = options.p != 1.0 || options.q != 1.0;
  const double inv_p = 1.0 / options.p, inv_q = 1.0 / options.q;
  const double bound = std::max({inv_p, 1.0, inv_q});

  WalkCorpus corpus;
  const std::size_t total = static_cast<std::size_t>(g.num_nodes()) *
                            static_cast<std::size_t>(options.walks_per_node);
  corpus.nodes.reserve(total * static_cast<std::size_t>(options.walk_length));
  corpus.offsets.reserve(total + 1);
  for (NodeId start = 0; start < g.num_nodes(); ++start) {
    Rng rng = make_rng(seed, Stream::kWalks, {call, static_cast<std::uint64_t>(start)});
    for (int r = 0; r < options.walks_per_node; ++r) {
      NodeId prev = -1, cur = start;
      corpus.nodes.push_back(cur);
      for (int step = 1; step < options.walk_length; ++step) {
        NodeId next = sampler.next(cur, rng);
        if (next < 0) break;
        if (second_order && prev >= 0) {
          // Rejection sampling against the biased transition weights.
          for (;;) {
            const double bias = next == prev ? inv_p : (g.has_edge(prev, next) ? 1.0 : inv_q);
            if (uniform01(rng) * bound < bias) break;
            next = sampler.next(cur, rng);
          }
        }
        prev = cur;
        cur = next;
        corpus.nodes.push_back(cur);
      }
      corpus.offsets.push_back(corpus.nodes.size());
    }
  }
  return corpus;
}

std::vector<std::pair<NodeId, NodeId>> contexts_from_walks(const WalkCorpus& corpus,
                                                           int window) {
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (std::size_t i = 0; i < corpus.num_walks(); ++i) {
    for_each_context_pair(corpus.walk(i), window,
                          [&](NodeId c, NodeId o) { pairs.emplace_back(c, o); });
  }
  return pairs;
}

SkipGramGradients sg_loss_and_grads(const EmbeddingMatrix& x, const WalkContext& ctx,
                                    double alpha) {
  const std::size_t d = x.dim();
  auto xc = x.row(static_cast<std::size_t>(ctx.center));
  SkipGramGradients out;
  out.center.assign(d, 0.0);
  const double np = static_cast<double>(ctx.positives.size());
  const double nn = static_cast<double>(ctx.negatives.size());
  for (NodeId j : ctx.positives) {
    auto xj = x.row(static_cast<std::size_t>(j));
    const double z = dot(xc, xj);
    const double coef = (1.0 - sigmoid(z)) / np;
    out.loss += log_sigmoid(z) / np;
    std::vector<double> g(d);
    for (std::size_t t = 0; t < d; ++t) {
      out.center[t] += coef * xj[t];
      g[t] = coef * xc[t];
    }
    out.positives.push_back(std::move(g));
  }
  for (NodeId n : ctx.negatives) {
    auto xn = x.row(static_cast<std::size_t>(n));
    const double z = dot(xc, xn);
    const double coef = -alpha * sigmoid(z) / nn;
    out.loss += alpha * log_sigmoid(-z) / nn;
    std::vector<double> g(d);
    for (std::size_t t = 0; t < d; ++t) {
      out.center[t] += coef * xn[t];
      g[t] = coef * xc[t];
    }
    out.negatives.push_back(std::move(g));
  }
  return out;
}

ProximityGradient comm_loss_and_grad(const EmbeddingMatrix& x_level,
                                     const EmbeddingMatrix& x_parent, NodeId v,
                                     CommunityId parent, double beta) {
  auto xv = x_level.row(static_cast<std::size_t>(v));
  auto xp = x_parent.row(static_cast<std::size_t>(parent));
  ProximityGradient out;
  out.gradient.assign(x_level.dim(), 0.0);
  if (beta == 0.0) return out;
  const double z = dot(xv, xp);
  out.loss = beta * log_sigmoid(z);
  const double coef = beta * (1.0 - sigmoid(z));
  for (std::size_t t = 0; t < xp.size(); ++t) out.gradient[t] = coef * xp[t];
  return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = std::sqrt(dot(a, a)), nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

namespace {

template <bool Atomic>
inline double load(const double* p) {
  if constexpr (Atomic) {
    return std::atomic_ref<double>(*const_cast<double*>(p)).load(std::memory_order_relaxed);
  } else {
    return *p;
  }
}

template <bool Atomic>
inline void add_scaled(double* row, const double* v, double scale, std::size_t d) {
  for (std::size_t t = 0; t < d; ++t) {
    if constexpr (Atomic) {
      std::atomic_ref<double> r(row[t]);
      r.store(r.load(std::memory_order_relaxed) + scale * v[t], std::memory_order_relaxed);
    } else {
      row[t] += scale * v[t];
    }
  }
}

template <bool Atomic>
inline double dot_row(const double* a, const double* row, std::size_t d) {
  double s = 0.0;
  for (std::size_t t = 0; t < d; ++t) s += a[t] * load<Atomic>(row + t);
  return s;
}

struct Totals {
  double sg = 0.0;
  double comm = 0.0;
  std::uint64_t centers = 0;
};

class Trainer {
 public:
  Trainer(const Graph& g, EmbeddingMatrix& x, const HierarchyLinks& links,
          const SkipGramOptions& options)
      : g_(g), x_(x), links_(links), opt_(options), negatives_(negative_table(g)), d_(x.dim()) {
    if (links.parent_beta != 0.0 && links.parent_of != nullptr && links.parent_x != nullptr) {
      if (links.parent_of->size() != static_cast<std::size_t>(g.num_nodes()) ||
          links.parent_x->rows() != static_cast<std::size_t>(links.parent_of->num_communities) ||
          links.parent_x->dim() != d_) {
        throw std::invalid_argument("parent links do not match the level");
      }
      use_parent_ = true;
    }
    if (links.child_beta != 0.0 && links.child_assignment != nullptr &&
        links.child_x != nullptr) {
      const auto& h = *links.child_assignment;
      if (h.num_communities != g.num_nodes() || links.child_x->rows() != h.size() ||
          links.child_x->dim() != d_) {
        throw std::invalid_argument("child links do not match the level");
      }
      use_child_ = true;
      child_offsets_.assign(static_cast<std::size_t>(g.num_nodes()) + 1, 0);
      for (CommunityId c : h.membership) ++child_offsets_[c + 1];
      for (std::size_t i = 1; i < child_offsets_.size(); ++i) {
        child_offsets_[i] += child_offsets_[i - 1];
      }
      child_ids_.resize(h.size());
      auto cursor = child_offsets_;
      for (std::size_t u = 0; u < h.size(); ++u) {
        child_ids_[cursor[h.membership[u]]++] = static_cast<NodeId>(u);
      }
      // Child terms belong to the finer level's objective, which is
      // normalized by its own node count.
      child_scale_ = links.child_beta * static_cast<double>(g.num_nodes()) /
                     static_cast<double>(h.size());
    }
    if (opt_.optimizer == Optimizer::kAdam) {
      adam_m_.assign(x.rows() * d_, 0.0);
      adam_v_.assign(x.rows() * d_, 0.0);
      adam_steps_.assign(x.rows(), 0);
    }
  }

  template <bool Atomic>
  void run_walks(const WalkCorpus& corpus, std::span<const std::size_t> order,
                 std::uint64_t seed, std::uint64_t call, std::uint64_t epoch, Totals& totals) {
    Scratch s(d_, opt_);
    for (std::size_t w : order) {
      Rng rng = make_rng(seed, Stream::kNegatives, {call, epoch, static_cast<std::uint64_t>(w)});
      auto walk = corpus.walk(w);
      const auto len = static_cast<std::ptrdiff_t>(walk.size());
      for (std::ptrdiff_t i = 0; i < len; ++i) {
        s.positives.clear();
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - opt_.window);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + opt_.window);
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
          if (j != i && walk[j] != walk[i]) s.positives.push_back(walk[j]);
        }
        if (s.positives.empty()) continue;
        s.negatives.clear();
        for (int r = 0; r < opt_.negatives; ++r) {
          s.negatives.push_back(static_cast<NodeId>(negatives_.sample(rng)));
        }
        step<Atomic>(walk[i], s, totals);
      }
    }
  }

 private:
  struct Scratch {
    Scratch(std::size_t d, const SkipGramOptions& opt)
        : center(d), grad(d), update(d) {
      positives.reserve(static_cast<std::size_t>(2 * opt.window));
      negatives.reserve(static_cast<std::size_t>(opt.negatives));
      pos_coef.reserve(static_cast<std::size_t>(2 * opt.window));
      neg_coef.reserve(static_cast<std::size_t>(opt.negatives));
    }
    std::vector<double> center, grad, update;
    std::vector<NodeId> positives, negatives;
    std::vector<double> pos_coef, neg_coef;
  };

  template <bool Atomic>
  void step(NodeId c, Scratch& s, Totals& totals) {
    const std::size_t d = d_;
    double* xc = x_.data() + static_cast<std::size_t>(c) * d;
    for (std::size_t t = 0; t < d; ++t) s.center[t] = load<Atomic>(xc + t);
    const double* cv = s.center.data();
    std::fill(s.grad.begin(), s.grad.end(), 0.0);

    double sg = 0.0;
    const double np = static_cast<double>(s.positives.size());
    s.pos_coef.clear();
    for (NodeId j : s.positives) {
      const double* xj = x_.data() + static_cast<std::size_t>(j) * d;
      const double z = dot_row<Atomic>(cv, xj, d);
      sg += log_sigmoid(z);
      const double coef = (1.0 - sigmoid(z)) / np;
      s.pos_coef.push_back(coef);
      for (std::size_t t = 0; t < d; ++t) s.grad[t] += coef * load<Atomic>(xj + t);
    }
    sg /= np;
    const double nn = static_cast<double>(s.negatives.size());
    s.neg_coef.clear();
    double neg = 0.0;
    for (NodeId n : s.negatives) {
      const double* xn = x_.data() + static_cast<std::size_t>(n) * d;
      const double z = dot_row<Atomic>(cv, xn, d);
      neg += log_sigmoid(-z);
      const double coef = -opt_.alpha * sigmoid(z) / nn;
      s.neg_coef.push_back(coef);
      for (std::size_t t = 0; t < d; ++t) s.grad[t] += coef * load<Atomic>(xn + t);
    }
    if (nn > 0.0) sg += opt_.alpha * neg / nn;

    double comm = 0.0;
    if (use_parent_) {
      const CommunityId p = (*links_.parent_of)[c];
      const double* xp = links_.parent_x->data() + static_cast<std::size_t>(p) * d;
      const double z = dot(s.center, {xp, d});
      comm += links_.parent_beta * log_sigmoid(z);
      const double coef = links_.parent_beta * (1.0 - sigmoid(z));
      for (std::size_t t = 0; t < d; ++t) s.grad[t] += coef * xp[t];
    }
    if (use_child_) {
      for (std::size_t i = child_offsets_[c]; i < child_offsets_[c + 1]; ++i) {
        const double* xu = links_.child_x->data() + static_cast<std::size_t>(child_ids_[i]) * d;
        const double z = dot(s.center, {xu, d});
        comm += child_scale_ * log_sigmoid(z);
        const double coef = child_scale_ * (1.0 - sigmoid(z));
        for (std::size_t t = 0; t < d; ++t) s.grad[t] += coef * xu[t];
      }
    }
    if (!std::isfinite(sg) || !std::isfinite(comm)) {
      throw std::runtime_error("non-finite objective at node " + std::to_string(c) +
                               "; lower the learning rate");
    }
    totals.sg += sg;
    totals.comm += comm;
    ++totals.centers;

    const double lr = opt_.lr;
    if (opt_.optimizer == Optimizer::kAdam) {
      for (std::size_t k = 0; k < s.positives.size(); ++k) {
        adam_row(s.positives[k], cv, s.pos_coef[k], s);
      }
      for (std::size_t k = 0; k < s.negatives.size(); ++k) {
        adam_row(s.negatives[k], cv, s.neg_coef[k], s);
      }
      adam_row(c, s.grad.data(), 1.0, s);
      return;
    }
    for (std::size_t k = 0; k < s.positives.size(); ++k) {
      add_scaled<Atomic>(x_.data() + static_cast<std::size_t>(s.positives[k]) * d, cv,
                         lr * s.pos_coef[k], d);
    }
    for (std::size_t k = 0; k < s.negatives.size(); ++k) {
      add_scaled<Atomic>(x_.data() + static_cast<std::size_t>(s.negatives[k]) * d, cv,
                         lr * s.neg_coef[k], d);
    }
    add_scaled<Atomic>(xc, s.grad.data(), lr, d);
  }

  // Ascent step with per-row bias correction (lazy Adam).
  void adam_row(NodeId row, const double* direction, double scale, Scratch& s) {
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    const std::size_t d = d_;
    const std::size_t base = static_cast<std::size_t>(row) * d;
    const auto t = static_cast<double>(++adam_steps_[row]);
    const double c1 = 1.0 - std::pow(kBeta1, t), c2 = 1.0 - std::pow(kBeta2, t);
    for (std::size_t k = 0; k < d; ++k) {
      const double grad = scale * direction[k];
      adam_m_[base + k] = kBeta1 * adam_m_[base + k] + (1.0 - kBeta1) * grad;
      adam_v_[base + k] = kBeta2 * adam_v_[base + k] + (1.0 - kBeta2) * grad * grad;
      s.update[k] = opt_.lr * (adam_m_[base + k] / c1) / (std::sqrt(adam_v_[base + k] / c2) + kEps);
    }
    double* x = x_.data() + base;
    for (std::size_t k = 0; k < d; ++k) x[k] += s.update[k];
  }

  const Graph& g_;
  EmbeddingMatrix& x_;
  const HierarchyLinks& links_;
  const SkipGramOptions& opt_;
  AliasTable negatives_;
  std::size_t d_;
  bool use_parent_ = false;
  bool use_child_ = false;
  std::vector<std::size_t> child_offsets_;
  std::vector<NodeId> child_ids_;
  double child_scale_ = 0.0;
  std::vector<double> adam_m_, adam_v_;
  std::vector<std::uint64_t> adam_steps_;
};

std::vector<std::size_t> walk_order(std::size_t count, std::uint64_t seed, std::uint64_t call,
                                    std::uint64_t epoch) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed, Stream::kOrder, {call, epoch});
  for (std::size_t i = count; i > 1; --i) {
    std::swap(order[i - 1], order[uniform_index(rng, i)]);
  }
  return order;
}

}  // namespace

std::vector<EpochStats> update_x(const Graph& g, EmbeddingMatrix& x, const HierarchyLinks& links,
                                 const SkipGramOptions& options, std::uint64_t seed,
                                 std::uint64_t call) {
  if (x.rows() != static_cast<std::size_t>(g.num_nodes())) {
    throw std::invalid_argument("embedding rows do not match the graph");
  }
  if (options.window < 1) throw std::invalid_argument("window must be at least 1");
  if (options.negatives < 0) throw std::invalid_argument("negative sample count below zero");
  if (options.epochs < 0) throw std::invalid_argument("negative epoch count");
  if (options.parallel && options.optimizer == Optimizer::kAdam) {
    throw std::invalid_argument("the adam optimizer runs sequentially only");
  }
  std::vector<EpochStats> stats;
  if (options.epochs == 0 || g.num_nodes() == 0) return stats;
  const WalkCorpus corpus = random_walks(g, options.walks, seed, call);
  Trainer trainer(g, x, links, options);
  const int threads =
      options.parallel
          ? std::max(1, options.threads > 0 ? options.threads
                                            : static_cast<int>(std::thread::hardware_concurrency()))
          : 1;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const auto order = walk_order(corpus.num_walks(), seed, call, static_cast<std::uint64_t>(epoch));
    Totals totals;
    if (threads == 1) {
      trainer.run_walks<false>(corpus, order, seed, call, static_cast<std::uint64_t>(epoch), totals);
    } else {
      std::vector<Totals> parts(static_cast<std::size_t>(threads));
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
      std::vector<std::thread> workers;
      const std::size_t chunk = (order.size() + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(order.size(), chunk * static_cast<std::size_t>(t));
        const std::size_t end = std::min(order.size(), begin + chunk);
        workers.emplace_back([&, t, begin, end] {
          try {
            trainer.run_walks<true>(corpus, std::span(order).subspan(begin, end - begin), seed,
                                    call, static_cast<std::uint64_t>(epoch), parts[t]);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (auto& w : workers) w.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
      for (const Totals& p : parts) {
        totals.sg += p.sg;
        totals.comm += p.comm;
        totals.centers += p.centers;
      }
    }
    EpochStats e;
    if (totals.centers > 0) {
      e.sg_loss = totals.sg / static_cast<double>(totals.centers);
      e.comm_loss = totals.comm / static_cast<double>(totals.centers);
    }
    stats.push_back(e);
  }
  return stats;
}

EmbeddingMatrix train_flat_baseline(const Graph& g, std::size_t dim,
                                    const SkipGramOptions& options, std::uint64_t seed,
                                    std::vector<EpochStats>* stats) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be at least 1");
  EmbeddingMatrix x(static_cast<std::size_t>(g.num_nodes()), dim);
  Rng rng = make_rng(seed, Stream::kInit);
  const double half = 0.5 / static_cast<double>(dim);
  for (std::size_t i = 0; i < x.rows() * dim; ++i) x.data()[i] = (2.0 * uniform01(rng) - 1.0) * half;
  auto s = update_x(g, x, HierarchyLinks{}, options, seed, 0);
  if (stats != nullptr) *stats = std::move(s);
  return x;
}

}  // namespace mazi
