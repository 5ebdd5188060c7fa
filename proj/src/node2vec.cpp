#include "embens/node2vec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace embens {

BiasedWalker::BiasedWalker(const AdjacencyView& adj, double p, double q)
    : adj_(adj), p_(p), q_(q) {
  if (p <= 0 || q <= 0) throw std::invalid_argument("node2vec: p and q must be positive");
}

std::vector<double> BiasedWalker::transition_weights(int prev, int cur) const {
  const auto nbrs = adj_.neighbors(cur);
  const auto wts = adj_.weights(cur);
  std::vector<double> out(nbrs.size());
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    const int x = nbrs[i];
    double bias;
    if (prev < 0) {
      bias = 1.0;
    } else if (x == prev) {
      bias = 1.0 / p_;
    } else if (adj_.has_edge(x, prev)) {
      bias = 1.0;
    } else {
      bias = 1.0 / q_;
    }
    out[i] = wts[i] * bias;
  }
  return out;
}

int BiasedWalker::step(int prev, int cur, Rng& rng) const {
  const auto nbrs = adj_.neighbors(cur);
  if (nbrs.empty()) return -1;
  const auto weights = transition_weights(prev, cur);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double draw = rng.uniform01() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    draw -= weights[i];
    if (draw <= 0.0) return nbrs[i];
  }
  return nbrs.back();  // float fringe
}

std::vector<int> BiasedWalker::walk(int start, int length, Rng& rng) const {
  std::vector<int> nodes{start};
  nodes.reserve(length);
  int prev = -1;
  while (static_cast<int>(nodes.size()) < length) {
    const int next = step(prev, nodes.back(), rng);
    if (next < 0) break;
    prev = nodes.back();
    nodes.push_back(next);
  }
  return nodes;
}

std::vector<std::vector<int>> generate_walks(const AdjacencyView& adj, double p, double q,
                                             int walk_length, int walks_per_node,
                                             std::uint64_t seed) {
  const int n = adj.node_count();
  const BiasedWalker walker(adj, p, q);
  Rng rng(derive_seed(seed, "n2v-walks"));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<int>> corpus;
  corpus.reserve(static_cast<std::size_t>(n) * walks_per_node);
  for (int pass = 0; pass < walks_per_node; ++pass) {
    rng.shuffle(order);
    for (const int v : order) corpus.push_back(walker.walk(v, walk_length, rng));
  }
  return corpus;
}

namespace {

// Classic bounded sigmoid lookup table.
class SigmoidTable {
 public:
  SigmoidTable() {
    for (int i = 0; i < kSize; ++i) {
      const double x = (2.0 * i / kSize - 1.0) * kBound;
      table_[i] = 1.0 / (1.0 + std::exp(-x));
    }
  }
  double operator()(double x) const {
    if (x >= kBound) return 1.0;
    if (x <= -kBound) return 0.0;
    return table_[static_cast<int>((x + kBound) * kSize / (2.0 * kBound))];
  }

 private:
  static constexpr int kSize = 1024;
  static constexpr double kBound = 6.0;
  double table_[kSize];
};

// Walker's alias method over the unigram^{0.75} noise distribution.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights) {
    const int n = static_cast<int>(weights.size());
    prob_.resize(n);
    alias_.resize(n);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> scaled(n);
    std::vector<int> small, large;
    for (int i = 0; i < n; ++i) {
      scaled[i] = weights[i] * n / total;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const int s = small.back();
      const int l = large.back();
      small.pop_back();
      large.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = scaled[l] + scaled[s] - 1.0;
      (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (int s : small) {
      prob_[s] = 1.0;
      alias_[s] = s;
    }
    for (int l : large) {
      prob_[l] = 1.0;
      alias_[l] = l;
    }
  }

  int sample(Rng& rng) const {
    const int i = static_cast<int>(rng.below(prob_.size()));
    return rng.uniform01() < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<int> alias_;
};

}  // namespace

EmbeddingMatrix embed_node2vec(const Graph& g, const Node2VecParams& params) {
  if (params.dim < 1) throw std::invalid_argument("node2vec: dim must be positive");
  if (!g.has_any_edges()) throw std::invalid_argument("node2vec: graph has no edges");
  const int n = g.node_count();
  const int d = params.dim;

  const AdjacencyView adj(g);
  const auto corpus = generate_walks(adj, params.p, params.q, params.walk_length,
                                     params.walks_per_node, params.seed);

  std::vector<double> counts(n, 0.0);
  std::size_t trainable_tokens = 0;
  for (const auto& walk : corpus) {
    for (const int v : walk) counts[v] += 1.0;
    if (walk.size() >= 2) trainable_tokens += walk.size();
  }
  if (trainable_tokens == 0)
    throw std::runtime_error("node2vec: walk corpus yields no training pairs");

  std::vector<double> noise(n);
  for (int v = 0; v < n; ++v) noise[v] = std::pow(counts[v], 0.75);
  const AliasTable negatives(noise);

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor in(n, d), out_vecs(n, d);
  {
    Rng init_rng(derive_seed(params.seed, "n2v-init"));
    const double span = 0.5 / d;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) in(i, j) = init_rng.uniform(-span, span);
    out_vecs.setZero();
  }

  static const SigmoidTable sigmoid;
  Rng rng(derive_seed(params.seed, "n2v-sgns"));
  const double total_tokens =
      static_cast<double>(trainable_tokens) * params.epochs + 1.0;
  std::size_t processed = 0;
  Eigen::VectorXd accum(d);

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    for (const auto& walk : corpus) {
      if (walk.size() < 2) continue;
      const int len = static_cast<int>(walk.size());
      for (int pos = 0; pos < len; ++pos) {
        const double lr = std::max(
            params.alpha0 * (1.0 - static_cast<double>(processed) / total_tokens),
            params.alpha0 * 1e-4);
        ++processed;
        const int center = walk[pos];
        const int b = 1 + static_cast<int>(rng.below(params.window));
        auto v_center = in.row(center);
        for (int off = -b; off <= b; ++off) {
          if (off == 0) continue;
          const int cpos = pos + off;
          if (cpos < 0 || cpos >= len) continue;
          const int context = walk[cpos];
          accum.setZero();
          // Positive pair plus `negative` noise draws.
          for (int s = 0; s <= params.negative; ++s) {
            int target;
            double label;
            if (s == 0) {
              target = context;
              label = 1.0;
            } else {
              target = negatives.sample(rng);
              if (target == context) continue;
              label = 0.0;
            }
            auto u = out_vecs.row(target);
            const double score = sigmoid(v_center.dot(u));
            const double grad = (label - score) * lr;
            accum += grad * u.transpose();
            u += grad * v_center;
          }
          v_center += accum.transpose();
        }
      }
    }
  }

  EmbeddingMatrix result;
  result.values = in;
  result.method_id = "node2vec";
  result.seed = params.seed;
  result.hyperparams = {{"p", format_double(params.p)},
                        {"q", format_double(params.q)},
                        {"walk_length", std::to_string(params.walk_length)},
                        {"walks_per_node", std::to_string(params.walks_per_node)},
                        {"window", std::to_string(params.window)}};
  result.validate();
  return result;
}

}  // namespace embens
