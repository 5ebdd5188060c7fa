// node2vec: second-order biased random walks feeding skip-gram with negative
// sampling; the input-vector matrix is the embedding.
#pragma once

#include <cstdint>
#include <vector>

#include "embens/embedding.hpp"
#include "embens/graph.hpp"
#include "embens/rng.hpp"

namespace embens {

struct Node2VecParams {
  int dim = 128;
  double p = 1.0;  // return parameter
  double q = 1.0;  // in-out parameter
  int walk_length = 80;
  int walks_per_node = 10;
  int window = 10;
  int negative = 5;
  int epochs = 5;
  double alpha0 = 0.025;  // initial step size, linear decay
  std::uint64_t seed = 0;
};

// Second-order walk sampler. Coming from `prev` into `cur`, the unnormalized
// weight of moving on to neighbor x is w/p if x == prev, w if x is adjacent
// to prev, w/q otherwise.
class BiasedWalker {
 public:
  BiasedWalker(const AdjacencyView& adj, double p, double q);

  // Unnormalized weights aligned with adj.neighbors(cur); prev = -1 gives the
  // first-order step.
  std::vector<double> transition_weights(int prev, int cur) const;

  // One transition; -1 when cur has no out-neighbors.
  int step(int prev, int cur, Rng& rng) const;

  // Walk of at most `length` nodes starting at `start`; stops early at sinks.
  std::vector<int> walk(int start, int length, Rng& rng) const;

 private:
  const AdjacencyView& adj_;
  double p_, q_;
};

// walks_per_node passes over the nodes, order shuffled per pass.
std::vector<std::vector<int>> generate_walks(const AdjacencyView& adj, double p, double q,
                                             int walk_length, int walks_per_node,
                                             std::uint64_t seed);

// Deterministic given the seed; training is single-threaded by design.
// Throws when the walk corpus yields no training pairs.
EmbeddingMatrix embed_node2vec(const Graph& g, const Node2VecParams& params);

}  // namespace embens
