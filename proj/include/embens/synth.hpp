// Classical random-graph generators, graph merging with random cross edges,
// and degree / closeness-centrality node labels.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "embens/graph.hpp"
#include "embens/labels.hpp"

namespace embens {

enum class SynthKind { barabasi_albert, watts_strogatz, stochastic_block_model, random_geometric };

SynthKind synth_kind_from_string(const std::string& s);
std::string to_string(SynthKind k);

struct SynthSpec {
  SynthKind kind = SynthKind::barabasi_albert;
  int n = 100;
  // Barabasi-Albert: edges attached per new node.
  int ba_m = 2;
  // Watts-Strogatz: ring neighbors (even) and rewiring probability.
  int ws_k = 4;
  double ws_p = 0.1;
  // Stochastic block model.
  std::vector<int> sbm_block_sizes;  // empty -> 4 equal blocks
  double sbm_p_in = 0.3;
  double sbm_p_out = 0.01;
  // Random geometric graph in the unit square; regenerated with fresh seeds
  // until connected (at most 100 attempts).
  double rgg_radius = 0.2;
  std::uint64_t seed = 0;
};

// Undirected simple graph with spec.n nodes; identical spec and seed yield an
// identical edge set.
Graph generate(const SynthSpec& spec);

// Disjoint union of the inputs (ids offset in list order), then
// floor(pair_fraction * N) unordered node pairs sampled uniformly without
// replacement over all pairs of the union; each sampled pair gains an edge
// independently with probability accept_prob. Pairs that already carry an
// edge are left untouched. Sampling protocol (for independent re-derivation):
// draw pair indices p in [0, N(N-1)/2) with Rng::below, keeping first
// occurrences until the quota is met, where p indexes pairs (i,j), i<j, in
// lexicographic order; then one Rng::uniform01() acceptance draw per kept
// pair, in draw order.
Graph merge_with_random_edges(const std::vector<Graph>& graphs, double pair_fraction,
                              double accept_prob, std::uint64_t seed);

// Equal-frequency bin index per value: with r = #{u : value[u] < value[v]},
// bin(v) = min(floor(r * bins / n), bins - 1). Equal values share a bin, so
// realized bin counts may be unequal and some bins may be empty.
std::vector<int> quantile_bins(const std::vector<double>& values, int bins);

// Single-label matrix from equal-frequency binning of undirected degree.
// Empty bins are dropped and classes re-indexed.
LabelMatrix degree_labels(const Graph& g, int bins);

// Closeness c(v) = (n-1) / sum_u dist(v, u) with unweighted shortest paths,
// directions ignored. Requires a connected graph.
std::vector<double> closeness_centrality(const Graph& g);
LabelMatrix closeness_labels(const Graph& g, int bins);

}  // namespace embens
