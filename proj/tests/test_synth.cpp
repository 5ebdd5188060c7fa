#include <doctest.h>

#include <set>

#include "embens/rng.hpp"
#include "embens/synth.hpp"
#include "oracles.hpp"

using namespace embens;

TEST_CASE("barabasi-albert edge count follows the attachment arithmetic") {
  SynthSpec spec;
  spec.kind = SynthKind::barabasi_albert;
  spec.n = 100;
  spec.ba_m = 2;
  spec.seed = 3;
  auto g = generate(spec);
  CHECK(g.node_count() == 100);
  // (n - m) * m: every node past the initial m attaches m distinct edges.
  CHECK(g.edge_count() == 196);
  CHECK(g.dropped_self_loops() == 0);
}

TEST_CASE("watts-strogatz with p=0 is the ring lattice") {
  SynthSpec spec;
  spec.kind = SynthKind::watts_strogatz;
  spec.n = 100;
  spec.ws_k = 4;
  spec.ws_p = 0.0;
  auto g = generate(spec);
  CHECK(g.edge_count() == 200);
  for (int d : g.undirected_degrees()) CHECK(d == 4);
}

TEST_CASE("degenerate SBM probabilities give disjoint cliques") {
  SynthSpec spec;
  spec.kind = SynthKind::stochastic_block_model;
  spec.n = 100;
  spec.sbm_block_sizes = {25, 25, 25, 25};
  spec.sbm_p_in = 1.0;
  spec.sbm_p_out = 0.0;
  auto g = generate(spec);
  CHECK(g.edge_count() == 4 * (25 * 24 / 2));
  auto comp = oracle::components_bfs(g);
  CHECK(*std::max_element(comp.begin(), comp.end()) == 3);
}

TEST_CASE("generators are seed-deterministic") {
  for (auto kind : {SynthKind::barabasi_albert, SynthKind::watts_strogatz,
                    SynthKind::stochastic_block_model, SynthKind::random_geometric}) {
    SynthSpec spec;
    spec.kind = kind;
    spec.n = 60;
    spec.sbm_block_sizes = {15, 15, 15, 15};
    spec.rgg_radius = 0.3;
    spec.seed = 99;
    auto a = generate(spec);
    auto b = generate(spec);
    REQUIRE(a.edge_count() == b.edge_count());
    for (std::size_t i = 0; i < a.edge_count(); ++i) {
      CHECK(a.edges()[i].src == b.edges()[i].src);
      CHECK(a.edges()[i].dst == b.edges()[i].dst);
    }
  }
}

TEST_CASE("invalid generator parameters are rejected") {
  SynthSpec spec;
  spec.kind = SynthKind::barabasi_albert;
  spec.n = 5;
  spec.ba_m = 5;
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  spec.kind = SynthKind::watts_strogatz;
  spec.ws_k = 3;  // odd
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

namespace {

// Independent transcription of the documented cross-edge sampling protocol.
Graph merge_reference(const std::vector<Graph>& graphs, double pair_fraction,
                      double accept_prob, std::uint64_t seed) {
  int total = 0;
  std::set<std::pair<int, int>> edges;
  for (const auto& g : graphs) {
    for (const auto& e : g.edges()) edges.insert({e.src + total, e.dst + total});
    total += g.node_count();
  }
  const std::uint64_t pairs = static_cast<std::uint64_t>(total) * (total - 1) / 2;
  const std::uint64_t quota = static_cast<std::uint64_t>(pair_fraction * total);

  // Enumerate all pairs lexicographically so index decoding is by lookup.
  std::vector<std::pair<int, int>> all;
  for (int i = 0; i < total; ++i)
    for (int j = i + 1; j < total; ++j) all.emplace_back(i, j);
  REQUIRE(all.size() == pairs);

  Rng rng(derive_seed(seed, "merge-pairs"));
  std::vector<std::uint64_t> chosen;
  std::set<std::uint64_t> seen;
  while (chosen.size() < std::min(quota, pairs)) {
    auto p = rng.below(pairs);
    if (seen.insert(p).second) chosen.push_back(p);
  }
  for (auto p : chosen)
    if (rng.uniform01() < accept_prob) edges.insert(all[p]);

  std::vector<Edge> ev;
  for (auto [a, b] : edges) ev.push_back({a, b, 1.0});
  return Graph::from_edges(total, false, ev);
}

Graph triangle() {
  return Graph::from_edges(3, false, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
}

}  // namespace

TEST_CASE("merge with accept_prob=0 is the plain disjoint union") {
  auto merged = merge_with_random_edges({triangle(), triangle()}, 0.5, 0.0, 7);
  CHECK(merged.node_count() == 6);
  CHECK(merged.edge_count() == 6);
}

TEST_CASE("merge matches the reference sampler exactly") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 40ULL}) {
    auto ours = merge_with_random_edges({triangle(), triangle()}, 0.9, 1.0, seed);
    auto ref = merge_reference({triangle(), triangle()}, 0.9, 1.0, seed);
    REQUIRE(ours.edge_count() == ref.edge_count());
    for (std::size_t i = 0; i < ours.edge_count(); ++i) {
      CHECK(ours.edges()[i].src == ref.edges()[i].src);
      CHECK(ours.edges()[i].dst == ref.edges()[i].dst);
    }
  }
}

TEST_CASE("merge never removes or duplicates edges") {
  std::vector<Graph> parts{triangle(), triangle(), triangle()};
  auto merged = merge_with_random_edges(parts, 1.0, 1.0, 13);
  std::set<std::pair<int, int>> seen;
  for (const auto& e : merged.edges()) {
    CHECK(seen.insert({e.src, e.dst}).second);
    CHECK(e.src < e.dst);
  }
  // All 9 original edges survive with their offsets.
  for (int part = 0; part < 3; ++part)
    for (auto [a, b] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}})
      CHECK(seen.count({a + 3 * part, b + 3 * part}));
}

TEST_CASE("the paper-style merge samples 40% of N pairs") {
  std::vector<Graph> parts;
  for (int i = 0; i < 4; ++i) {
    SynthSpec spec;
    spec.kind = SynthKind::stochastic_block_model;
    spec.n = 100;
    spec.sbm_block_sizes = {25, 25, 25, 25};
    spec.seed = 100 + i;
    parts.push_back(generate(spec));
  }
  std::size_t base_edges = 0;
  for (const auto& g : parts) base_edges += g.edge_count();
  auto merged = merge_with_random_edges(parts, 0.4, 0.3, 21);
  CHECK(merged.node_count() == 400);
  // 160 sampled pairs, each accepted with probability 0.3: expect ~48 new
  // edges; allow a wide stochastic band.
  const auto added = merged.edge_count() - base_edges;
  CHECK(added >= 25);
  CHECK(added <= 75);
}

TEST_CASE("degree labels: star centers land in the top bin") {
  auto star = Graph::from_edges(
      6, false, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {0, 4, 1}, {0, 5, 1}});
  auto labels = degree_labels(star, 2);
  REQUIRE(labels.class_count() == 2);
  CHECK(labels.get(0, 1));
  for (int leaf = 1; leaf < 6; ++leaf) CHECK(labels.get(leaf, 0));
}

TEST_CASE("constant degrees collapse to a single class") {
  SynthSpec spec;
  spec.kind = SynthKind::watts_strogatz;
  spec.n = 30;
  spec.ws_k = 4;
  spec.ws_p = 0.0;
  auto labels = degree_labels(generate(spec), 3);
  CHECK(labels.class_count() == 1);
}

TEST_CASE("binning matches the sort-and-split oracle on the merged graph") {
  std::vector<Graph> parts;
  for (int i = 0; i < 4; ++i) {
    SynthSpec spec;
    spec.kind = static_cast<SynthKind>(i);
    spec.n = 100;
    spec.sbm_block_sizes = {25, 25, 25, 25};
    spec.seed = 17 + i;
    parts.push_back(generate(spec));
  }
  auto merged = merge_with_random_edges(parts, 0.4, 0.3, 99);
  const auto deg = merged.undirected_degrees();
  std::vector<double> values(deg.begin(), deg.end());
  const auto ours = quantile_bins(values, 8);
  const auto ref = oracle::quantile_bins_naive(values, 8);
  CHECK(ours == ref);
}

TEST_CASE("closeness of small fixtures matches hand BFS") {
  auto star = Graph::from_edges(
      6, false, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {0, 4, 1}, {0, 5, 1}});
  auto c = closeness_centrality(star);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(5.0 / 9.0));

  auto path3 = Graph::from_edges(3, false, {{0, 1, 1}, {1, 2, 1}});
  auto cp = closeness_centrality(path3);
  CHECK(cp[1] == doctest::Approx(1.0));
  CHECK(cp[0] == doctest::Approx(2.0 / 3.0));
  CHECK(cp[2] == doctest::Approx(2.0 / 3.0));

  SynthSpec spec;
  spec.kind = SynthKind::stochastic_block_model;
  spec.n = 25;
  spec.sbm_block_sizes = {25};
  spec.sbm_p_in = 1.0;
  auto clique = generate(spec);
  for (double v : closeness_centrality(clique)) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("closeness values stay in (0,1] and reject disconnected graphs") {
  SynthSpec spec;
  spec.kind = SynthKind::barabasi_albert;
  spec.n = 80;
  spec.seed = 4;
  auto g = generate(spec);
  for (double v : closeness_centrality(g)) {
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
  auto split = Graph::from_edges(4, false, {{0, 1, 1}, {2, 3, 1}});
  CHECK_THROWS_WITH_AS(closeness_labels(split, 2), doctest::Contains("connected"),
                       std::runtime_error);
}
