#include <doctest.h>

#include <filesystem>
#include <numeric>
#include <set>

#include "embens/ensemble.hpp"
#include "embens/rng.hpp"
#include "embens/synth.hpp"

using namespace embens;

namespace {

Graph two_cliques_bridged(int size) {
  std::vector<Edge> edges;
  for (int i = 0; i < size; ++i)
    for (int j = i + 1; j < size; ++j) {
      edges.push_back({i, j, 1.0});
      edges.push_back({size + i, size + j, 1.0});
    }
  edges.push_back({0, size, 1.0});
  return Graph::from_edges(2 * size, false, edges);
}

LabelMatrix clique_labels(int size) {
  LabelMatrix labels(2 * size, 2);
  for (int v = 0; v < 2 * size; ++v) labels.set(v, v < size ? 0 : 1);
  return labels;
}

// Synthetic "method": a seeded random embedding whose first column leaks the
// label with the given signal strength.
EmbeddingMatrix planted_embedding(const LabelMatrix& labels, int dim, double signal,
                                  std::uint64_t seed, const std::string& id) {
  Rng rng(seed);
  EmbeddingMatrix e;
  e.values.resize(labels.node_count(), dim);
  for (int i = 0; i < labels.node_count(); ++i)
    for (int j = 0; j < dim; ++j) e.values(i, j) = rng.normal();
  for (int i = 0; i < labels.node_count(); ++i)
    e.values(i, 0) += signal * (labels.get(i, 0) ? 1.0 : -1.0);
  e.method_id = id;
  return e;
}

MethodCandidate as_candidate(EmbeddingStore& store, EmbeddingMatrix e,
                             const LabelMatrix& labels, const SplitIndices& split) {
  const std::string key = EmbeddingStore::key(e.method_id, e.dim(), e.hyperparams, e.seed);
  const std::string id = e.method_id;
  const int dim = e.dim();
  if (!store.find(key, labels.node_count())) store.put(key, std::move(e));
  MethodCandidate cand;
  cand.method_id = id;
  DimCandidate dc;
  dc.store_key = key;
  dc.val_f1 = train_and_score({&store.get(key)}, labels, split.train(), split.val());
  cand.per_dim[dim] = dc;
  cand.best_dimension = dim;
  cand.best_val_f1 = dc.val_f1;
  return cand;
}

// Exhaustive subset-search oracle (dimension fixed to each method's best).
struct ExhaustiveResult {
  double best_val_f1 = -1.0;
  int evaluations = 0;
  std::vector<std::string> best_subset;
};

ExhaustiveResult exhaustive_search(const std::vector<MethodCandidate>& candidates,
                                   EmbeddingStore& store, const LabelMatrix& labels,
                                   const SplitIndices& split) {
  ExhaustiveResult res;
  const int k = static_cast<int>(candidates.size());
  for (int mask = 1; mask < (1 << k); ++mask) {
    std::vector<const EmbeddingMatrix*> subset;
    std::vector<std::string> ids;
    for (int i = 0; i < k; ++i)
      if (mask & (1 << i)) {
        const auto& c = candidates[i];
        subset.push_back(&store.get(c.per_dim.at(c.best_dimension).store_key));
        ids.push_back(c.method_id);
      }
    const double score = train_and_score(subset, labels, split.train(), split.val());
    ++res.evaluations;
    if (score > res.best_val_f1) {
      res.best_val_f1 = score;
      res.best_subset = ids;
    }
  }
  return res;
}

}  // namespace

TEST_CASE("split_nodes hits exact fraction arithmetic") {
  const auto s = split_nodes(10, {0.5, 0.2, 0.3}, 1);
  CHECK(s.train().size() == 5);
  CHECK(s.val().size() == 2);
  CHECK(s.test_size() == 3);

  const auto big = split_nodes(3312, {0.5, 0.2, 0.3}, 2);
  CHECK(big.train().size() == 1656);
  CHECK(big.val().size() == 662);
  CHECK(big.test_size() == 994);
}

TEST_CASE("split_nodes is a seed-deterministic partition") {
  const auto a = split_nodes(57, {0.5, 0.2, 0.3}, 9);
  const auto b = split_nodes(57, {0.5, 0.2, 0.3}, 9);
  CHECK(a.train() == b.train());
  CHECK(a.val() == b.val());

  std::set<int> all(a.train().begin(), a.train().end());
  all.insert(a.val().begin(), a.val().end());
  const auto& test = a.test();
  all.insert(test.begin(), test.end());
  CHECK(all.size() == 57);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == 56);
}

TEST_CASE("split_nodes validates its inputs") {
  CHECK_THROWS_AS(split_nodes(9, {0.5, 0.2, 0.3}, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_nodes(20, {0.5, 0.2, 0.2}, 1), std::invalid_argument);
}

TEST_CASE("default grids match the published search spaces") {
  CHECK(default_grid("gf").points().size() == 9);
  CHECK(default_grid("hope").points().size() == 16);
  CHECK(default_grid("node2vec").points().size() == 25);
  CHECK(default_grid("lap").points().size() == 1);
  CHECK_THROWS_AS(default_grid("sdne"), std::invalid_argument);
}

TEST_CASE("grid_search fits every point once and caches across calls") {
  auto g = two_cliques_bridged(10);
  auto labels = clique_labels(10);
  const auto split = split_nodes(20, {0.5, 0.2, 0.3}, 3);
  EmbeddingStore store;

  const auto cand = grid_search(g, labels, split, "gf", default_grid("gf"), {2, 4}, store, 7);
  CHECK(store.fit_count() == 18);  // 9 points x 2 dims
  CHECK(cand.per_dim.size() == 2);
  CHECK((cand.best_dimension == 2 || cand.best_dimension == 4));
  CHECK(cand.best_val_f1 ==
        std::max(cand.per_dim.at(2).val_f1, cand.per_dim.at(4).val_f1));

  store.reset_fit_count();
  const auto again = grid_search(g, labels, split, "gf", default_grid("gf"), {2, 4}, store, 7);
  CHECK(store.fit_count() == 0);  // fully cached
  CHECK(again.best_val_f1 == cand.best_val_f1);
}

TEST_CASE("lap needs no search and reports one winner per dimension") {
  auto g = two_cliques_bridged(10);
  auto labels = clique_labels(10);
  const auto split = split_nodes(20, {0.5, 0.2, 0.3}, 5);
  EmbeddingStore store;
  const auto cand = grid_search(g, labels, split, "lap", default_grid("lap"), {2, 4}, store, 7);
  CHECK(store.fit_count() == 2);
  CHECK(cand.per_dim.at(2).hyperparams.empty());
}

TEST_CASE("grid_search records failures and throws only when all points fail") {
  auto g = two_cliques_bridged(8);
  auto labels = clique_labels(8);
  const auto split = split_nodes(16, {0.5, 0.2, 0.3}, 5);
  EmbeddingStore store;

  HyperGrid mixed;  // katz at beta=0.9 diverges on cliques, 0.01 is fine
  mixed.axis_names = {"beta", "similarity"};
  mixed.axis_values = {{"0.9", "0.01"}, {"katz"}};
  const auto cand = grid_search(g, labels, split, "hope", mixed, {2}, store, 7);
  CHECK(cand.failures.size() == 1);
  CHECK(cand.per_dim.count(2) == 1);

  HyperGrid broken;
  broken.axis_names = {"beta", "similarity"};
  broken.axis_values = {{"0.9"}, {"katz"}};
  CHECK_THROWS_WITH_AS(
      grid_search(g, labels, split, "hope", broken, {2}, store, 7),
      doctest::Contains("every fit failed"), std::runtime_error);
}

TEST_CASE("a single candidate makes a one-method ensemble") {
  auto labels = clique_labels(12);
  const auto split = split_nodes(24, {0.5, 0.2, 0.3}, 11);
  EmbeddingStore store;
  auto cand = as_candidate(store, planted_embedding(labels, 4, 2.0, 21, "only"), labels, split);
  const auto sel = greedy_ensemble({cand}, store, labels, split);
  CHECK(sel.accepted == std::vector<std::pair<std::string, int>>{{"only", 4}});
  CHECK(sel.evaluation_count == 1);
  CHECK(sel.val_f1 == cand.best_val_f1);
  CHECK(split.test_access_count() == 1);
}

TEST_CASE("a duplicated embedding is rejected by strict improvement") {
  auto labels = clique_labels(12);
  const auto split = split_nodes(24, {0.5, 0.2, 0.3}, 13);
  EmbeddingStore store;
  auto a = planted_embedding(labels, 4, 2.0, 31, "alpha");
  auto b = a;
  b.method_id = "beta";  // same matrix, different name
  std::vector<MethodCandidate> cands{as_candidate(store, std::move(a), labels, split),
                                     as_candidate(store, std::move(b), labels, split)};
  const auto sel = greedy_ensemble(cands, store, labels, split);
  CHECK(sel.accepted.size() == 1);
  REQUIRE(sel.trace.size() == 2);
  CHECK_FALSE(sel.trace[1].accepted);
  // Trajectory never decreases and ends at the incumbent.
  for (std::size_t i = 1; i < sel.val_trajectory.size(); ++i)
    CHECK(sel.val_trajectory[i] >= sel.val_trajectory[i - 1]);
}

TEST_CASE("greedy stays within its evaluation bound and near the exhaustive oracle") {
  // Four planted methods with distinct signal strengths.
  LabelMatrix labels(40, 2);
  Rng lab_rng(41);
  for (int v = 0; v < 40; ++v) labels.set(v, static_cast<int>(lab_rng.below(2)));
  const auto split = split_nodes(40, {0.5, 0.2, 0.3}, 17);
  EmbeddingStore store;

  std::vector<MethodCandidate> cands;
  const double signals[4] = {1.5, 1.0, 0.6, 0.2};
  for (int m = 0; m < 4; ++m)
    cands.push_back(as_candidate(
        store, planted_embedding(labels, 3, signals[m], 100 + m, "m" + std::to_string(m)),
        labels, split));

  const auto sel = greedy_ensemble(cands, store, labels, split);
  CHECK(sel.evaluation_count <= greedy_evaluation_bound(4, 1));

  const auto oracle = exhaustive_search(cands, store, labels, split);
  CHECK(oracle.evaluations == 15);  // 2^4 - 1
  CHECK(sel.val_f1 >= sel.best_single_val_f1);
  MESSAGE("greedy val=", sel.val_f1, " exhaustive val=", oracle.best_val_f1,
          " gap=", oracle.best_val_f1 - sel.val_f1);
}

TEST_CASE("the embedding store round-trips through disk") {
  namespace fs = std::filesystem;
  const auto dir = (fs::temp_directory_path() / "embens_store_test").string();
  fs::remove_all(dir);
  LabelMatrix labels = clique_labels(8);
  auto e = planted_embedding(labels, 3, 1.0, 5, "gf");
  e.hyperparams = {{"lr", "0.01"}, {"reg", "1"}};
  e.seed = 5;
  const auto key = EmbeddingStore::key("gf", 3, e.hyperparams, 5);
  {
    EmbeddingStore store(dir);
    int fits = 0;
    store.get_or_fit(key, 16, [&] {
      ++fits;
      return e;
    });
    store.get_or_fit(key, 16, [&] {
      ++fits;
      return e;
    });
    CHECK(fits == 1);
    CHECK(store.fit_count() == 1);
  }
  {
    EmbeddingStore fresh(dir);  // hits the .emb + sidecar on disk
    const EmbeddingMatrix* found = fresh.find(key, 16);
    REQUIRE(found != nullptr);
    CHECK(found->method_id == "gf");
    CHECK(found->seed == 5);
    CHECK(found->hyperparams.at("lr") == "0.01");
    CHECK((found->values - e.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK(fresh.fit_count() == 0);
  }
  CHECK(fs::exists(fs::path(dir) / (key + ".emb")));
  CHECK(fs::exists(fs::path(dir) / (key + ".meta.json")));
}

TEST_CASE("run_rounds honors determinism and the non-degradation invariant") {
  auto g = two_cliques_bridged(14);
  auto labels = clique_labels(14);
  ExperimentConfig config;
  config.methods = {"gf", "lap"};
  config.dimensions = {2, 4};
  HyperGrid small;
  small.axis_names = {"lr", "reg"};
  small.axis_values = {{"0.01"}, {"1"}};
  config.grids["gf"] = small;
  config.rounds = 3;
  config.base_seed = 77;

  EmbeddingStore store_a, store_b;
  const auto a = run_rounds(g, labels, config, store_a);
  const auto b = run_rounds(g, labels, config, store_b);

  REQUIRE(a.rounds.size() == 3);
  for (int r = 0; r < 3; ++r) {
    CHECK(a.rounds[r].selection.val_f1 >= a.rounds[r].selection.best_single_val_f1);
    CHECK(a.rounds[r].selection.val_f1 == b.rounds[r].selection.val_f1);
    CHECK(a.rounds[r].selection.test_report.macro_f1 ==
          b.rounds[r].selection.test_report.macro_f1);
    CHECK(a.rounds[r].selection.evaluation_count <= greedy_evaluation_bound(2, 2));
    CHECK(a.rounds[r].split_seed == 77 + static_cast<std::uint64_t>(r));
  }
  CHECK(a.ensemble_test_macro.mean == b.ensemble_test_macro.mean);
  // Embeddings are label-independent, so rounds 2 and 3 reuse round 1 fits.
  CHECK(store_a.fit_count() == store_b.fit_count());
  CHECK(store_a.fit_count() == 2 * 2);  // (gf 1 point + lap) x 2 dims
}

TEST_CASE("rounds=1 equals a single run and failures carry the round index") {
  auto g = two_cliques_bridged(12);
  auto labels = clique_labels(12);
  ExperimentConfig config;
  config.methods = {"lap"};
  config.dimensions = {2};
  config.rounds = 1;
  config.base_seed = 5;
  EmbeddingStore store;
  const auto result = run_rounds(g, labels, config, store);
  REQUIRE(result.rounds.size() == 1);
  CHECK(result.ensemble_test_macro.mean ==
        result.rounds[0].selection.test_report.macro_f1);
  CHECK(result.ensemble_test_macro.stddev == 0.0);

  ExperimentConfig bad = config;
  bad.dimensions = {64};  // lap cannot do d >= n-1 on 24 nodes
  EmbeddingStore store2;
  CHECK_THROWS_WITH_AS(run_rounds(g, labels, bad, store2), doctest::Contains("round 0"),
                       std::runtime_error);
}

TEST_CASE("external embeddings join the candidate pool") {
  namespace fs = std::filesystem;
  auto labels = clique_labels(12);
  const auto split = split_nodes(24, {0.5, 0.2, 0.3}, 19);
  auto ext = planted_embedding(labels, 6, 2.5, 51, "tmp");
  const auto path = (fs::temp_directory_path() / "embens_external.emb").string();
  save_embedding(ext, path);

  EmbeddingStore store;
  const auto cand = external_candidate(path, labels, split, store);
  CHECK(cand.method_id == "external:embens_external.emb");
  CHECK(cand.best_dimension == 6);
  CHECK(cand.best_val_f1 >= 0.0);

  auto weak = as_candidate(store, planted_embedding(labels, 4, 0.1, 52, "weak"), labels, split);
  const auto sel = greedy_ensemble({weak, cand}, store, labels, split);
  CHECK(sel.accepted.front().first == "external:embens_external.emb");
}
