// The ensemble pipeline: node splits, per-method hyperparameter search,
// greedy combination search with per-method dimension selection, and the
// multi-round experiment driver.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "embens/classify.hpp"
#include "embens/graph.hpp"
#include "embens/labels.hpp"
#include "embens/store.hpp"

namespace embens {

// Disjoint train/val/test node-index sets. Test indices sit behind a counting
// accessor so a round can prove they were touched exactly once, in the final
// evaluation.
class SplitIndices {
 public:
  SplitIndices() = default;
  SplitIndices(std::vector<int> train, std::vector<int> val, std::vector<int> test,
               std::uint64_t seed)
      : train_(std::move(train)), val_(std::move(val)), test_(std::move(test)), seed_(seed) {}

  const std::vector<int>& train() const { return train_; }
  const std::vector<int>& val() const { return val_; }
  const std::vector<int>& test() const {
    ++test_accesses_;
    return test_;
  }
  int test_size() const { return static_cast<int>(test_.size()); }
  int test_access_count() const { return test_accesses_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::vector<int> train_, val_, test_;
  std::uint64_t seed_ = 0;
  mutable int test_accesses_ = 0;
};

// Uniform random partition of 0..n-1: train = floor(f0 n), val = floor(f1 n),
// test takes the remainder. Requires n >= 10 and fractions summing to 1.
SplitIndices split_nodes(int n, std::array<double, 3> fractions, std::uint64_t seed);

// Re-expresses split positions through a universe of node ids.
SplitIndices map_split(const SplitIndices& split, const std::vector<int>& universe);

struct HyperGrid {
  std::vector<std::string> axis_names;
  std::vector<std::vector<std::string>> axis_values;
  // Cartesian product, first axis slowest; a single empty point when no axes.
  std::vector<std::map<std::string, std::string>> points() const;
};

// The published search spaces: gf lr x reg (3x3), hope beta x similarity
// (4x4), node2vec p x q (5x5), lap none.
HyperGrid default_grid(const std::string& method_id);

struct DimCandidate {
  std::map<std::string, std::string> hyperparams;
  double val_f1 = -1.0;
  std::string store_key;
};

struct MethodCandidate {
  std::string method_id;
  std::map<int, DimCandidate> per_dim;  // winners per offered dimension
  int best_dimension = -1;              // argmax val F1, ties to the smaller dim
  double best_val_f1 = -1.0;
  std::vector<std::string> failures;    // grid points that failed, with causes
};

// Standardize, train on the train rows, macro-F1 on the eval rows with the
// known-label-count decision rule.
double train_and_score(const std::vector<const EmbeddingMatrix*>& embeddings,
                       const LabelMatrix& labels, std::span<const int> train_rows,
                       std::span<const int> eval_rows, double reg = 1.0);

LabelMatrix subset_rows(const LabelMatrix& labels, std::span<const int> rows);

// For each dimension, fits every grid point (through the store) and keeps the
// argmax validation macro-F1, ties resolved by enumeration order. Throws only
// when every fit fails, aggregating the causes.
MethodCandidate grid_search(const Graph& g, const LabelMatrix& labels,
                            const SplitIndices& split, const std::string& method,
                            const HyperGrid& grid, const std::vector<int>& dims,
                            EmbeddingStore& store, std::uint64_t base_seed, double reg = 1.0,
                            int jobs = 1);

// Wraps an externally produced embedding file as a single-dimension candidate.
MethodCandidate external_candidate(const std::string& path, const LabelMatrix& labels,
                                   const SplitIndices& split, EmbeddingStore& store,
                                   double reg = 1.0);

struct SelectionStep {
  std::string method_id;
  int dimension = -1;
  double val_f1 = -1.0;
  bool accepted = false;
};

struct EnsembleSelection {
  std::vector<std::pair<std::string, int>> accepted;  // ordered (method, dim)
  std::vector<SelectionStep> trace;
  std::vector<double> val_trajectory;  // incumbent score after every step
  double val_f1 = -1.0;                // final ensemble validation score
  double best_single_val_f1 = -1.0;
  F1Report test_report;                // ensemble on the test rows
  std::map<std::string, F1Report> single_test_reports;  // per method, best dim
  std::map<std::string, int> single_dimensions;
  int evaluation_count = 0;  // concatenation trainings performed
};

// Algorithm: order candidates by validation score (ties by id), seed with the
// best, then append each remaining candidate at its best-scoring offered
// dimension iff that strictly improves the incumbent validation score.
// The test rows are fetched once at the end; the ensemble and every single
// method are evaluated inside that single access.
EnsembleSelection greedy_ensemble(const std::vector<MethodCandidate>& candidates,
                                  EmbeddingStore& store, const LabelMatrix& labels,
                                  const SplitIndices& split, double reg = 1.0);

// Upper bound certified by the greedy search: one seeding evaluation plus at
// most |dims| trials for each of the k-1 remaining candidates.
inline int greedy_evaluation_bound(int methods, int dims) {
  return (methods - 1) * dims + 1;
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> values;
};

Stats make_stats(const std::vector<double>& values);

struct ExperimentConfig {
  std::vector<std::string> methods{"gf", "lap", "hope", "node2vec"};
  std::vector<int> dimensions{32, 64, 128};
  std::map<std::string, HyperGrid> grids;  // methods not listed use defaults
  std::vector<std::string> external_embeddings;
  std::array<double, 3> fractions{0.5, 0.2, 0.3};
  int rounds = 5;
  std::uint64_t base_seed = 42;
  double reg = 1.0;
  int jobs = 1;
};

struct RoundOutput {
  int round = 0;
  std::uint64_t split_seed = 0;
  std::vector<MethodCandidate> candidates;
  EnsembleSelection selection;
  double best_single_test_f1 = 0.0;
  std::string best_single_method;
};

struct ExperimentResult {
  std::vector<RoundOutput> rounds;
  std::map<std::string, Stats> single_test_macro;  // per method
  Stats ensemble_test_macro;
  std::vector<double> ensemble_per_class_f1_mean;
  std::vector<double> best_single_per_class_f1_mean;
};

// split -> grid search -> greedy ensemble, rounds times with split seeds
// base_seed + round; embeddings are cached across rounds. Verifies the
// non-degradation invariant and the single test access per round.
ExperimentResult run_rounds(const Graph& g, const LabelMatrix& labels,
                            const ExperimentConfig& config, EmbeddingStore& store);

}  // namespace embens
