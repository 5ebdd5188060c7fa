// Declarative run configuration (single JSON file) and the command entry
// points behind the CLI subcommands.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "embens/ensemble.hpp"
#include "embens/graph.hpp"
#include "embens/labels.hpp"
#include "embens/synth.hpp"

namespace embens {

struct DatasetConfig {
  std::string edges_path;
  std::string labels_path;
  bool directed = false;
  bool partial_labels = false;
};

struct SyntheticConfig {
  std::vector<SynthSpec> graphs;
  double pair_fraction = 0.4;
  double accept_prob = 0.3;
  int bins = 8;
  std::string label_kind = "degree";  // degree | closeness
};

struct RunConfig {
  std::optional<DatasetConfig> dataset;
  std::optional<SyntheticConfig> synthetic;
  std::vector<std::string> methods{"gf", "lap", "hope", "node2vec"};
  std::vector<std::string> external_embeddings;
  std::vector<int> dimensions{32, 64, 128};
  std::map<std::string, HyperGrid> grids;
  std::array<double, 3> fractions{0.5, 0.2, 0.3};
  int rounds = 5;
  std::uint64_t seed = 42;
  double reg = 1.0;
  int jobs = 1;
  std::string out_dir = "out";
  std::string cache_dir;  // default: <out_dir>/cache
  int diversity_dim = 128;
  bool diversity_rv = false;

  std::string effective_cache_dir() const {
    return cache_dir.empty() ? out_dir + "/cache" : cache_dir;
  }
};

RunConfig load_config(const std::string& path);

// The §-experiment inputs: either the configured dataset files or the merged
// synthetic graph, after WCC extraction, with labels re-aligned.
struct ExperimentInputs {
  Graph graph;
  LabelMatrix labels;
};
ExperimentInputs load_experiment_inputs(const RunConfig& config);

// Subcommand bodies; each returns the paths it wrote.
std::vector<std::string> cmd_generate(const RunConfig& config);
std::vector<std::string> cmd_embed(const RunConfig& config);
std::vector<std::string> cmd_diversity(const RunConfig& config);
std::vector<std::string> cmd_ensemble(const RunConfig& config);
std::string render_report(const std::string& results_json_path);

}  // namespace embens
