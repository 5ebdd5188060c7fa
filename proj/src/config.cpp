#include "embens/config.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "embens/diversity.hpp"
#include "embens/rng.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace embens {

namespace {

SynthSpec parse_synth_spec(const nlohmann::json& j, std::uint64_t base_seed, int index) {
  SynthSpec spec;
  spec.kind = synth_kind_from_string(j.at("kind").get<std::string>());
  spec.n = j.value("n", 100);
  spec.ba_m = j.value("m", 2);
  spec.ws_k = j.value("k", 4);
  spec.ws_p = j.value("p", 0.1);
  if (j.contains("blocks")) spec.sbm_block_sizes = j["blocks"].get<std::vector<int>>();
  spec.sbm_p_in = j.value("p_in", 0.3);
  spec.sbm_p_out = j.value("p_out", 0.01);
  spec.rgg_radius = j.value("radius", 0.2);
  spec.seed = j.contains("seed") ? j["seed"].get<std::uint64_t>()
                                 : derive_seed(base_seed, "synth-" + std::to_string(index));
  return spec;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }

  RunConfig c;
  c.seed = j.value("seed", std::uint64_t{42});
  c.out_dir = j.value("out_dir", std::string("out"));
  c.cache_dir = j.value("cache_dir", std::string(""));
  c.rounds = j.value("rounds", 5);
  c.jobs = j.value("jobs", 1);
  c.reg = j.value("reg", 1.0);
  if (j.contains("dimensions")) c.dimensions = j["dimensions"].get<std::vector<int>>();
  if (j.contains("methods")) c.methods = j["methods"].get<std::vector<std::string>>();
  if (j.contains("external_embeddings"))
    c.external_embeddings = j["external_embeddings"].get<std::vector<std::string>>();
  if (j.contains("fractions")) {
    const auto f = j["fractions"].get<std::vector<double>>();
    if (f.size() != 3) throw std::runtime_error("config: fractions needs 3 entries");
    c.fractions = {f[0], f[1], f[2]};
  }
  if (std::abs(c.fractions[0] + c.fractions[1] + c.fractions[2] - 1.0) > 1e-9)
    throw std::runtime_error("config: fractions must sum to 1");

  if (j.contains("grids")) {
    for (const auto& [method, axes] : j["grids"].items()) {
      HyperGrid grid;
      for (const auto& [axis, values] : axes.items()) {
        grid.axis_names.push_back(axis);
        std::vector<std::string> vals;
        for (const auto& v : values)
          vals.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        grid.axis_values.push_back(std::move(vals));
      }
      c.grids[method] = std::move(grid);
    }
  }

  if (j.contains("dataset")) {
    DatasetConfig d;
    d.edges_path = j["dataset"].at("edges").get<std::string>();
    d.labels_path = j["dataset"].at("labels").get<std::string>();
    d.directed = j["dataset"].value("directed", false);
    d.partial_labels = j["dataset"].value("partial_labels", false);
    c.dataset = d;
  }
  if (j.contains("synthetic")) {
    SyntheticConfig s;
    const auto& js = j["synthetic"];
    if (!js.contains("graphs") || js["graphs"].empty())
      throw std::runtime_error("config: synthetic.graphs must be non-empty");
    int index = 0;
    for (const auto& spec : js["graphs"]) s.graphs.push_back(parse_synth_spec(spec, c.seed, index++));
    s.pair_fraction = js.value("pair_fraction", 0.4);
    s.accept_prob = js.value("accept_prob", 0.3);
    s.bins = js.value("bins", 8);
    s.label_kind = js.value("label", "degree");
    if (s.label_kind != "degree" && s.label_kind != "closeness")
      throw std::runtime_error("config: synthetic.label must be degree or closeness");
    c.synthetic = s;
  }
  if (!c.dataset && !c.synthetic)
    throw std::runtime_error("config: either dataset or synthetic is required");
  if (c.dataset && c.synthetic)
    throw std::runtime_error("config: dataset and synthetic are mutually exclusive");
  if (j.contains("diversity")) {
    c.diversity_dim = j["diversity"].value("dim", 128);
    c.diversity_rv = j["diversity"].value("rv", false);
  }
  if (c.methods.empty() && c.external_embeddings.empty())
    throw std::runtime_error("config: methods must be non-empty");
  return c;
}

namespace {

struct SyntheticArtifacts {
  Graph merged;                 // before WCC extraction
  LabelMatrix degree;           // on the merged graph
  LabelMatrix closeness;        // merged-aligned, WCC nodes labeled only
  std::vector<int> wcc_to_merged;
};

SyntheticArtifacts build_synthetic(const SyntheticConfig& s, std::uint64_t seed) {
  std::vector<Graph> parts;
  parts.reserve(s.graphs.size());
  for (const auto& spec : s.graphs) parts.push_back(generate(spec));
  SyntheticArtifacts art;
  art.merged = s.graphs.size() == 1
                   ? std::move(parts.front())
                   : merge_with_random_edges(parts, s.pair_fraction, s.accept_prob,
                                             derive_seed(seed, "merge"));
  art.degree = degree_labels(art.merged, s.bins);

  const WccResult wcc = largest_wcc(art.merged);
  art.wcc_to_merged = wcc.new_to_old;
  const LabelMatrix wcc_closeness = closeness_labels(wcc.graph, s.bins);
  LabelMatrix merged_closeness(art.merged.node_count(), wcc_closeness.class_count());
  merged_closeness.class_names = wcc_closeness.class_names;
  for (int v = 0; v < wcc.graph.node_count(); ++v)
    for (int cls = 0; cls < wcc_closeness.class_count(); ++cls)
      if (wcc_closeness.get(v, cls)) merged_closeness.set(wcc.new_to_old[v], cls);
  art.closeness = std::move(merged_closeness);
  return art;
}

}  // namespace

ExperimentInputs load_experiment_inputs(const RunConfig& config) {
  if (config.dataset) {
    const auto& d = *config.dataset;
    const LoadedGraph loaded = load_edge_list(d.edges_path, d.directed);
    const LabelMatrix labels = load_labels(d.labels_path, loaded.index_of_id,
                                           loaded.graph.node_count(), d.partial_labels);
    const WccResult wcc = largest_wcc(loaded.graph);
    ExperimentInputs inputs;
    inputs.labels = restrict_labels(labels, wcc.new_to_old);
    inputs.graph = std::move(wcc.graph);
    return inputs;
  }
  const SyntheticArtifacts art = build_synthetic(*config.synthetic, config.seed);
  const LabelMatrix& merged_labels =
      config.synthetic->label_kind == "degree" ? art.degree : art.closeness;
  const WccResult wcc = largest_wcc(art.merged);
  ExperimentInputs inputs;
  inputs.labels = restrict_labels(merged_labels, wcc.new_to_old);
  inputs.graph = std::move(wcc.graph);
  return inputs;
}

std::vector<std::string> cmd_generate(const RunConfig& config) {
  if (!config.synthetic) throw std::runtime_error("generate: config has no synthetic block");
  fs::create_directories(config.out_dir);
  const SyntheticArtifacts art = build_synthetic(*config.synthetic, config.seed);

  const std::string edges_path = config.out_dir + "/synthetic.edges";
  const std::string degree_path = config.out_dir + "/labels_degree.txt";
  const std::string closeness_path = config.out_dir + "/labels_closeness.txt";
  write_edge_list(art.merged, edges_path);
  write_labels(art.degree, degree_path);
  write_labels(art.closeness, closeness_path);
  return {edges_path, degree_path, closeness_path};
}

namespace {

ExperimentConfig to_experiment_config(const RunConfig& config) {
  ExperimentConfig ec;
  ec.methods = config.methods;
  ec.dimensions = config.dimensions;
  ec.grids = config.grids;
  ec.external_embeddings = config.external_embeddings;
  ec.fractions = config.fractions;
  ec.rounds = config.rounds;
  ec.base_seed = config.seed;
  ec.reg = config.reg;
  ec.jobs = config.jobs;
  return ec;
}

ordered_json f1_to_json(const F1Report& r) {
  ordered_json j;
  j["macro_f1"] = r.macro_f1;
  j["micro_f1"] = r.micro_f1;
  j["per_class_f1"] = r.per_class_f1;
  j["support"] = r.support;
  return j;
}

ordered_json stats_to_json(const Stats& s) {
  ordered_json j;
  j["mean"] = s.mean;
  j["std"] = s.stddev;
  j["values"] = s.values;
  return j;
}

ordered_json candidate_to_json(const MethodCandidate& c) {
  ordered_json j;
  j["best_dimension"] = c.best_dimension;
  j["best_val_f1"] = c.best_val_f1;
  ordered_json dims = ordered_json::object();
  for (const auto& [dim, dc] : c.per_dim) {
    ordered_json dj;
    dj["val_f1"] = dc.val_f1;
    dj["hyperparams"] = dc.hyperparams;
    dj["cache_key"] = dc.store_key;
    dims[std::to_string(dim)] = dj;
  }
  j["per_dim"] = dims;
  if (!c.failures.empty()) j["failures"] = c.failures;
  return j;
}

ordered_json result_to_json(const RunConfig& config, const ExperimentResult& result) {
  ordered_json root;
  ordered_json cfg;
  cfg["seed"] = config.seed;
  cfg["rounds"] = config.rounds;
  cfg["dimensions"] = config.dimensions;
  cfg["methods"] = config.methods;
  cfg["fractions"] = {config.fractions[0], config.fractions[1], config.fractions[2]};
  cfg["reg"] = config.reg;
  root["config"] = cfg;

  ordered_json rounds = ordered_json::array();
  for (const auto& r : result.rounds) {
    ordered_json jr;
    jr["round"] = r.round;
    jr["split_seed"] = r.split_seed;
    ordered_json methods = ordered_json::object();
    for (const auto& c : r.candidates) methods[c.method_id] = candidate_to_json(c);
    jr["methods"] = methods;

    ordered_json sel;
    ordered_json accepted = ordered_json::array();
    for (const auto& [m, d] : r.selection.accepted) accepted.push_back({{"method", m}, {"dimension", d}});
    sel["accepted"] = accepted;
    ordered_json trace = ordered_json::array();
    for (const auto& step : r.selection.trace)
      trace.push_back({{"method", step.method_id},
                       {"dimension", step.dimension},
                       {"val_f1", step.val_f1},
                       {"accepted", step.accepted}});
    sel["trace"] = trace;
    sel["val_trajectory"] = r.selection.val_trajectory;
    sel["val_f1"] = r.selection.val_f1;
    sel["best_single_val_f1"] = r.selection.best_single_val_f1;
    sel["evaluation_count"] = r.selection.evaluation_count;
    sel["test"] = f1_to_json(r.selection.test_report);
    ordered_json singles = ordered_json::object();
    for (const auto& [m, rep] : r.selection.single_test_reports) {
      ordered_json sj = f1_to_json(rep);
      sj["dimension"] = r.selection.single_dimensions.at(m);
      singles[m] = sj;
    }
    sel["single_test"] = singles;
    jr["selection"] = sel;
    jr["best_single"] = {{"method", r.best_single_method},
                         {"test_macro_f1", r.best_single_test_f1}};
    rounds.push_back(jr);
  }
  root["rounds"] = rounds;

  ordered_json agg;
  agg["ensemble"] = stats_to_json(result.ensemble_test_macro);
  ordered_json singles = ordered_json::object();
  for (const auto& [m, s] : result.single_test_macro) singles[m] = stats_to_json(s);
  agg["singles"] = singles;
  agg["ensemble_per_class_f1_mean"] = result.ensemble_per_class_f1_mean;
  agg["best_single_per_class_f1_mean"] = result.best_single_per_class_f1_mean;
  root["aggregate"] = agg;
  return root;
}

std::string render_table(const ordered_json& root) {
  std::ostringstream out;
  const auto& agg = root.at("aggregate");
  const auto& first_round = root.at("rounds").at(0);

  double best_single_mean = -1;
  std::string best_single;
  for (const auto& [method, stats] : agg.at("singles").items()) {
    const double mean = stats.at("mean").get<double>();
    if (mean > best_single_mean) {
      best_single_mean = mean;
      best_single = method;
    }
  }

  out << std::left << std::setw(34) << "method" << std::setw(16) << "dimensions"
      << std::setw(12) << "macro-f1" << "gain\n";
  out << std::string(70, '-') << '\n';
  for (const auto& [method, stats] : agg.at("singles").items()) {
    const int dim =
        first_round.at("selection").at("single_test").at(method).at("dimension").get<int>();
    out << std::left << std::setw(34) << method << std::setw(16) << dim << std::setw(12)
        << std::fixed << std::setprecision(4) << stats.at("mean").get<double>() << '\n';
  }
  std::string methods, dims;
  for (const auto& entry : first_round.at("selection").at("accepted")) {
    if (!methods.empty()) {
      methods += ',';
      dims += ',';
    }
    methods += entry.at("method").get<std::string>();
    dims += std::to_string(entry.at("dimension").get<int>());
  }
  const double ens = agg.at("ensemble").at("mean").get<double>();
  const double gain = best_single_mean > 0 ? (ens / best_single_mean - 1.0) * 100.0 : 0.0;
  out << std::left << std::setw(34) << ("ensemble: " + methods) << std::setw(16) << dims
      << std::setw(12) << std::fixed << std::setprecision(4) << ens << std::showpos
      << std::setprecision(1) << gain << "%" << std::noshowpos << '\n';
  out << "(single-method rows: validation-selected dimension of round 0; "
         "macro-f1 averaged over "
      << root.at("rounds").size() << " rounds; gain vs best single `" << best_single
      << "`)\n";
  return out.str();
}

}  // namespace

std::vector<std::string> cmd_ensemble(const RunConfig& config) {
  fs::create_directories(config.out_dir);
  const ExperimentInputs inputs = load_experiment_inputs(config);
  EmbeddingStore store(config.effective_cache_dir());
  const ExperimentResult result =
      run_rounds(inputs.graph, inputs.labels, to_experiment_config(config), store);

  const ordered_json root = result_to_json(config, result);
  const std::string json_path = config.out_dir + "/results.json";
  {
    std::ofstream out(json_path);
    out << root.dump(2) << '\n';
  }
  const std::string table_path = config.out_dir + "/results_table.txt";
  {
    std::ofstream out(table_path);
    out << render_table(root);
  }
  return {json_path, table_path};
}

std::vector<std::string> cmd_embed(const RunConfig& config) {
  fs::create_directories(config.out_dir);
  const ExperimentInputs inputs = load_experiment_inputs(config);
  EmbeddingStore store(config.effective_cache_dir());

  const SplitIndices positions = [&] {
    std::vector<int> labeled;
    for (int v = 0; v < inputs.labels.node_count(); ++v)
      if (inputs.labels.label_count(v) > 0) labeled.push_back(v);
    const SplitIndices raw = split_nodes(static_cast<int>(labeled.size()), config.fractions,
                                         config.seed);
    return map_split(raw, labeled);
  }();

  ordered_json winners;
  for (const auto& method : config.methods) {
    const auto git = config.grids.find(method);
    const HyperGrid& grid = git != config.grids.end() ? git->second : default_grid(method);
    const MethodCandidate cand =
        grid_search(inputs.graph, inputs.labels, positions, method, grid, config.dimensions,
                    store, config.seed, config.reg, config.jobs);
    winners[method] = candidate_to_json(cand);
  }
  const std::string winners_path = config.out_dir + "/winners.json";
  std::ofstream out(winners_path);
  out << winners.dump(2) << '\n';
  return {winners_path};
}

std::vector<std::string> cmd_diversity(const RunConfig& config) {
  fs::create_directories(config.out_dir);
  const ExperimentInputs inputs = load_experiment_inputs(config);
  EmbeddingStore store(config.effective_cache_dir());

  const std::string winners_path = config.out_dir + "/winners.json";
  std::ifstream in(winners_path);
  if (!in)
    throw std::runtime_error("diversity: " + winners_path +
                             " not found; run the embed command first");
  const nlohmann::json winners = nlohmann::json::parse(in);

  std::vector<const EmbeddingMatrix*> embeddings;
  std::vector<std::string> missing;
  const std::string dim_key = std::to_string(config.diversity_dim);
  for (const auto& method : config.methods) {
    if (!winners.contains(method) || !winners[method]["per_dim"].contains(dim_key)) {
      missing.push_back(method + " (no winner at dim " + dim_key + ")");
      continue;
    }
    const std::string key = winners[method]["per_dim"][dim_key]["cache_key"].get<std::string>();
    const EmbeddingMatrix* e = store.find(key, inputs.graph.node_count());
    if (!e) {
      missing.push_back(method + " (cache entry " + key + ")");
      continue;
    }
    embeddings.push_back(e);
  }
  if (!missing.empty()) {
    std::ostringstream what;
    what << "diversity: missing cached embeddings:";
    for (const auto& m : missing) what << "\n  " << m;
    throw std::runtime_error(what.str());
  }

  std::vector<std::string> outputs;
  const CorrelationReport dcor_report = correlation_matrix(embeddings, DiversityMeasure::dcor);
  const std::string dcor_path = config.out_dir + "/diversity_dcor.csv";
  write_correlation_csv(dcor_report, dcor_path);
  outputs.push_back(dcor_path);
  if (config.diversity_rv) {
    const CorrelationReport rv_report = correlation_matrix(embeddings, DiversityMeasure::rv);
    const std::string rv_path = config.out_dir + "/diversity_rv.csv";
    write_correlation_csv(rv_report, rv_path);
    outputs.push_back(rv_path);
  }
  return outputs;
}

std::string render_report(const std::string& results_json_path) {
  std::ifstream in(results_json_path);
  if (!in) throw std::runtime_error("report: cannot open " + results_json_path);
  const ordered_json root = ordered_json::parse(in);
  return render_table(root);
}

}  // namespace embens
