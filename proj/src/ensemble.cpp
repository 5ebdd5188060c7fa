#include "embens/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "embens/parallel.hpp"
#include "embens/rng.hpp"

namespace embens {

SplitIndices split_nodes(int n, std::array<double, 3> fractions, std::uint64_t seed) {
  if (n < 10) throw std::invalid_argument("split_nodes: need at least 10 nodes");
  const double sum = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("split_nodes: fractions must sum to 1");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(order);

  const int n_train = static_cast<int>(std::floor(fractions[0] * n));
  const int n_val = static_cast<int>(std::floor(fractions[1] * n));
  std::vector<int> train(order.begin(), order.begin() + n_train);
  std::vector<int> val(order.begin() + n_train, order.begin() + n_train + n_val);
  std::vector<int> test(order.begin() + n_train + n_val, order.end());
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  std::sort(test.begin(), test.end());
  return SplitIndices(std::move(train), std::move(val), std::move(test), seed);
}

SplitIndices map_split(const SplitIndices& split, const std::vector<int>& universe) {
  auto remap = [&universe](const std::vector<int>& idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(universe.at(i));
    return out;
  };
  return SplitIndices(remap(split.train()), remap(split.val()), remap(split.test()),
                      split.seed());
}

std::vector<std::map<std::string, std::string>> HyperGrid::points() const {
  std::vector<std::map<std::string, std::string>> out{{}};
  for (std::size_t axis = 0; axis < axis_names.size(); ++axis) {
    std::vector<std::map<std::string, std::string>> next;
    next.reserve(out.size() * axis_values[axis].size());
    for (const auto& base : out)
      for (const auto& value : axis_values[axis]) {
        auto point = base;
        point[axis_names[axis]] = value;
        next.push_back(std::move(point));
      }
    out = std::move(next);
  }
  return out;
}

HyperGrid default_grid(const std::string& method_id) {
  HyperGrid grid;
  if (method_id == "gf") {
    grid.axis_names = {"lr", "reg"};
    grid.axis_values = {{"0.001", "0.01", "0.1"}, {"0.1", "1", "10"}};
  } else if (method_id == "hope") {
    grid.axis_names = {"beta", "similarity"};
    grid.axis_values = {{"0.0001", "0.001", "0.01", "0.1"},
                        {"katz", "ppr", "common_neighbors", "adamic_adar"}};
  } else if (method_id == "node2vec") {
    grid.axis_names = {"p", "q"};
    grid.axis_values = {{"0.25", "0.5", "1", "2", "4"}, {"0.25", "0.5", "1", "2", "4"}};
  } else if (method_id == "lap") {
    // No hyperparameters.
  } else {
    throw std::invalid_argument("no default grid for method: " + method_id);
  }
  return grid;
}

LabelMatrix subset_rows(const LabelMatrix& labels, std::span<const int> rows) {
  LabelMatrix out(static_cast<int>(rows.size()), labels.class_count());
  out.class_names = labels.class_names;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < labels.class_count(); ++c)
      if (labels.get(rows[i], c)) out.set(static_cast<int>(i), c);
  return out;
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, std::span<const int> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

F1Report evaluate_model(const OvrModel& model, const Eigen::MatrixXd& features,
                        const LabelMatrix& labels, std::span<const int> eval_rows) {
  const Eigen::MatrixXd x_eval = take_rows(features, eval_rows);
  const LabelMatrix truth = subset_rows(labels, eval_rows);
  std::vector<int> k(eval_rows.size());
  for (std::size_t i = 0; i < eval_rows.size(); ++i) k[i] = truth.label_count(static_cast<int>(i));
  const LabelMatrix pred = predict_multilabel(model, x_eval, k);
  return f1_report(pred, truth);
}

}  // namespace

double train_and_score(const std::vector<const EmbeddingMatrix*>& embeddings,
                       const LabelMatrix& labels, std::span<const int> train_rows,
                       std::span<const int> eval_rows, double reg) {
  const Eigen::MatrixXd features =
      concat_features(embeddings, train_rows);
  const OvrModel model =
      train_ovr(take_rows(features, train_rows), subset_rows(labels, train_rows), reg);
  return evaluate_model(model, features, labels, eval_rows).macro_f1;
}

MethodCandidate grid_search(const Graph& g, const LabelMatrix& labels,
                            const SplitIndices& split, const std::string& method,
                            const HyperGrid& grid, const std::vector<int>& dims,
                            EmbeddingStore& store, std::uint64_t base_seed, double reg,
                            int jobs) {
  if (dims.empty()) throw std::invalid_argument("grid_search: no dimensions offered");
  const auto points = grid.points();
  if (points.empty()) throw std::invalid_argument("grid_search: empty grid");

  MethodCandidate cand;
  cand.method_id = method;

  // Fit phase: every (dimension, grid point) embedding that is not cached
  // yet; independent jobs, results slotted by index.
  struct FitJob {
    int dim;
    std::map<std::string, std::string> params;
    std::string key;
    std::uint64_t seed;
  };
  std::vector<FitJob> all;
  for (const int dim : dims)
    for (const auto& point : points) {
      FitJob job;
      job.dim = dim;
      job.params = point;
      job.seed = derive_seed(base_seed, method + "/" + std::to_string(dim) + "/" +
                                           EmbeddingStore::key(method, dim, point, 0));
      job.key = EmbeddingStore::key(method, dim, point, job.seed);
      all.push_back(std::move(job));
    }

  std::vector<int> missing;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (!store.find(all[i].key, g.node_count())) missing.push_back(static_cast<int>(i));

  std::vector<std::optional<EmbeddingMatrix>> fitted(all.size());
  std::vector<std::string> fit_errors(all.size());
  {
    std::vector<std::function<void()>> tasks;
    tasks.reserve(missing.size());
    for (const int idx : missing)
      tasks.push_back([&, idx] {
        const FitJob& job = all[idx];
        try {
          fitted[idx] = fit_embedding(g, method, job.dim, job.params, job.seed);
        } catch (const std::exception& e) {
          fit_errors[idx] = e.what();
        }
      });
    parallel_run(jobs, tasks);
  }
  for (const int idx : missing)
    if (fitted[idx]) store.get_or_fit(all[idx].key, g.node_count(), [&] {
      return std::move(*fitted[idx]);
    });

  // Scoring phase, sequential and in enumeration order.
  for (std::size_t i = 0; i < all.size(); ++i) {
    const FitJob& job = all[i];
    const EmbeddingMatrix* emb = store.find(job.key, g.node_count());
    if (!emb) {
      std::ostringstream what;
      what << method << " dim=" << job.dim;
      for (const auto& [k, v] : job.params) what << ' ' << k << '=' << v;
      what << ": " << (fit_errors[i].empty() ? "fit unavailable" : fit_errors[i]);
      cand.failures.push_back(what.str());
      continue;
    }
    const double score = train_and_score({emb}, labels, split.train(), split.val(), reg);
    auto it = cand.per_dim.find(job.dim);
    if (it == cand.per_dim.end() || score > it->second.val_f1) {
      DimCandidate dc;
      dc.hyperparams = job.params;
      dc.val_f1 = score;
      dc.store_key = job.key;
      cand.per_dim[job.dim] = std::move(dc);
    }
  }

  if (cand.per_dim.empty()) {
    std::ostringstream what;
    what << "grid_search(" << method << "): every fit failed:";
    for (const auto& f : cand.failures) what << "\n  " << f;
    throw std::runtime_error(what.str());
  }
  for (const auto& [dim, dc] : cand.per_dim) {
    if (dc.val_f1 > cand.best_val_f1) {  // ties keep the smaller dimension
      cand.best_val_f1 = dc.val_f1;
      cand.best_dimension = dim;
    }
  }
  return cand;
}

MethodCandidate external_candidate(const std::string& path, const LabelMatrix& labels,
                                   const SplitIndices& split, EmbeddingStore& store,
                                   double reg) {
  EmbeddingMatrix e = load_embedding(path, labels.node_count());
  const std::string method = e.method_id;
  const int dim = e.dim();
  const std::string key = EmbeddingStore::key(method, dim, e.hyperparams, 0);
  if (!store.find(key, labels.node_count())) store.put(key, std::move(e));

  MethodCandidate cand;
  cand.method_id = method;
  DimCandidate dc;
  dc.val_f1 = train_and_score({&store.get(key)}, labels, split.train(), split.val(), reg);
  dc.store_key = key;
  cand.per_dim[dim] = dc;
  cand.best_dimension = dim;
  cand.best_val_f1 = dc.val_f1;
  return cand;
}

EnsembleSelection greedy_ensemble(const std::vector<MethodCandidate>& candidates,
                                  EmbeddingStore& store, const LabelMatrix& labels,
                                  const SplitIndices& split, double reg) {
  if (candidates.empty()) throw std::invalid_argument("greedy_ensemble: no candidates");

  std::vector<const MethodCandidate*> order;
  for (const auto& c : candidates) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](const MethodCandidate* a, const MethodCandidate* b) {
    if (a->best_val_f1 != b->best_val_f1) return a->best_val_f1 > b->best_val_f1;
    return a->method_id < b->method_id;
  });

  EnsembleSelection sel;
  sel.best_single_val_f1 = order.front()->best_val_f1;

  auto embedding_of = [&store](const MethodCandidate& c, int dim) -> const EmbeddingMatrix* {
    return &store.get(c.per_dim.at(dim).store_key);
  };

  // Seed with the best single method at its best dimension.
  std::vector<const EmbeddingMatrix*> current{
      embedding_of(*order.front(), order.front()->best_dimension)};
  sel.accepted.emplace_back(order.front()->method_id, order.front()->best_dimension);
  double incumbent = train_and_score(current, labels, split.train(), split.val(), reg);
  ++sel.evaluation_count;
  sel.trace.push_back(
      {order.front()->method_id, order.front()->best_dimension, incumbent, true});
  sel.val_trajectory.push_back(incumbent);

  constexpr double kTieTolerance = 1e-9;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const MethodCandidate& cand = *order[i];
    double best_score = -1.0;
    int best_dim = -1;
    for (const auto& [dim, dc] : cand.per_dim) {
      auto trial = current;
      trial.push_back(embedding_of(cand, dim));
      const double score = train_and_score(trial, labels, split.train(), split.val(), reg);
      ++sel.evaluation_count;
      if (score > best_score) {
        best_score = score;
        best_dim = dim;
      }
    }
    const bool accept = best_score > incumbent + kTieTolerance;
    sel.trace.push_back({cand.method_id, best_dim, best_score, accept});
    if (accept) {
      current.push_back(embedding_of(cand, best_dim));
      sel.accepted.emplace_back(cand.method_id, best_dim);
      incumbent = best_score;
    }
    sel.val_trajectory.push_back(incumbent);
  }
  sel.val_f1 = incumbent;

  // Final evaluation: the one place the test rows are handed out. The
  // ensemble and every single method are scored inside this single access.
  const std::vector<int>& test_rows = split.test();
  {
    const Eigen::MatrixXd features = concat_features(current, split.train());
    const OvrModel model =
        train_ovr(take_rows(features, split.train()), subset_rows(labels, split.train()), reg);
    sel.test_report = evaluate_model(model, features, labels, test_rows);
  }
  for (const auto* c : order) {
    std::vector<const EmbeddingMatrix*> single{embedding_of(*c, c->best_dimension)};
    const Eigen::MatrixXd features = concat_features(single, split.train());
    const OvrModel model =
        train_ovr(take_rows(features, split.train()), subset_rows(labels, split.train()), reg);
    sel.single_test_reports[c->method_id] = evaluate_model(model, features, labels, test_rows);
    sel.single_dimensions[c->method_id] = c->best_dimension;
  }
  return sel;
}

Stats make_stats(const std::vector<double>& values) {
  Stats s;
  s.values = values;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  if (values.size() > 1) {
    double acc = 0;
    for (double v : values) acc += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(acc / (values.size() - 1));
  }
  return s;
}

ExperimentResult run_rounds(const Graph& g, const LabelMatrix& labels,
                            const ExperimentConfig& config, EmbeddingStore& store) {
  if (config.rounds < 1) throw std::invalid_argument("run_rounds: rounds must be >= 1");
  if (config.methods.empty() && config.external_embeddings.empty())
    throw std::invalid_argument("run_rounds: no methods configured");
  if (labels.node_count() != g.node_count())
    throw std::invalid_argument("run_rounds: labels do not match the graph");

  std::vector<int> labeled;
  for (int v = 0; v < labels.node_count(); ++v)
    if (labels.label_count(v) > 0) labeled.push_back(v);

  ExperimentResult result;
  std::map<std::string, std::vector<double>> single_scores;
  std::vector<double> ensemble_scores;
  std::vector<std::vector<double>> ensemble_per_class;
  std::vector<std::vector<double>> best_single_per_class;

  for (int round = 0; round < config.rounds; ++round) {
    const std::uint64_t split_seed = config.base_seed + static_cast<std::uint64_t>(round);
    const SplitIndices positions =
        split_nodes(static_cast<int>(labeled.size()), config.fractions, split_seed);
    const SplitIndices split = map_split(positions, labeled);

    RoundOutput out;
    out.round = round;
    out.split_seed = split_seed;
    try {
      for (const auto& method : config.methods) {
        const auto git = config.grids.find(method);
        const HyperGrid& grid = git != config.grids.end() ? git->second : default_grid(method);
        out.candidates.push_back(grid_search(g, labels, split, method, grid,
                                             config.dimensions, store, config.base_seed,
                                             config.reg, config.jobs));
      }
      for (const auto& path : config.external_embeddings)
        out.candidates.push_back(external_candidate(path, labels, split, store, config.reg));

      out.selection = greedy_ensemble(out.candidates, store, labels, split, config.reg);
    } catch (const std::exception& e) {
      throw std::runtime_error("round " + std::to_string(round) + " failed: " + e.what());
    }

    // Non-degradation by construction, checked anyway on every run.
    if (out.selection.val_f1 < out.selection.best_single_val_f1)
      throw std::logic_error("greedy ensemble degraded the validation score");
    if (split.test_access_count() != 1)
      throw std::logic_error("test rows were accessed " +
                             std::to_string(split.test_access_count()) +
                             " times (expected exactly once)");
    const int bound = greedy_evaluation_bound(static_cast<int>(out.candidates.size()),
                                              static_cast<int>(config.dimensions.size()));
    if (out.selection.evaluation_count > bound)
      throw std::logic_error("greedy search exceeded its evaluation bound");

    ensemble_scores.push_back(out.selection.test_report.macro_f1);
    ensemble_per_class.push_back(out.selection.test_report.per_class_f1);

    // Best single method this round, by validation score.
    const MethodCandidate* best = nullptr;
    for (const auto& c : out.candidates)
      if (!best || c.best_val_f1 > best->best_val_f1 ||
          (c.best_val_f1 == best->best_val_f1 && c.method_id < best->method_id))
        best = &c;
    out.best_single_method = best->method_id;
    out.best_single_test_f1 = out.selection.single_test_reports.at(best->method_id).macro_f1;
    best_single_per_class.push_back(
        out.selection.single_test_reports.at(best->method_id).per_class_f1);

    for (const auto& [method, report] : out.selection.single_test_reports)
      single_scores[method].push_back(report.macro_f1);

    result.rounds.push_back(std::move(out));
  }

  for (const auto& [method, scores] : single_scores)
    result.single_test_macro[method] = make_stats(scores);
  result.ensemble_test_macro = make_stats(ensemble_scores);

  auto column_means = [](const std::vector<std::vector<double>>& rows) {
    std::vector<double> mean;
    if (rows.empty()) return mean;
    mean.assign(rows.front().size(), 0.0);
    for (const auto& r : rows)
      for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += r[c];
    for (auto& v : mean) v /= static_cast<double>(rows.size());
    return mean;
  };
  result.ensemble_per_class_f1_mean = column_means(ensemble_per_class);
  result.best_single_per_class_f1_mean = column_means(best_single_per_class);
  return result;
}

}  // namespace embens
