// One-vs-rest logistic regression for multi-label node classification and
// the macro/micro/per-class F1 report.
#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "embens/embedding.hpp"
#include "embens/labels.hpp"

namespace embens {

struct BinaryClassifier {
  Eigen::VectorXd weights;
  double bias = 0.0;
  // One-class training data makes a flagged constant classifier that
  // predicts the class prior.
  bool constant = false;
  double constant_prob = 0.5;
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
};

struct OvrModel {
  std::vector<BinaryClassifier> per_class;
  double reg = 1.0;
  int class_count() const { return static_cast<int>(per_class.size()); }
};

// Penalized objective and gradient of one binary problem at an arbitrary
// parameter point (bias appended as the last coordinate); z holds +-1.
double logistic_objective(const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& z,
                          const Eigen::Ref<const Eigen::VectorXd>& w, double reg);
Eigen::VectorXd logistic_gradient(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                  const Eigen::Ref<const Eigen::VectorXd>& z,
                                  const Eigen::Ref<const Eigen::VectorXd>& w, double reg);

// Per class, minimizes the L2-penalized negative log-likelihood
//   sum_i log(1 + exp(-z_i (x_i.w + b))) + (reg/2) |w|^2
// (bias unpenalized) with a damped Newton iteration; converged when the
// gradient infinity-norm drops below 1e-6, capped at 1000 iterations.
OvrModel train_ovr(const Eigen::Ref<const Eigen::MatrixXd>& x, const LabelMatrix& y,
                   double reg = 1.0);

// Sum of converged per-class penalized objectives.
double ovr_objective(const OvrModel& m);

Eigen::MatrixXd predict_proba(const OvrModel& m, const Eigen::Ref<const Eigen::MatrixXd>& x);

// Assigns the k_per_node[i] most probable labels to row i, ties broken by
// the lower class index.
LabelMatrix predict_multilabel(const OvrModel& m, const Eigen::Ref<const Eigen::MatrixXd>& x,
                               std::span<const int> k_per_node);

// Alternative decision rule: every label whose probability exceeds the
// threshold (at least the argmax label is always assigned).
LabelMatrix predict_threshold(const OvrModel& m, const Eigen::Ref<const Eigen::MatrixXd>& x,
                              double threshold = 0.5);

struct F1Report {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  std::vector<double> per_class_f1;
  std::vector<int> support;
};

// Per-class F1 = 2PR/(P+R) with 0 when P+R = 0; macro averages classes with
// ground-truth support only; micro pools TP/FP/FN.
F1Report f1_report(const LabelMatrix& pred, const LabelMatrix& truth);

// Column standardization fitted on a row subset and applied everywhere.
struct FeatureScaler {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd inv_std;
  static FeatureScaler fit(const Eigen::Ref<const Eigen::MatrixXd>& x,
                           std::span<const int> rows);
  Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
};

// Column-wise concatenation in the given order; each input standardized per
// column with statistics from the training rows.
Eigen::MatrixXd concat_features(const std::vector<const EmbeddingMatrix*>& xs,
                                std::span<const int> train_rows);

}  // namespace embens
