#include "embens/classify.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace embens {

namespace {

double softplus(double t) {
  // log(1 + exp(t)) without overflow.
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

struct NewtonResult {
  Eigen::VectorXd w;  // d + 1, bias last
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Damped Newton on the strictly convex penalized objective.
NewtonResult newton_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& z, double reg,
                             double grad_tol, int max_iter) {
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  NewtonResult res;
  res.w = Eigen::VectorXd::Zero(d + 1);
  double obj = logistic_objective(x, z, res.w, reg);

  Eigen::MatrixXd hess(d + 1, d + 1);
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    const Eigen::VectorXd grad = logistic_gradient(x, z, res.w, reg);
    if (grad.lpNorm<Eigen::Infinity>() < grad_tol) {
      res.converged = true;
      break;
    }

    const Eigen::VectorXd margins =
        x * res.w.head(d) + Eigen::VectorXd::Constant(n, res.w(d));
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) {
      const double p = sigmoid(margins(i));
      s(i) = std::max(p * (1.0 - p), 1e-12);
    }
    hess.topLeftCorner(d, d) = x.transpose() * s.asDiagonal() * x;
    hess.topLeftCorner(d, d).diagonal().array() += reg;
    const Eigen::VectorXd xs = x.transpose() * s;
    hess.topRightCorner(d, 1) = xs;
    hess.bottomLeftCorner(1, d) = xs.transpose();
    hess(d, d) = s.sum();

    Eigen::VectorXd step = hess.ldlt().solve(grad);
    if (!step.allFinite()) step = grad;  // fall back to gradient direction

    // Backtracking line search on the objective.
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd cand = res.w - t * step;
      const double cand_obj = logistic_objective(x, z, cand, reg);
      if (cand_obj <= obj - 1e-4 * t * grad.dot(step)) {
        res.w = cand;
        obj = cand_obj;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;  // stuck at numerical floor
  }
  res.objective = obj;
  return res;
}

}  // namespace

double logistic_objective(const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& z,
                          const Eigen::Ref<const Eigen::VectorXd>& w, double reg) {
  const int d = static_cast<int>(x.cols());
  const Eigen::VectorXd margins = x * w.head(d) + Eigen::VectorXd::Constant(x.rows(), w(d));
  double nll = 0;
  for (int i = 0; i < margins.size(); ++i) nll += softplus(-z(i) * margins(i));
  return nll + 0.5 * reg * w.head(d).squaredNorm();
}

Eigen::VectorXd logistic_gradient(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                  const Eigen::Ref<const Eigen::VectorXd>& z,
                                  const Eigen::Ref<const Eigen::VectorXd>& w, double reg) {
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  const Eigen::VectorXd margins = x * w.head(d) + Eigen::VectorXd::Constant(n, w(d));
  Eigen::VectorXd resid(n);  // p_i - y01_i
  for (int i = 0; i < n; ++i) resid(i) = sigmoid(margins(i)) - (z(i) > 0 ? 1.0 : 0.0);
  Eigen::VectorXd grad(d + 1);
  grad.head(d) = x.transpose() * resid + reg * w.head(d);
  grad(d) = resid.sum();
  return grad;
}

OvrModel train_ovr(const Eigen::Ref<const Eigen::MatrixXd>& x, const LabelMatrix& y,
                   double reg) {
  if (x.rows() != y.node_count())
    throw std::invalid_argument("train_ovr: feature rows do not match label rows");
  if (!x.allFinite()) throw std::invalid_argument("train_ovr: non-finite features");
  if (reg <= 0) throw std::invalid_argument("train_ovr: regularization must be positive");

  const int n = static_cast<int>(x.rows());
  OvrModel model;
  model.reg = reg;
  model.per_class.resize(y.class_count());
  const Eigen::MatrixXd xd = x;  // dense working copy shared across classes

  for (int c = 0; c < y.class_count(); ++c) {
    BinaryClassifier& clf = model.per_class[c];
    Eigen::VectorXd z(n);
    int pos = 0;
    for (int i = 0; i < n; ++i) {
      const bool t = y.get(i, c);
      z(i) = t ? 1.0 : -1.0;
      pos += t;
    }
    if (pos == 0 || pos == n) {
      clf.constant = true;
      clf.constant_prob = std::clamp(static_cast<double>(pos) / n, 1e-9, 1.0 - 1e-9);
      clf.weights = Eigen::VectorXd::Zero(x.cols());
      clf.bias = std::log(clf.constant_prob / (1.0 - clf.constant_prob));
      Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols() + 1);
      w(x.cols()) = clf.bias;
      clf.objective = logistic_objective(xd, z, w, reg);
      clf.converged = true;
      continue;
    }
    const NewtonResult res = newton_logistic(xd, z, reg, 1e-6, 1000);
    clf.weights = res.w.head(x.cols());
    clf.bias = res.w(x.cols());
    clf.objective = res.objective;
    clf.iterations = res.iterations;
    clf.converged = res.converged;
    if (!clf.weights.allFinite())
      throw std::runtime_error("train_ovr: optimizer produced non-finite weights");
  }
  return model;
}

double ovr_objective(const OvrModel& m) {
  double sum = 0;
  for (const auto& c : m.per_class) sum += c.objective;
  return sum;
}

Eigen::MatrixXd predict_proba(const OvrModel& m, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  const int n = static_cast<int>(x.rows());
  Eigen::MatrixXd probs(n, m.class_count());
  for (int c = 0; c < m.class_count(); ++c) {
    const BinaryClassifier& clf = m.per_class[c];
    if (clf.constant) {
      probs.col(c).setConstant(clf.constant_prob);
      continue;
    }
    const Eigen::VectorXd margins = x * clf.weights + Eigen::VectorXd::Constant(n, clf.bias);
    for (int i = 0; i < n; ++i) probs(i, c) = sigmoid(margins(i));
  }
  return probs;
}

LabelMatrix predict_multilabel(const OvrModel& m, const Eigen::Ref<const Eigen::MatrixXd>& x,
                               std::span<const int> k_per_node) {
  const int n = static_cast<int>(x.rows());
  const int l = m.class_count();
  if (static_cast<int>(k_per_node.size()) != n)
    throw std::invalid_argument("predict_multilabel: k_per_node size mismatch");
  const Eigen::MatrixXd probs = predict_proba(m, x);
  LabelMatrix out(n, l);
  std::vector<int> order(l);
  for (int i = 0; i < n; ++i) {
    const int k = k_per_node[i];
    if (k < 1) throw std::invalid_argument("predict_multilabel: k must be >= 1");
    if (k > l)
      throw std::invalid_argument("predict_multilabel: k=" + std::to_string(k) +
                                  " exceeds " + std::to_string(l) + " classes");
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return probs(i, a) > probs(i, b); });
    for (int j = 0; j < k; ++j) out.set(i, order[j]);
  }
  return out;
}

LabelMatrix predict_threshold(const OvrModel& m, const Eigen::Ref<const Eigen::MatrixXd>& x,
                              double threshold) {
  const int n = static_cast<int>(x.rows());
  const int l = m.class_count();
  const Eigen::MatrixXd probs = predict_proba(m, x);
  LabelMatrix out(n, l);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    for (int c = 0; c < l; ++c) {
      if (probs(i, c) > threshold) out.set(i, c);
      if (probs(i, c) > probs(i, best)) best = c;
    }
    if (out.label_count(i) == 0) out.set(i, best);
  }
  return out;
}

F1Report f1_report(const LabelMatrix& pred, const LabelMatrix& truth) {
  if (pred.node_count() != truth.node_count() || pred.class_count() != truth.class_count())
    throw std::invalid_argument("f1_report: shape mismatch");
  const int n = truth.node_count();
  const int l = truth.class_count();
  F1Report rep;
  rep.per_class_f1.resize(l);
  rep.support.resize(l);
  long tp_all = 0, fp_all = 0, fn_all = 0;
  int classes_with_support = 0;
  double macro_sum = 0;
  for (int c = 0; c < l; ++c) {
    long tp = 0, fp = 0, fn = 0, support = 0;
    for (int i = 0; i < n; ++i) {
      const bool p = pred.get(i, c);
      const bool t = truth.get(i, c);
      support += t;
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
    }
    const double denom = 2.0 * tp + fp + fn;
    rep.per_class_f1[c] = denom == 0 ? 0.0 : 2.0 * tp / denom;
    rep.support[c] = static_cast<int>(support);
    if (support > 0) {
      macro_sum += rep.per_class_f1[c];
      ++classes_with_support;
    }
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
  }
  rep.macro_f1 = classes_with_support ? macro_sum / classes_with_support : 0.0;
  const double micro_denom = 2.0 * tp_all + fp_all + fn_all;
  rep.micro_f1 = micro_denom == 0 ? 0.0 : 2.0 * tp_all / micro_denom;
  return rep;
}

FeatureScaler FeatureScaler::fit(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                 std::span<const int> rows) {
  if (rows.empty()) throw std::invalid_argument("FeatureScaler: empty row set");
  FeatureScaler s;
  const int d = static_cast<int>(x.cols());
  s.mean = Eigen::RowVectorXd::Zero(d);
  for (int r : rows) s.mean += x.row(r);
  s.mean /= static_cast<double>(rows.size());
  Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(d);
  for (int r : rows) var += (x.row(r) - s.mean).cwiseAbs2();
  var /= static_cast<double>(rows.size());
  s.inv_std = var.cwiseSqrt().unaryExpr([](double v) { return v > 0 ? 1.0 / v : 1.0; });
  return s;
}

Eigen::MatrixXd FeatureScaler::apply(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  return (x.rowwise() - mean).array().rowwise() * inv_std.array();
}

Eigen::MatrixXd concat_features(const std::vector<const EmbeddingMatrix*>& xs,
                                std::span<const int> train_rows) {
  if (xs.empty()) throw std::invalid_argument("concat_features: no inputs");
  const int n = xs.front()->rows();
  int total = 0;
  for (const auto* e : xs) {
    if (e->rows() != n)
      throw std::invalid_argument("concat_features: row-count mismatch for " + e->method_id);
    total += e->dim();
  }
  Eigen::MatrixXd out(n, total);
  int col = 0;
  for (const auto* e : xs) {
    const FeatureScaler scaler = FeatureScaler::fit(e->values, train_rows);
    out.middleCols(col, e->dim()) = scaler.apply(e->values);
    col += e->dim();
  }
  return out;
}

}  // namespace embens
