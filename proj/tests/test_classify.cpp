#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "embens/classify.hpp"
#include "embens/rng.hpp"
#include "oracles.hpp"

using namespace embens;

namespace {

Eigen::MatrixXd random_matrix(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  return m;
}

// Independent full-batch gradient-descent oracle with naive loops.
struct GdOracle {
  static double objective(const Eigen::MatrixXd& x, const std::vector<int>& y01,
                          const Eigen::VectorXd& w, double b, double reg) {
    double obj = 0;
    for (int i = 0; i < x.rows(); ++i) {
      double margin = b;
      for (int j = 0; j < x.cols(); ++j) margin += x(i, j) * w(j);
      const double z = y01[i] ? 1.0 : -1.0;
      const double t = -z * margin;
      obj += t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    }
    for (int j = 0; j < x.cols(); ++j) obj += 0.5 * reg * w(j) * w(j);
    return obj;
  }

  static double minimize(const Eigen::MatrixXd& x, const std::vector<int>& y01, double reg) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
    double b = 0;
    double obj = objective(x, y01, w, b, reg);
    for (int iter = 0; iter < 200000; ++iter) {
      Eigen::VectorXd gw = reg * w;
      double gb = 0;
      for (int i = 0; i < x.rows(); ++i) {
        double margin = b;
        for (int j = 0; j < x.cols(); ++j) margin += x(i, j) * w(j);
        const double p = 1.0 / (1.0 + std::exp(-margin));
        const double r = p - y01[i];
        for (int j = 0; j < x.cols(); ++j) gw(j) += r * x(i, j);
        gb += r;
      }
      double gnorm = std::abs(gb);
      for (int j = 0; j < x.cols(); ++j) gnorm = std::max(gnorm, std::abs(gw(j)));
      if (gnorm < 1e-9) break;
      double step = 1.0;
      for (int ls = 0; ls < 80; ++ls) {
        const Eigen::VectorXd wn = w - step * gw;
        const double bn = b - step * gb;
        const double cand = objective(x, y01, wn, bn, reg);
        if (cand < obj) {
          w = wn;
          b = bn;
          obj = cand;
          break;
        }
        step /= 2;
      }
    }
    return obj;
  }
};

LabelMatrix single_column(const std::vector<int>& y01) {
  LabelMatrix m(static_cast<int>(y01.size()), 1);
  for (std::size_t i = 0; i < y01.size(); ++i)
    if (y01[i]) m.set(static_cast<int>(i), 0);
  return m;
}

}  // namespace

TEST_CASE("linearly separable toy set trains to perfect accuracy") {
  Eigen::MatrixXd x(8, 2);
  x << -2, -1, -3, -2, -2.5, -1.5, -1.8, -0.5, 2, 1, 3, 2, 2.5, 1.5, 1.8, 0.5;
  std::vector<int> y{0, 0, 0, 0, 1, 1, 1, 1};
  auto model = train_ovr(x, single_column(y), 1.0);
  const auto probs = predict_proba(model, x);
  for (int i = 0; i < 8; ++i) CHECK((probs(i, 0) > 0.5) == (y[i] == 1));
}

TEST_CASE("an all-positive class becomes a flagged prior classifier") {
  const auto x = random_matrix(20, 3, 7);
  LabelMatrix labels(20, 2);
  for (int i = 0; i < 20; ++i) labels.set(i, 0);  // class 0 everywhere
  for (int i = 0; i < 10; ++i) labels.set(i, 1);
  auto model = train_ovr(x, labels, 1.0);
  CHECK(model.per_class[0].constant);
  CHECK_FALSE(model.per_class[1].constant);
  const auto probs = predict_proba(model, x);
  CHECK(probs(3, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("converged objective matches the gradient-descent oracle to 1e-6") {
  const auto x = random_matrix(50, 4, 31);
  Rng rng(32);
  std::vector<int> y(50);
  for (auto& v : y) v = rng.below(2);
  auto model = train_ovr(x, single_column(y), 1.0);
  REQUIRE(model.per_class[0].converged);
  const double oracle_obj = GdOracle::minimize(x, y, 1.0);
  CHECK(model.per_class[0].objective == doctest::Approx(oracle_obj).epsilon(1e-6));
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(55);
  const auto x = random_matrix(30, 5, 56);
  Eigen::VectorXd z(30);
  for (int i = 0; i < 30; ++i) z(i) = rng.below(2) ? 1.0 : -1.0;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd w(6);
    for (int j = 0; j < 6; ++j) w(j) = rng.normal();
    const Eigen::VectorXd g = logistic_gradient(x, z, w, 1.0);
    const double h = 1e-6;
    for (int j = 0; j < 6; ++j) {
      Eigen::VectorXd wp = w, wm = w;
      wp(j) += h;
      wm(j) -= h;
      const double fd =
          (logistic_objective(x, z, wp, 1.0) - logistic_objective(x, z, wm, 1.0)) / (2 * h);
      CHECK(g(j) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("top-k prediction follows the probabilities with index tie-break") {
  // Build a model with known weights: identity features pass margins through.
  OvrModel m;
  m.per_class.resize(3);
  for (int c = 0; c < 3; ++c) {
    m.per_class[c].weights = Eigen::VectorXd::Zero(3);
    m.per_class[c].weights(c) = 1.0;
  }
  Eigen::MatrixXd x(1, 3);
  // Probabilities sigmoid(margin): (0.9, 0.1, 0.5) up to monotonicity.
  x << 2.1972246, -2.1972246, 0.0;
  std::vector<int> k{2};
  auto pred = predict_multilabel(m, x, k);
  CHECK(pred.get(0, 0));
  CHECK_FALSE(pred.get(0, 1));
  CHECK(pred.get(0, 2));

  std::vector<int> kall{3};
  auto all = predict_multilabel(m, x, kall);
  CHECK(all.label_count(0) == 3);

  std::vector<int> kbad{4};
  CHECK_THROWS_AS(predict_multilabel(m, x, kbad), std::invalid_argument);
}

TEST_CASE("top-k assignments equal an exhaustive sort oracle") {
  Rng rng(61);
  const auto x = random_matrix(25, 4, 62);
  LabelMatrix labels(25, 5);
  for (int i = 0; i < 25; ++i) {
    labels.set(i, static_cast<int>(rng.below(5)));
    if (rng.bernoulli(0.4)) labels.set(i, static_cast<int>(rng.below(5)));
  }
  auto model = train_ovr(x, labels, 1.0);
  std::vector<int> k(25);
  for (int i = 0; i < 25; ++i) k[i] = 1 + static_cast<int>(rng.below(3));
  const auto pred = predict_multilabel(model, x, k);
  const auto probs = predict_proba(model, x);
  for (int i = 0; i < 25; ++i) {
    std::vector<int> order(5);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return probs(i, a) > probs(i, b); });
    for (int c = 0; c < 5; ++c) {
      const bool expect = std::find(order.begin(), order.begin() + k[i], c) !=
                          order.begin() + k[i];
      CHECK(pred.get(i, c) == expect);
    }
  }
}

TEST_CASE("f1_report on hand-built confusion counts") {
  // class0: TP=1 FP=1 FN=0 (F1=2/3); class1: TP=1 FP=0 FN=1 (F1=2/3).
  LabelMatrix truth(3, 2), pred(3, 2);
  truth.set(0, 0);
  truth.set(1, 1);
  truth.set(2, 1);
  pred.set(0, 0);
  pred.set(1, 0);  // FP for class0
  pred.set(1, 1);
  const auto rep = f1_report(pred, truth);
  CHECK(rep.per_class_f1[0] == doctest::Approx(2.0 / 3.0));
  CHECK(rep.per_class_f1[1] == doctest::Approx(2.0 / 3.0));
  CHECK(rep.macro_f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("perfect and empty predictions bound the F1 range") {
  LabelMatrix truth(4, 2);
  truth.set(0, 0);
  truth.set(1, 0);
  truth.set(2, 1);
  truth.set(3, 1);
  const auto perfect = f1_report(truth, truth);
  CHECK(perfect.macro_f1 == doctest::Approx(1.0));
  CHECK(perfect.micro_f1 == doctest::Approx(1.0));
  LabelMatrix none(4, 2);
  const auto empty = f1_report(none, truth);
  CHECK(empty.macro_f1 == 0.0);

  LabelMatrix other(3, 2);
  CHECK_THROWS_AS(f1_report(other, truth), std::invalid_argument);
}

TEST_CASE("f1_report matches the confusion-count oracle on random pairs") {
  Rng rng(71);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 6 + static_cast<int>(rng.below(20));
    const int l = 2 + static_cast<int>(rng.below(4));
    LabelMatrix pred(n, l), truth(n, l);
    std::vector<std::vector<int>> pv(n), tv(n);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < l; ++c) {
        if (rng.bernoulli(0.3)) {
          pred.set(i, c);
          pv[i].push_back(c);
        }
        if (rng.bernoulli(0.3)) {
          truth.set(i, c);
          tv[i].push_back(c);
        }
      }
    const auto rep = f1_report(pred, truth);
    const auto ref = oracle::f1_naive(pv, tv, l);
    CHECK(rep.macro_f1 == doctest::Approx(ref.macro).epsilon(1e-12));
    CHECK(rep.micro_f1 == doctest::Approx(ref.micro).epsilon(1e-12));
    for (int c = 0; c < l; ++c)
      CHECK(rep.per_class_f1[c] == doctest::Approx(ref.per_class[c]).epsilon(1e-12));
  }
}

TEST_CASE("concat_features shapes and standardization") {
  EmbeddingMatrix a, b;
  a.values = random_matrix(10, 32, 81);
  b.values = random_matrix(10, 64, 82);
  a.method_id = "a";
  b.method_id = "b";
  std::vector<int> train{0, 1, 2, 3, 4, 5};
  const auto feats = concat_features({&a, &b}, train);
  CHECK(feats.rows() == 10);
  CHECK(feats.cols() == 96);
  // Train-row columns are standardized.
  Eigen::MatrixXd sub(train.size(), feats.cols());
  for (std::size_t i = 0; i < train.size(); ++i) sub.row(i) = feats.row(train[i]);
  CHECK(sub.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
  const auto var = (sub.rowwise() - sub.colwise().mean()).cwiseAbs2().colwise().mean();
  CHECK((var.array() - 1.0).abs().maxCoeff() < 1e-9);

  const auto single = concat_features({&a}, train);
  CHECK(single.cols() == 32);

  EmbeddingMatrix wrong;
  wrong.values = random_matrix(9, 4, 83);
  wrong.method_id = "wrong";
  CHECK_THROWS_AS(concat_features({&a, &wrong}, train), std::invalid_argument);
}

TEST_CASE("feature order permutation leaves the optimal objective unchanged") {
  EmbeddingMatrix a, b;
  a.values = random_matrix(40, 3, 91);
  b.values = random_matrix(40, 2, 92);
  a.method_id = "a";
  b.method_id = "b";
  std::vector<int> train(40);
  std::iota(train.begin(), train.end(), 0);
  Rng rng(93);
  LabelMatrix labels(40, 2);
  for (int i = 0; i < 40; ++i) labels.set(i, static_cast<int>(rng.below(2)));

  const auto ab = concat_features({&a, &b}, train);
  const auto ba = concat_features({&b, &a}, train);
  const auto m1 = train_ovr(ab, labels, 1.0);
  const auto m2 = train_ovr(ba, labels, 1.0);
  CHECK(ovr_objective(m1) == doctest::Approx(ovr_objective(m2)).epsilon(1e-6));
}

TEST_CASE("concatenated training objective never exceeds the best single block") {
  // Additivity: zero-padding the better single model reproduces its objective
  // inside the concatenated space, so the converged joint model can only match
  // or improve it.
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    EmbeddingMatrix a, b;
    a.values = random_matrix(30, 4, 100 + seed);
    b.values = random_matrix(30, 3, 200 + seed);
    a.method_id = "a";
    b.method_id = "b";
    std::vector<int> train(30);
    std::iota(train.begin(), train.end(), 0);
    Rng rng(300 + seed);
    LabelMatrix labels(30, 1);
    for (int i = 0; i < 30; ++i)
      if (a.values(i, 0) + 0.2 * rng.normal() > 0) labels.set(i, 0);
    if (labels.support(0) == 0 || labels.support(0) == 30) continue;

    const double oa = ovr_objective(train_ovr(concat_features({&a}, train), labels, 1.0));
    const double ob = ovr_objective(train_ovr(concat_features({&b}, train), labels, 1.0));
    const double oab =
        ovr_objective(train_ovr(concat_features({&a, &b}, train), labels, 1.0));
    CHECK(oab <= std::min(oa, ob) + 1e-6);
  }
}
