#include "embens/hope.hpp"

#include <Eigen/SparseCore>
#include <cmath>
#include <stdexcept>

#include "embens/rng.hpp"
#include "embens/solvers.hpp"

namespace embens {

HopeSimilarity hope_similarity_from_string(const std::string& s) {
  if (s == "katz") return HopeSimilarity::katz;
  if (s == "ppr" || s == "pagerank") return HopeSimilarity::ppr;
  if (s == "common_neighbors" || s == "cn") return HopeSimilarity::common_neighbors;
  if (s == "adamic_adar" || s == "aa") return HopeSimilarity::adamic_adar;
  throw std::invalid_argument("unknown hope similarity: " + s);
}

std::string to_string(HopeSimilarity s) {
  switch (s) {
    case HopeSimilarity::katz: return "katz";
    case HopeSimilarity::ppr: return "ppr";
    case HopeSimilarity::common_neighbors: return "common_neighbors";
    case HopeSimilarity::adamic_adar: return "adamic_adar";
  }
  return "?";
}

namespace {

Eigen::SparseMatrix<double> adjacency_sparse(const Graph& g) {
  const int n = g.node_count();
  std::vector<Eigen::Triplet<double>> trips;
  for (const Edge& e : g.edges()) {
    trips.emplace_back(e.src, e.dst, e.weight);
    if (!g.directed()) trips.emplace_back(e.dst, e.src, e.weight);
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

// Fixed-point iteration S <- seed + M S; geometric convergence iff the
// spectral radius of M is below one, which doubles as the Katz validity check.
Eigen::MatrixXd neumann_series(const Eigen::SparseMatrix<double>& m,
                               const Eigen::MatrixXd& seed_term, const std::string& what) {
  const int n = static_cast<int>(seed_term.rows());
  Eigen::MatrixXd s = seed_term;
  double prev_delta = std::numeric_limits<double>::infinity();
  int growth_streak = 0;
  const double scale = std::max(seed_term.cwiseAbs().maxCoeff(), 1e-300);
  for (int iter = 0; iter < 5000; ++iter) {
    Eigen::MatrixXd next = seed_term + m * s;
    const double delta = (next - s).cwiseAbs().maxCoeff();
    s.swap(next);
    if (!std::isfinite(delta) || s.cwiseAbs().maxCoeff() > 1e12 * scale)
      throw std::runtime_error(what + " series diverges");
    if (delta <= 1e-12 * std::max(1.0, s.cwiseAbs().maxCoeff())) return s;
    growth_streak = delta >= prev_delta ? growth_streak + 1 : 0;
    if (growth_streak > 25) throw std::runtime_error(what + " series diverges");
    prev_delta = delta;
  }
  throw std::runtime_error(what + " series did not converge within 5000 iterations");
}

}  // namespace

Eigen::MatrixXd hope_similarity(const Graph& g, HopeSimilarity kind, double beta) {
  const int n = g.node_count();
  const Eigen::SparseMatrix<double> a = adjacency_sparse(g);
  switch (kind) {
    case HopeSimilarity::katz: {
      if (beta <= 0) throw std::invalid_argument("katz: beta must be positive");
      const Eigen::SparseMatrix<double> ba = (beta * a).eval();
      return neumann_series(ba, Eigen::MatrixXd(ba), "Katz");
    }
    case HopeSimilarity::ppr: {
      if (beta <= 0 || beta >= 1)
        throw std::invalid_argument("ppr: damping beta must lie in (0,1)");
      // Row-stochastic P; rows without out-edges stay zero.
      Eigen::SparseMatrix<double> p = a;
      Eigen::VectorXd row_sums = a * Eigen::VectorXd::Ones(n);
      for (int i = 0; i < p.outerSize(); ++i)
        for (Eigen::SparseMatrix<double>::InnerIterator it(p, i); it; ++it)
          if (row_sums(it.row()) > 0) it.valueRef() /= row_sums(it.row());
      const Eigen::SparseMatrix<double> bp = (beta * p).eval();
      Eigen::MatrixXd seed_term = (1.0 - beta) * Eigen::MatrixXd::Identity(n, n);
      return neumann_series(bp, seed_term, "PPR");
    }
    case HopeSimilarity::common_neighbors:
      return Eigen::MatrixXd(Eigen::SparseMatrix<double>(a * a));
    case HopeSimilarity::adamic_adar: {
      Eigen::VectorXd total_degree = a * Eigen::VectorXd::Ones(n);
      total_degree += a.transpose() * Eigen::VectorXd::Ones(n);
      Eigen::VectorXd inv = total_degree.unaryExpr(
          [](double v) { return v > 0 ? 1.0 / v : 0.0; });
      return Eigen::MatrixXd(a * inv.asDiagonal() * a);
    }
  }
  throw std::logic_error("unreachable");
}

EmbeddingMatrix embed_hope(const Graph& g, int d, HopeSimilarity kind, double beta,
                           std::uint64_t seed) {
  if (d < 2 || d % 2 != 0)
    throw std::invalid_argument("hope: dimension must be even and >= 2");
  const Eigen::MatrixXd s = hope_similarity(g, kind, beta);
  if (s.cwiseAbs().maxCoeff() == 0.0)
    throw std::runtime_error("hope: zero similarity matrix (" + to_string(kind) + ")");

  const int k = d / 2;
  const TruncatedSvd svd = truncated_svd(s, k, derive_seed(seed, "hope-svd"));
  const Eigen::VectorXd sq = svd.sigma.cwiseMax(0.0).cwiseSqrt();

  EmbeddingMatrix out;
  out.values.resize(g.node_count(), d);
  out.values.leftCols(k) = svd.u * sq.asDiagonal();
  out.values.rightCols(k) = svd.v * sq.asDiagonal();
  out.method_id = "hope";
  out.seed = seed;
  out.hyperparams = {{"similarity", to_string(kind)}, {"beta", format_double(beta)}};
  out.validate();
  return out;
}

}  // namespace embens
