#include "embens/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>
#include <vector>

#include "embens/rng.hpp"

namespace embens {

namespace {

Eigen::VectorXd random_unit(int n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  v.normalize();
  return v;
}

// Two passes of classical Gram-Schmidt against the first `cols` columns of q
// and an optional extra vector.
void reorthogonalize(Eigen::VectorXd& w, const Eigen::MatrixXd& q, int cols,
                     const Eigen::VectorXd* extra) {
  for (int pass = 0; pass < 2; ++pass) {
    if (extra) w -= (*extra) * extra->dot(w);
    if (cols > 0) {
      const auto basis = q.leftCols(cols);
      w -= basis * (basis.transpose() * w);
    }
  }
}

Eigen::MatrixXd tridiagonal(const std::vector<double>& alpha, const std::vector<double>& beta,
                            int m) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) t(i, i) = alpha[i];
  for (int i = 0; i + 1 < m; ++i) {
    t(i, i + 1) = beta[i];
    t(i + 1, i) = beta[i];
  }
  return t;
}

}  // namespace

EigenPairs lanczos_smallest(const MatVec& apply, int n, int k, std::uint64_t seed,
                            const Eigen::VectorXd* deflate, double scale, double tol) {
  const int n_free = n - (deflate ? 1 : 0);
  if (k < 1 || k > n_free)
    throw std::invalid_argument("lanczos_smallest: need 1 <= k <= " + std::to_string(n_free));

  const int m_max = std::min(n_free, std::max(8 * k + 160, 400));
  Eigen::MatrixXd q(n, m_max + 1);
  std::vector<double> alpha, beta;
  alpha.reserve(m_max);
  beta.reserve(m_max);

  Rng rng(seed);
  {
    Eigen::VectorXd v = random_unit(n, rng);
    reorthogonalize(v, q, 0, deflate);
    v.normalize();
    q.col(0) = v;
  }

  const double breakdown_tol = 1e-13 * std::max(scale, 1.0);
  // After an invariant-subspace injection the new block needs a few steps
  // before residual checks mean anything again.
  int no_check_before = k;

  for (int j = 0;; ++j) {
    Eigen::VectorXd w = apply(q.col(j));
    if (j > 0 && beta[j - 1] != 0.0) w -= beta[j - 1] * q.col(j - 1);
    const double a = q.col(j).dot(w);
    alpha.push_back(a);
    w -= a * q.col(j);
    reorthogonalize(w, q, j + 1, deflate);
    const double b = w.norm();
    const int m = j + 1;

    bool exhausted = false;
    if (b < breakdown_tol) {
      // Invariant subspace: the current Ritz pairs are exact but possibly
      // incomplete (eigenvalue multiplicities live in the complement), so
      // continue from a fresh orthogonal direction when one exists.
      Eigen::VectorXd fresh = random_unit(n, rng);
      reorthogonalize(fresh, q, m, deflate);
      const double norm = fresh.norm();
      if (norm < 1e-8 || m >= m_max) {
        exhausted = true;
        beta.push_back(0.0);
      } else {
        q.col(m) = fresh / norm;
        beta.push_back(0.0);
        no_check_before = m + std::max(10, k / 2);
      }
    } else {
      q.col(m) = w / b;
      beta.push_back(b);
    }

    const bool at_cap = m >= m_max;
    if (exhausted || (m >= k && m >= no_check_before &&
                      (m % 20 == 0 || at_cap || m == std::max(k + 8, 12)))) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tridiagonal(alpha, beta, m));
      if (exhausted) {
        if (m < k) throw std::runtime_error("lanczos_smallest: operator rank too small");
        EigenPairs out;
        out.values = es.eigenvalues().head(k);
        out.vectors = q.leftCols(m) * es.eigenvectors().leftCols(k);
        out.iterations = m;
        return out;
      }
      const double last_beta = beta[m - 1];
      bool converged = true;
      for (int i = 0; i < k && converged; ++i)
        if (std::abs(last_beta * es.eigenvectors()(m - 1, i)) > tol * scale) converged = false;
      if (converged) {
        EigenPairs out;
        out.values = es.eigenvalues().head(k);
        out.vectors = q.leftCols(m) * es.eigenvectors().leftCols(k);
        out.iterations = m;
        return out;
      }
      if (at_cap)
        throw std::runtime_error("lanczos_smallest: no convergence after " +
                                 std::to_string(m) + " iterations");
    }
    if (at_cap && !exhausted)
      throw std::runtime_error("lanczos_smallest: no convergence after " + std::to_string(m) +
                               " iterations");
  }
}

TruncatedSvd truncated_svd_dense(const Eigen::MatrixXd& s, int k) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  const int avail = std::min<int>(k, static_cast<int>(svd.singularValues().size()));
  out.u = Eigen::MatrixXd::Zero(s.rows(), k);
  out.v = Eigen::MatrixXd::Zero(s.cols(), k);
  out.sigma = Eigen::VectorXd::Zero(k);
  out.u.leftCols(avail) = svd.matrixU().leftCols(avail);
  out.v.leftCols(avail) = svd.matrixV().leftCols(avail);
  out.sigma.head(avail) = svd.singularValues().head(avail);
  return out;
}

TruncatedSvd truncated_svd_gkl(const Eigen::MatrixXd& s, int k, std::uint64_t seed,
                               double tol) {
  const int n = static_cast<int>(s.rows());
  const int nc = static_cast<int>(s.cols());
  const int rank_cap = std::min(n, nc);
  if (k < 1) throw std::invalid_argument("truncated_svd_gkl: k must be positive");
  const int want = std::min(k, rank_cap);
  const int m_max = std::min(rank_cap, std::max(4 * want + 40, 60));
  const double scale = std::max(s.cwiseAbs().maxCoeff(), 1e-300);

  Eigen::MatrixXd u_basis(n, m_max);
  Eigen::MatrixXd v_basis(nc, m_max + 1);
  std::vector<double> alpha, beta;
  Rng rng(seed);
  v_basis.col(0) = random_unit(nc, rng);

  auto assemble = [&](int steps, int avail) {
    Eigen::MatrixXd bid = Eigen::MatrixXd::Zero(steps, steps);
    for (int i = 0; i < steps; ++i) bid(i, i) = alpha[i];
    for (int i = 0; i + 1 < steps; ++i) bid(i, i + 1) = beta[i];
    Eigen::JacobiSVD<Eigen::MatrixXd> small(bid, Eigen::ComputeFullU | Eigen::ComputeFullV);
    TruncatedSvd out;
    out.u = Eigen::MatrixXd::Zero(n, k);
    out.v = Eigen::MatrixXd::Zero(nc, k);
    out.sigma = Eigen::VectorXd::Zero(k);
    const int take = std::min(avail, steps);
    out.u.leftCols(take) = u_basis.leftCols(steps) * small.matrixU().leftCols(take);
    out.v.leftCols(take) = v_basis.leftCols(steps) * small.matrixV().leftCols(take);
    out.sigma.head(take) = small.singularValues().head(take);
    out.iterations = steps;
    return out;
  };

  int no_check_before = want;
  for (int m = 0; m < m_max; ++m) {
    Eigen::VectorXd u = s * v_basis.col(m);
    if (m > 0 && beta[m - 1] != 0.0) u -= beta[m - 1] * u_basis.col(m - 1);
    reorthogonalize(u, u_basis, m, nullptr);
    double a = u.norm();
    if (a < 1e-13 * scale) {
      // Left space exhausted in this block; restart with a fresh direction
      // unless the basis already spans everything.
      Eigen::VectorXd fresh = random_unit(n, rng);
      reorthogonalize(fresh, u_basis, m, nullptr);
      if (fresh.norm() < 1e-8) return assemble(m, want);
      u_basis.col(m) = fresh / fresh.norm();
      alpha.push_back(0.0);
      no_check_before = m + std::max(10, want / 2);
    } else {
      alpha.push_back(a);
      u_basis.col(m) = u / a;
    }

    Eigen::VectorXd v = s.transpose() * u_basis.col(m);
    if (alpha[m] != 0.0) v -= alpha[m] * v_basis.col(m);
    reorthogonalize(v, v_basis, m + 1, nullptr);
    double b = v.norm();
    if (b < 1e-13 * scale) {
      Eigen::VectorXd fresh = random_unit(nc, rng);
      reorthogonalize(fresh, v_basis, m + 1, nullptr);
      if (fresh.norm() < 1e-8) return assemble(m + 1, want);
      v_basis.col(m + 1) = fresh / fresh.norm();
      beta.push_back(0.0);
      no_check_before = m + std::max(10, want / 2);
    } else {
      beta.push_back(b);
      v_basis.col(m + 1) = v / b;
    }

    const int steps = m + 1;
    if (steps >= want && steps >= no_check_before && (steps % 10 == 0 || steps == m_max)) {
      Eigen::MatrixXd bid = Eigen::MatrixXd::Zero(steps, steps);
      for (int i = 0; i < steps; ++i) bid(i, i) = alpha[i];
      for (int i = 0; i + 1 < steps; ++i) bid(i, i + 1) = beta[i];
      Eigen::JacobiSVD<Eigen::MatrixXd> small(bid, Eigen::ComputeFullU | Eigen::ComputeFullV);
      bool converged = true;
      for (int i = 0; i < want && converged; ++i)
        if (std::abs(beta[steps - 1] * small.matrixU()(steps - 1, i)) > tol * scale)
          converged = false;
      if (converged) {
        TruncatedSvd out;
        out.u = Eigen::MatrixXd::Zero(n, k);
        out.v = Eigen::MatrixXd::Zero(nc, k);
        out.sigma = Eigen::VectorXd::Zero(k);
        out.u.leftCols(want) = u_basis.leftCols(steps) * small.matrixU().leftCols(want);
        out.v.leftCols(want) = v_basis.leftCols(steps) * small.matrixV().leftCols(want);
        out.sigma.head(want) = small.singularValues().head(want);
        out.iterations = steps;
        return out;
      }
    }
  }

  // Clustered spectrum resisting the Krylov cap: dense fallback at desk scale.
  if (rank_cap <= 4000) return truncated_svd_dense(s, k);
  throw std::runtime_error("truncated_svd_gkl: no convergence after " +
                           std::to_string(alpha.size()) + " iterations");
}

TruncatedSvd truncated_svd(const Eigen::MatrixXd& s, int k, std::uint64_t seed) {
  if (std::min(s.rows(), s.cols()) <= 500) return truncated_svd_dense(s, k);
  return truncated_svd_gkl(s, k, seed);
}

}  // namespace embens
