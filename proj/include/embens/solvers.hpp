// Iterative eigen/SVD solvers (Lanczos-style, full reorthogonalization) with
// dense fallbacks used by the spectral embedders.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

namespace embens {

using MatVec = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // n x k, column i pairs with values(i)
  int iterations = 0;
};

// k smallest eigenpairs of a symmetric operator via Lanczos with full
// reorthogonalization; the Krylov basis grows until the Ritz residuals
// |beta_m s_{m,i}| fall below tol * scale. An optional known eigenvector is
// deflated out of the iteration. Throws on non-convergence, reporting the
// iteration count.
EigenPairs lanczos_smallest(const MatVec& apply, int n, int k, std::uint64_t seed,
                            const Eigen::VectorXd* deflate = nullptr, double scale = 1.0,
                            double tol = 1e-9);

struct TruncatedSvd {
  Eigen::MatrixXd u;       // n x k
  Eigen::MatrixXd v;       // n x k
  Eigen::VectorXd sigma;   // descending, length k
  int iterations = 0;
};

// Rank-k truncated SVD. Dense path (Eigen BDCSVD) for small inputs,
// Golub-Kahan-Lanczos bidiagonalization with full reorthogonalization above
// the threshold. Exhausted rank pads trailing singular values with zero.
TruncatedSvd truncated_svd(const Eigen::MatrixXd& s, int k, std::uint64_t seed);
TruncatedSvd truncated_svd_dense(const Eigen::MatrixXd& s, int k);
TruncatedSvd truncated_svd_gkl(const Eigen::MatrixXd& s, int k, std::uint64_t seed,
                               double tol = 1e-10);

}  // namespace embens
