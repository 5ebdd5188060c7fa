// Distance covariance / correlation and the RV coefficient between embedding
// matrices, plus all-pairs method correlation reports.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "embens/embedding.hpp"

namespace embens {

// Euclidean distances between all row pairs.
Eigen::MatrixXd pairwise_distances(const Eigen::Ref<const Eigen::MatrixXd>& x);

// A[j,k] = a[j,k] - rowmean_j - colmean_k + grandmean; all row and column
// sums of the result vanish.
Eigen::MatrixXd double_center(const Eigen::Ref<const Eigen::MatrixXd>& s);

// V-statistic distance covariance squared, (1/n^2) sum_jk A[j,k] B[j,k].
// Tiny negative values from rounding are clamped to zero.
double dcov2(const Eigen::Ref<const Eigen::MatrixXd>& x,
             const Eigen::Ref<const Eigen::MatrixXd>& y);

// dCor = sqrt( dcov2(x,y) / sqrt(dcov2(x,x) * dcov2(y,y)) ), clamped to [0,1].
// Degenerate inputs (zero self distance covariance) are an error.
double dcor(const Eigen::Ref<const Eigen::MatrixXd>& x,
            const Eigen::Ref<const Eigen::MatrixXd>& y);

// RV = <X X^T, Y Y^T>_F / (|X X^T|_F |Y Y^T|_F) with columns centered first.
double rv_coefficient(const Eigen::Ref<const Eigen::MatrixXd>& x,
                      const Eigen::Ref<const Eigen::MatrixXd>& y);

enum class DiversityMeasure { dcor, rv };

struct CorrelationReport {
  std::vector<std::string> methods;
  Eigen::MatrixXd values;  // symmetric, unit diagonal
};

CorrelationReport correlation_matrix(const std::vector<const EmbeddingMatrix*>& embeddings,
                                     DiversityMeasure measure);

// Header row of method ids, then one row per method, 6 decimal places.
void write_correlation_csv(const CorrelationReport& report, const std::string& path);

}  // namespace embens
