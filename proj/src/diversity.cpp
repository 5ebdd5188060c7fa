#include "embens/diversity.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace embens {

Eigen::MatrixXd pairwise_distances(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (!x.allFinite()) throw std::invalid_argument("pairwise_distances: non-finite input");
  const int n = static_cast<int>(x.rows());
  Eigen::MatrixXd d(n, n);
  // Direct row differences; the Gram shortcut loses digits for near-equal
  // rows, which the definitional-equivalence tolerance cannot absorb.
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double v = (x.row(i) - x.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Eigen::MatrixXd double_center(const Eigen::Ref<const Eigen::MatrixXd>& s) {
  if (s.rows() != s.cols()) throw std::invalid_argument("double_center: square input required");
  const Eigen::VectorXd row_means = s.rowwise().mean();
  const Eigen::RowVectorXd col_means = s.colwise().mean();
  const double grand = s.mean();
  Eigen::MatrixXd out = s;
  out.colwise() -= row_means;
  out.rowwise() -= col_means;
  out.array() += grand;
  return out;
}

double dcov2(const Eigen::Ref<const Eigen::MatrixXd>& x,
             const Eigen::Ref<const Eigen::MatrixXd>& y) {
  if (x.rows() != y.rows())
    throw std::invalid_argument("dcov2: row counts differ (" + std::to_string(x.rows()) +
                                " vs " + std::to_string(y.rows()) + ")");
  if (x.rows() < 2) throw std::invalid_argument("dcov2: need at least 2 rows");
  const Eigen::MatrixXd a = double_center(pairwise_distances(x));
  const Eigen::MatrixXd b = double_center(pairwise_distances(y));
  const double n = static_cast<double>(x.rows());
  const double v = a.cwiseProduct(b).sum() / (n * n);
  return v < 0.0 ? 0.0 : v;
}

double dcor(const Eigen::Ref<const Eigen::MatrixXd>& x,
            const Eigen::Ref<const Eigen::MatrixXd>& y) {
  const double vxx = dcov2(x, x);
  const double vyy = dcov2(y, y);
  if (vxx <= 0.0 || vyy <= 0.0)
    throw std::runtime_error("undefined distance correlation: degenerate input (zero self dCov)");
  const double vxy = dcov2(x, y);
  const double r = std::sqrt(vxy / std::sqrt(vxx * vyy));
  return std::clamp(r, 0.0, 1.0);
}

double rv_coefficient(const Eigen::Ref<const Eigen::MatrixXd>& x,
                      const Eigen::Ref<const Eigen::MatrixXd>& y) {
  if (x.rows() != y.rows()) throw std::invalid_argument("rv_coefficient: row counts differ");
  Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd yc = y.rowwise() - y.colwise().mean();
  // <XX^T, YY^T>_F = |X^T Y|_F^2 keeps everything d x d.
  const double cross = (xc.transpose() * yc).squaredNorm();
  const double nx = (xc.transpose() * xc).norm();
  const double ny = (yc.transpose() * yc).norm();
  if (nx == 0.0 || ny == 0.0)
    throw std::runtime_error("rv_coefficient: zero matrix after column centering");
  return std::clamp(cross / (nx * ny), 0.0, 1.0);
}

CorrelationReport correlation_matrix(const std::vector<const EmbeddingMatrix*>& embeddings,
                                     DiversityMeasure measure) {
  const int k = static_cast<int>(embeddings.size());
  if (k == 0) throw std::invalid_argument("correlation_matrix: no embeddings");
  CorrelationReport report;
  report.values.resize(k, k);
  for (const auto* e : embeddings) report.methods.push_back(e->method_id);
  for (int i = 0; i < k; ++i) {
    report.values(i, i) = 1.0;
    for (int j = i + 1; j < k; ++j) {
      double v;
      try {
        v = measure == DiversityMeasure::dcor
                ? dcor(embeddings[i]->values, embeddings[j]->values)
                : rv_coefficient(embeddings[i]->values, embeddings[j]->values);
      } catch (const std::exception& e) {
        throw std::runtime_error("correlation_matrix: " + report.methods[i] + " vs " +
                                 report.methods[j] + ": " + e.what());
      }
      report.values(i, j) = v;
      report.values(j, i) = v;
    }
  }
  return report;
}

void write_correlation_csv(const CorrelationReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write correlation csv: " + path);
  for (std::size_t i = 0; i < report.methods.size(); ++i)
    out << (i ? "," : "") << report.methods[i];
  out << '\n';
  out << std::fixed << std::setprecision(6);
  for (int i = 0; i < report.values.rows(); ++i) {
    for (int j = 0; j < report.values.cols(); ++j)
      out << (j ? "," : "") << report.values(i, j);
    out << '\n';
  }
}

}  // namespace embens
