// The embedding matrix type shared by every method, and its text format:
// line 1 `n d`, then n whitespace-separated rows.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>

namespace embens {

struct EmbeddingMatrix {
  Eigen::MatrixXd values;  // n x d, row i embeds node i
  std::string method_id;
  std::map<std::string, std::string> hyperparams;
  std::uint64_t seed = 0;

  int rows() const { return static_cast<int>(values.rows()); }
  int dim() const { return static_cast<int>(values.cols()); }

  // No NaN/Inf entries, d >= 1, n >= 1.
  void validate() const;
};

// Canonical shortest-round-trip decimal text for a double.
std::string format_double(double v);

void save_embedding(const EmbeddingMatrix& e, const std::string& path);

// method_id becomes "external:<basename>"; errors on row-count mismatch and
// non-finite values.
EmbeddingMatrix load_embedding(const std::string& path, int expected_n);

}  // namespace embens
