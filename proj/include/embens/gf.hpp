// Graph factorization: SGD on the regularized adjacency reconstruction loss
//   1/2 sum_{(i,j) in E} (A_ij - <x_i, x_j>)^2 + (reg/2) sum_i |x_i|^2.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "embens/embedding.hpp"
#include "embens/graph.hpp"

namespace embens {

struct GfResult {
  EmbeddingMatrix embedding;
  std::vector<double> objective_history;  // one entry per completed epoch
};

// Shuffled-edge SGD, init uniform in [-0.5/d, 0.5/d], early stop when the
// relative objective change drops below 1e-4. Throws when the objective turns
// non-finite, naming the learning rate.
GfResult embed_gf_full(const Graph& g, int d, double lr, double reg, int epochs,
                       std::uint64_t seed);

EmbeddingMatrix embed_gf(const Graph& g, int d, double lr, double reg, int epochs,
                         std::uint64_t seed);

// Batch objective and gradient of the loss above at an arbitrary point;
// the gradient is checked against finite differences in the tests.
double gf_objective(const Graph& g, const Eigen::Ref<const Eigen::MatrixXd>& x, double reg);
Eigen::MatrixXd gf_gradient(const Graph& g, const Eigen::Ref<const Eigen::MatrixXd>& x,
                            double reg);

}  // namespace embens
