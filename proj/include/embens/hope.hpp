// Higher-order proximity embedding: truncated SVD of a node similarity
// matrix, embedding = [U sqrt(S) || V sqrt(S)].
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "embens/embedding.hpp"
#include "embens/graph.hpp"

namespace embens {

enum class HopeSimilarity { katz, ppr, common_neighbors, adamic_adar };

HopeSimilarity hope_similarity_from_string(const std::string& s);
std::string to_string(HopeSimilarity s);

// Kernels:
//   katz:             S = (I - bA)^{-1} bA, built by the Neumann iteration
//                     S <- bA + bA S (diverges when b >= 1/rho(A));
//   ppr:              S = (1-b)(I - bP)^{-1}, P row-stochastic;
//   common_neighbors: S = A^2;
//   adamic_adar:      S = A diag(1/(deg_in + deg_out)) A.
Eigen::MatrixXd hope_similarity(const Graph& g, HopeSimilarity kind, double beta);

// d must be even; rank-(d/2) truncated SVD of the similarity matrix, source
// and target factors concatenated. A zero similarity matrix is an error.
EmbeddingMatrix embed_hope(const Graph& g, int d, HopeSimilarity kind, double beta,
                           std::uint64_t seed);

}  // namespace embens
