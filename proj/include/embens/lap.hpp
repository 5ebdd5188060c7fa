// Laplacian eigenmaps: generalized eigenproblem L y = lambda D y with
// L = D - W, solved through the normalized Laplacian.
#pragma once

#include "embens/embedding.hpp"
#include "embens/graph.hpp"

namespace embens {

// Eigenvectors of the d smallest non-trivial eigenvalues; the constant
// lambda=0 eigenvector is deflated out analytically. Columns are
// D-normalized (y^T D y = 1). Directed input is symmetrized W = (A+A^T)/2.
// Requires a connected graph (post-WCC) and d <= n-2.
EmbeddingMatrix embed_lap(const Graph& g, int d);

}  // namespace embens
