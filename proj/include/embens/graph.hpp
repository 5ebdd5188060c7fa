// Graph data model, edge-list ingestion and structural preprocessing.
#pragma once

#include <Eigen/SparseCore>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace embens {

struct Edge {
  int src = 0;
  int dst = 0;
  double weight = 1.0;
};

// Simple sparse graph with dense node ids 0..n-1. Construction canonicalizes
// the edge set: self-loops are dropped (counted), duplicate (src,dst) pairs
// have their weights summed, and undirected edges are stored once with
// src <= dst. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  static Graph from_edges(int node_count, bool directed, std::vector<Edge> edges);

  int node_count() const { return n_; }
  bool directed() const { return directed_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  int dropped_self_loops() const { return dropped_self_loops_; }

  // Number of distinct neighbors ignoring edge direction.
  std::vector<int> undirected_degrees() const;

  bool has_any_edges() const { return !edges_.empty(); }

 private:
  int n_ = 0;
  bool directed_ = false;
  std::vector<Edge> edges_;
  int dropped_self_loops_ = 0;
};

// Row-major sparse adjacency. Row i lists the out-neighbors of i; for
// undirected graphs every edge appears in both rows, so the matrix is
// symmetric exactly.
class AdjacencyView {
 public:
  explicit AdjacencyView(const Graph& g);

  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return a_; }
  int node_count() const { return static_cast<int>(a_.rows()); }

  std::span<const int> neighbors(int v) const;
  std::span<const double> weights(int v) const;
  int out_degree(int v) const;
  // Binary search within the sorted row of u.
  bool has_edge(int u, int v) const;

 private:
  Eigen::SparseMatrix<double, Eigen::RowMajor> a_;
};

struct LoadedGraph {
  Graph graph;
  std::vector<std::string> id_of_index;  // dense index -> original id
  std::unordered_map<std::string, int> index_of_id;
};

// Parses whitespace-separated `src dst [weight]` lines; lines whose first
// non-blank character is '#' are ignored. Node ids are arbitrary tokens and
// are densely re-indexed in first-seen order.
LoadedGraph load_edge_list(const std::string& path, bool directed);

// Writes the canonical edge set, one `src dst [weight]` line per edge; the
// weight column is omitted when every weight is 1. Node names default to the
// dense indices.
void write_edge_list(const Graph& g, const std::string& path,
                     const std::vector<std::string>* names = nullptr);

struct WccResult {
  Graph graph;
  std::vector<int> new_to_old;  // new dense id -> id in the input graph
};

// Subgraph induced on the largest weakly connected component (directions
// ignored for connectivity). Ties on component size are broken by the
// smallest contained original node id. New ids follow ascending old ids.
WccResult largest_wcc(const Graph& g);

}  // namespace embens
