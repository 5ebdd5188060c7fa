#include "embens/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace embens {

Graph Graph::from_edges(int node_count, bool directed, std::vector<Edge> edges) {
  if (node_count < 1) throw std::invalid_argument("graph needs at least one node");
  Graph g;
  g.n_ = node_count;
  g.directed_ = directed;

  std::map<std::pair<int, int>, double> merged;
  for (const Edge& e : edges) {
    if (e.src < 0 || e.src >= node_count || e.dst < 0 || e.dst >= node_count)
      throw std::out_of_range("edge endpoint " + std::to_string(std::max(e.src, e.dst)) +
                              " outside node range");
    if (e.weight <= 0.0) throw std::invalid_argument("edge weights must be positive");
    if (e.src == e.dst) {
      ++g.dropped_self_loops_;
      continue;
    }
    int s = e.src, d = e.dst;
    if (!directed && s > d) std::swap(s, d);
    merged[{s, d}] += e.weight;
  }
  g.edges_.reserve(merged.size());
  for (const auto& [key, w] : merged) g.edges_.push_back({key.first, key.second, w});
  return g;
}

std::vector<int> Graph::undirected_degrees() const {
  std::vector<std::vector<int>> nbrs(n_);
  for (const Edge& e : edges_) {
    nbrs[e.src].push_back(e.dst);
    nbrs[e.dst].push_back(e.src);
  }
  std::vector<int> deg(n_, 0);
  for (int v = 0; v < n_; ++v) {
    auto& row = nbrs[v];
    std::sort(row.begin(), row.end());
    deg[v] = static_cast<int>(std::unique(row.begin(), row.end()) - row.begin());
  }
  return deg;
}

AdjacencyView::AdjacencyView(const Graph& g) {
  const int n = g.node_count();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(g.edge_count() * (g.directed() ? 1 : 2));
  for (const Edge& e : g.edges()) {
    trips.emplace_back(e.src, e.dst, e.weight);
    if (!g.directed()) trips.emplace_back(e.dst, e.src, e.weight);
  }
  a_.resize(n, n);
  a_.setFromTriplets(trips.begin(), trips.end());
  a_.makeCompressed();
}

std::span<const int> AdjacencyView::neighbors(int v) const {
  const int* idx = a_.innerIndexPtr();
  const int begin = a_.outerIndexPtr()[v];
  const int end = a_.outerIndexPtr()[v + 1];
  return {idx + begin, static_cast<std::size_t>(end - begin)};
}

std::span<const double> AdjacencyView::weights(int v) const {
  const double* val = a_.valuePtr();
  const int begin = a_.outerIndexPtr()[v];
  const int end = a_.outerIndexPtr()[v + 1];
  return {val + begin, static_cast<std::size_t>(end - begin)};
}

int AdjacencyView::out_degree(int v) const {
  return a_.outerIndexPtr()[v + 1] - a_.outerIndexPtr()[v];
}

bool AdjacencyView::has_edge(int u, int v) const {
  const auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

LoadedGraph load_edge_list(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);

  LoadedGraph out;
  std::vector<Edge> edges;
  std::string line;
  int line_no = 0;

  auto intern = [&out](const std::string& id) {
    auto it = out.index_of_id.find(id);
    if (it != out.index_of_id.end()) return it->second;
    const int idx = static_cast<int>(out.id_of_index.size());
    out.id_of_index.push_back(id);
    out.index_of_id.emplace(id, idx);
    return idx;
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string a, b, w;
    if (!(ss >> a)) continue;  // blank line
    if (a[0] == '#') continue;
    if (!(ss >> b))
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": expected `src dst [weight]`");
    double weight = 1.0;
    if (ss >> w) {
      const char* first = w.data();
      const char* last = w.data() + w.size();
      auto [ptr, ec] = std::from_chars(first, last, weight);
      if (ec != std::errc() || ptr != last || !(weight > 0.0))
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": bad weight `" + w + "`");
      std::string extra;
      if (ss >> extra)
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": trailing token `" + extra + "`");
    }
    edges.push_back({intern(a), intern(b), weight});
  }
  if (edges.empty()) throw std::runtime_error("edge list is empty: " + path);

  out.graph = Graph::from_edges(static_cast<int>(out.id_of_index.size()), directed,
                                std::move(edges));
  return out;
}

void write_edge_list(const Graph& g, const std::string& path,
                     const std::vector<std::string>* names) {
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("cannot write edge list: " + path);
  const bool unit_weights =
      std::all_of(g.edges().begin(), g.edges().end(),
                  [](const Edge& e) { return e.weight == 1.0; });
  char buf[64];
  for (const Edge& e : g.edges()) {
    if (names) {
      outf << (*names)[e.src] << ' ' << (*names)[e.dst];
    } else {
      outf << e.src << ' ' << e.dst;
    }
    if (!unit_weights) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), e.weight);
      outf << ' ' << std::string_view(buf, ptr - buf);
    }
    outf << '\n';
  }
  if (!outf) throw std::runtime_error("failed writing edge list: " + path);
}

WccResult largest_wcc(const Graph& g) {
  const int n = g.node_count();
  std::vector<std::vector<int>> adj(n);
  for (const Edge& e : g.edges()) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }

  std::vector<int> comp(n, -1);
  int best_root = -1;
  int best_size = 0;
  int n_comp = 0;
  std::vector<int> stack;
  for (int start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    const int c = n_comp++;
    int size = 0;
    stack.push_back(start);
    comp[start] = c;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      ++size;
      for (int u : adj[v]) {
        if (comp[u] < 0) {
          comp[u] = c;
          stack.push_back(u);
        }
      }
    }
    // Scanning in ascending id order means the first component hit at a given
    // size already contains the smallest original id among that size class.
    if (size > best_size) {
      best_size = size;
      best_root = c;
    }
  }

  WccResult res;
  res.new_to_old.reserve(best_size);
  std::vector<int> old_to_new(n, -1);
  for (int v = 0; v < n; ++v) {
    if (comp[v] == best_root) {
      old_to_new[v] = static_cast<int>(res.new_to_old.size());
      res.new_to_old.push_back(v);
    }
  }
  std::vector<Edge> kept;
  for (const Edge& e : g.edges()) {
    if (comp[e.src] == best_root && comp[e.dst] == best_root)
      kept.push_back({old_to_new[e.src], old_to_new[e.dst], e.weight});
  }
  res.graph = Graph::from_edges(best_size, g.directed(), std::move(kept));
  return res;
}

}  // namespace embens
