#include "embens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "embens/rng.hpp"

namespace embens {

SynthKind synth_kind_from_string(const std::string& s) {
  if (s == "barabasi_albert" || s == "ba") return SynthKind::barabasi_albert;
  if (s == "watts_strogatz" || s == "ws") return SynthKind::watts_strogatz;
  if (s == "stochastic_block_model" || s == "sbm") return SynthKind::stochastic_block_model;
  if (s == "random_geometric" || s == "rgg") return SynthKind::random_geometric;
  throw std::invalid_argument("unknown synthetic graph kind: " + s);
}

std::string to_string(SynthKind k) {
  switch (k) {
    case SynthKind::barabasi_albert: return "barabasi_albert";
    case SynthKind::watts_strogatz: return "watts_strogatz";
    case SynthKind::stochastic_block_model: return "stochastic_block_model";
    case SynthKind::random_geometric: return "random_geometric";
  }
  return "?";
}

namespace {

Graph generate_ba(int n, int m, Rng& rng) {
  if (m < 1 || m >= n) throw std::invalid_argument("barabasi_albert requires 1 <= m < n");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n - m) * m);
  // Endpoint pool: each node appears once per incident edge, which makes a
  // uniform draw from the pool a degree-proportional draw.
  std::vector<int> pool;
  std::vector<int> targets(m);
  std::iota(targets.begin(), targets.end(), 0);
  for (int v = m; v < n; ++v) {
    for (int t : targets) {
      edges.push_back({v, t, 1.0});
      pool.push_back(t);
      pool.push_back(v);
    }
    if (v + 1 == n) break;
    std::unordered_set<int> picked;
    while (static_cast<int>(picked.size()) < m)
      picked.insert(pool[rng.below(pool.size())]);
    targets.assign(picked.begin(), picked.end());
    std::sort(targets.begin(), targets.end());
  }
  return Graph::from_edges(n, false, std::move(edges));
}

Graph generate_ws(int n, int k, double p, Rng& rng) {
  if (k % 2 != 0 || k < 2 || k >= n)
    throw std::invalid_argument("watts_strogatz requires even k with 2 <= k < n");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("rewiring probability outside [0,1]");
  std::set<std::pair<int, int>> edge_set;
  auto canon = [](int a, int b) { return std::pair(std::min(a, b), std::max(a, b)); };
  for (int j = 1; j <= k / 2; ++j)
    for (int u = 0; u < n; ++u) edge_set.insert(canon(u, (u + j) % n));

  for (int j = 1; j <= k / 2; ++j) {
    for (int u = 0; u < n; ++u) {
      if (!rng.bernoulli(p)) continue;
      const auto old_edge = canon(u, (u + j) % n);
      if (!edge_set.count(old_edge)) continue;  // already rewired away
      // Skip saturated nodes, otherwise the draw below cannot terminate.
      bool saturated = true;
      for (int w = 0; w < n && saturated; ++w)
        if (w != u && !edge_set.count(canon(u, w))) saturated = false;
      if (saturated) continue;
      int w;
      do {
        w = static_cast<int>(rng.below(n));
      } while (w == u || edge_set.count(canon(u, w)));
      edge_set.erase(old_edge);
      edge_set.insert(canon(u, w));
    }
  }
  std::vector<Edge> edges;
  edges.reserve(edge_set.size());
  for (auto [a, b] : edge_set) edges.push_back({a, b, 1.0});
  return Graph::from_edges(n, false, std::move(edges));
}

Graph generate_sbm(int n, const std::vector<int>& sizes_in, double p_in, double p_out, Rng& rng) {
  if (p_in < 0 || p_in > 1 || p_out < 0 || p_out > 1)
    throw std::invalid_argument("block probabilities outside [0,1]");
  std::vector<int> sizes = sizes_in;
  if (sizes.empty()) {
    // Default: 4 blocks as equal as possible.
    const int base = n / 4;
    sizes = {base, base, base, n - 3 * base};
  }
  if (std::accumulate(sizes.begin(), sizes.end(), 0) != n)
    throw std::invalid_argument("block sizes must sum to n");
  std::vector<int> block(n);
  int v = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b)
    for (int i = 0; i < sizes[b]; ++i) block[v++] = static_cast<int>(b);

  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = block[i] == block[j] ? p_in : p_out;
      if (p >= 1.0 || (p > 0.0 && rng.bernoulli(p))) edges.push_back({i, j, 1.0});
    }
  }
  return Graph::from_edges(n, false, std::move(edges));
}

bool is_connected_undirected(const Graph& g) {
  const int n = g.node_count();
  std::vector<std::vector<int>> adj(n);
  for (const Edge& e : g.edges()) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++count;
    for (int u : adj[v])
      if (!seen[u]) {
        seen[u] = 1;
        stack.push_back(u);
      }
  }
  return count == n;
}

Graph generate_rgg(int n, double radius, std::uint64_t seed) {
  if (radius <= 0.0) throw std::invalid_argument("random_geometric needs radius > 0");
  const double r2 = radius * radius;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng rng(derive_seed(seed, "rgg-attempt-" + std::to_string(attempt)));
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = rng.uniform01();
      ys[i] = rng.uniform01();
    }
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double dx = xs[i] - xs[j], dy = ys[i] - ys[j];
        if (dx * dx + dy * dy <= r2) edges.push_back({i, j, 1.0});
      }
    Graph g = Graph::from_edges(n, false, std::move(edges));
    if (n == 1 || (g.has_any_edges() && is_connected_undirected(g))) return g;
  }
  throw std::runtime_error("random_geometric stayed disconnected after 100 attempts; increase the radius");
}

}  // namespace

Graph generate(const SynthSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("node count must be >= 1");
  Rng rng(derive_seed(spec.seed, to_string(spec.kind)));
  switch (spec.kind) {
    case SynthKind::barabasi_albert: return generate_ba(spec.n, spec.ba_m, rng);
    case SynthKind::watts_strogatz: return generate_ws(spec.n, spec.ws_k, spec.ws_p, rng);
    case SynthKind::stochastic_block_model:
      return generate_sbm(spec.n, spec.sbm_block_sizes, spec.sbm_p_in, spec.sbm_p_out, rng);
    case SynthKind::random_geometric: return generate_rgg(spec.n, spec.rgg_radius, spec.seed);
  }
  throw std::logic_error("unreachable");
}

Graph merge_with_random_edges(const std::vector<Graph>& graphs, double pair_fraction,
                              double accept_prob, std::uint64_t seed) {
  if (graphs.empty()) throw std::invalid_argument("merge needs at least one input graph");
  if (pair_fraction < 0 || pair_fraction > 1 || accept_prob < 0 || accept_prob > 1)
    throw std::invalid_argument("pair_fraction and accept_prob must lie in [0,1]");

  int total = 0;
  std::vector<Edge> edges;
  for (const Graph& g : graphs) {
    if (g.directed()) throw std::invalid_argument("merge expects undirected graphs");
    for (const Edge& e : g.edges()) edges.push_back({e.src + total, e.dst + total, e.weight});
    total += g.node_count();
  }

  std::set<std::pair<int, int>> existing;
  for (const Edge& e : edges) existing.insert({e.src, e.dst});

  const std::uint64_t n = static_cast<std::uint64_t>(total);
  const std::uint64_t total_pairs = n * (n - 1) / 2;
  std::uint64_t quota = static_cast<std::uint64_t>(pair_fraction * static_cast<double>(n));
  quota = std::min(quota, total_pairs);

  Rng rng(derive_seed(seed, "merge-pairs"));
  std::vector<std::uint64_t> sampled;
  std::unordered_set<std::uint64_t> seen;
  while (sampled.size() < quota) {
    const std::uint64_t p = rng.below(total_pairs);
    if (seen.insert(p).second) sampled.push_back(p);
  }

  for (const std::uint64_t p : sampled) {
    const bool accept = rng.uniform01() < accept_prob;
    if (!accept) continue;
    // Decode lexicographic pair index p into (i, j), i < j.
    const double nd = static_cast<double>(n);
    std::uint64_t i = static_cast<std::uint64_t>(
        std::floor(nd - 0.5 - std::sqrt((nd - 0.5) * (nd - 0.5) - 2.0 * static_cast<double>(p))));
    auto row_start = [n](std::uint64_t r) { return r * n - r * (r + 1) / 2; };
    while (row_start(i + 1) <= p) ++i;
    while (row_start(i) > p) --i;
    const std::uint64_t j = i + 1 + (p - row_start(i));
    const auto key = std::pair(static_cast<int>(i), static_cast<int>(j));
    if (existing.insert(key).second) edges.push_back({key.first, key.second, 1.0});
  }
  return Graph::from_edges(total, false, std::move(edges));
}

std::vector<int> quantile_bins(const std::vector<double>& values, int bins) {
  if (bins < 1) throw std::invalid_argument("bins must be >= 1");
  const int n = static_cast<int>(values.size());
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> out(n);
  for (int v = 0; v < n; ++v) {
    const auto r = std::lower_bound(sorted.begin(), sorted.end(), values[v]) - sorted.begin();
    out[v] = std::min<int>(static_cast<int>(r * bins / n), bins - 1);
  }
  return out;
}

namespace {

LabelMatrix bins_to_labels(const std::vector<int>& bin_of, int bins) {
  const int n = static_cast<int>(bin_of.size());
  std::vector<int> remap(bins, -1);
  int kept = 0;
  for (int b = 0; b < bins; ++b)
    if (std::find(bin_of.begin(), bin_of.end(), b) != bin_of.end()) remap[b] = kept++;
  LabelMatrix m(n, kept);
  m.class_names.resize(kept);
  for (int b = 0; b < bins; ++b)
    if (remap[b] >= 0) m.class_names[remap[b]] = "bin" + std::to_string(b);
  for (int v = 0; v < n; ++v) m.set(v, remap[bin_of[v]]);
  return m;
}

}  // namespace

LabelMatrix degree_labels(const Graph& g, int bins) {
  const auto deg = g.undirected_degrees();
  std::vector<double> values(deg.begin(), deg.end());
  return bins_to_labels(quantile_bins(values, bins), bins);
}

std::vector<double> closeness_centrality(const Graph& g) {
  const int n = g.node_count();
  std::vector<std::vector<int>> adj(n);
  for (const Edge& e : g.edges()) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  std::vector<double> closeness(n);
  std::vector<int> dist(n);
  std::vector<int> queue(n);
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    int head = 0, tail = 0;
    queue[tail++] = s;
    dist[s] = 0;
    long long sum = 0;
    int reached = 1;
    while (head < tail) {
      const int v = queue[head++];
      sum += dist[v];
      for (int u : adj[v])
        if (dist[u] < 0) {
          dist[u] = dist[v] + 1;
          queue[tail++] = u;
          ++reached;
        }
    }
    if (reached != n)
      throw std::runtime_error(
          "closeness centrality needs a connected graph; extract the largest "
          "weakly connected component first");
    closeness[s] = n == 1 ? 1.0 : static_cast<double>(n - 1) / static_cast<double>(sum);
  }
  return closeness;
}

LabelMatrix closeness_labels(const Graph& g, int bins) {
  return bins_to_labels(quantile_bins(closeness_centrality(g), bins), bins);
}

}  // namespace embens
