#include "embens/gf.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "embens/rng.hpp"

namespace embens {

double gf_objective(const Graph& g, const Eigen::Ref<const Eigen::MatrixXd>& x, double reg) {
  double obj = 0;
  for (const Edge& e : g.edges()) {
    const double err = e.weight - x.row(e.src).dot(x.row(e.dst));
    obj += 0.5 * err * err;
  }
  return obj + 0.5 * reg * x.squaredNorm();
}

Eigen::MatrixXd gf_gradient(const Graph& g, const Eigen::Ref<const Eigen::MatrixXd>& x,
                            double reg) {
  Eigen::MatrixXd grad = reg * x;
  for (const Edge& e : g.edges()) {
    const double err = e.weight - x.row(e.src).dot(x.row(e.dst));
    grad.row(e.src) -= err * x.row(e.dst);
    grad.row(e.dst) -= err * x.row(e.src);
  }
  return grad;
}

GfResult embed_gf_full(const Graph& g, int d, double lr, double reg, int epochs,
                       std::uint64_t seed) {
  if (!g.has_any_edges()) throw std::invalid_argument("graph factorization needs edges");
  if (d < 1 || lr <= 0 || reg < 0 || epochs < 1)
    throw std::invalid_argument("graph factorization: bad hyperparameters");

  const int n = g.node_count();
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor x(n, d);
  Rng rng(derive_seed(seed, "gf-init"));
  const double span = 0.5 / d;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.uniform(-span, span);

  // Edge visits carry the full reconstruction gradient plus the node's
  // regularization share, so one pass approximates the batch gradient.
  std::vector<int> visits(n, 0);
  for (const Edge& e : g.edges()) {
    ++visits[e.src];
    ++visits[e.dst];
  }
  std::vector<double> reg_share(n, 0.0);
  for (int v = 0; v < n; ++v) reg_share[v] = visits[v] ? reg / visits[v] : 0.0;

  std::vector<std::size_t> order(g.edge_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(derive_seed(seed, "gf-shuffle"));

  GfResult out;
  Eigen::VectorXd xi(d), xj(d);
  double prev_obj = gf_objective(g, x, reg);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (const std::size_t idx : order) {
      const Edge& e = g.edges()[idx];
      auto ri = x.row(e.src);
      auto rj = x.row(e.dst);
      xi = ri;
      xj = rj;
      const double err = e.weight - xi.dot(xj);
      ri += lr * (err * xj.transpose() - reg_share[e.src] * xi.transpose());
      rj += lr * (err * xi.transpose() - reg_share[e.dst] * xj.transpose());
    }
    const double obj = gf_objective(g, x, reg);
    out.objective_history.push_back(obj);
    if (!std::isfinite(obj))
      throw std::runtime_error("graph factorization diverged (lr=" + format_double(lr) + ")");
    if (epoch > 0 && std::abs(prev_obj - obj) < 1e-4 * std::max(1.0, std::abs(prev_obj)))
      break;
    prev_obj = obj;
  }

  out.embedding.values = x;
  out.embedding.method_id = "gf";
  out.embedding.seed = seed;
  out.embedding.hyperparams = {{"lr", format_double(lr)},
                               {"reg", format_double(reg)},
                               {"epochs", std::to_string(epochs)}};
  out.embedding.validate();
  return out;
}

EmbeddingMatrix embed_gf(const Graph& g, int d, double lr, double reg, int epochs,
                         std::uint64_t seed) {
  return embed_gf_full(g, d, lr, reg, epochs, seed).embedding;
}

}  // namespace embens
