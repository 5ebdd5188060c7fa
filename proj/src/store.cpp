#include "embens/store.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "embens/gf.hpp"
#include "embens/hope.hpp"
#include "embens/lap.hpp"
#include "embens/node2vec.hpp"
#include "embens/rng.hpp"

namespace fs = std::filesystem;

namespace embens {

EmbeddingStore::EmbeddingStore(std::string dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) fs::create_directories(dir_);
}

std::string EmbeddingStore::key(const std::string& method, int dim,
                                const std::map<std::string, std::string>& hyperparams,
                                std::uint64_t seed) {
  std::ostringstream canon;
  canon << method << '|' << dim << '|';
  for (const auto& [k, v] : hyperparams) canon << k << '=' << v << ';';
  canon << "seed=" << seed;
  const std::uint64_t h = fnv1a64(canon.str());
  std::ostringstream out;
  out << method << '_' << dim << '_' << std::hex << h;
  return out.str();
}

const EmbeddingMatrix* EmbeddingStore::find(const std::string& key, int expected_n) {
  if (auto it = memory_.find(key); it != memory_.end()) return it->second.get();
  if (dir_.empty()) return nullptr;
  const fs::path file = fs::path(dir_) / (key + ".emb");
  if (!fs::exists(file)) return nullptr;
  EmbeddingMatrix e = load_embedding(file.string(), expected_n);
  // Restore identity from the sidecar; the loader tags files as external.
  const fs::path meta = fs::path(dir_) / (key + ".meta.json");
  if (fs::exists(meta)) {
    std::ifstream in(meta);
    nlohmann::json j = nlohmann::json::parse(in);
    e.method_id = j.value("method", e.method_id);
    e.seed = j.value("seed", std::uint64_t{0});
    for (auto& [k, v] : j.value("hyperparams", nlohmann::json::object()).items())
      e.hyperparams[k] = v.get<std::string>();
  }
  auto owned = std::make_unique<EmbeddingMatrix>(std::move(e));
  const EmbeddingMatrix* ptr = owned.get();
  memory_.emplace(key, std::move(owned));
  return ptr;
}

const EmbeddingMatrix& EmbeddingStore::put(const std::string& key, EmbeddingMatrix e) {
  if (!dir_.empty()) {
    const fs::path file = fs::path(dir_) / (key + ".emb");
    save_embedding(e, file.string());
    nlohmann::json meta;
    meta["method"] = e.method_id;
    meta["seed"] = e.seed;
    meta["n"] = e.rows();
    meta["dim"] = e.dim();
    meta["hyperparams"] = e.hyperparams;
    std::ofstream out(fs::path(dir_) / (key + ".meta.json"));
    out << meta.dump(2) << '\n';
  }
  auto owned = std::make_unique<EmbeddingMatrix>(std::move(e));
  const EmbeddingMatrix* ptr = owned.get();
  memory_[key] = std::move(owned);
  return *ptr;
}

const EmbeddingMatrix& EmbeddingStore::get(const std::string& key) const {
  auto it = memory_.find(key);
  if (it == memory_.end())
    throw std::runtime_error("embedding cache entry missing: " + key);
  return *it->second;
}

const EmbeddingMatrix& EmbeddingStore::get_or_fit(
    const std::string& key, int expected_n, const std::function<EmbeddingMatrix()>& fit) {
  if (const EmbeddingMatrix* hit = find(key, expected_n)) return *hit;
  ++fit_count_;
  return put(key, fit());
}

EmbeddingMatrix fit_embedding(const Graph& g, const std::string& method, int dim,
                              const std::map<std::string, std::string>& hyperparams,
                              std::uint64_t seed) {
  auto param = [&hyperparams](const std::string& name, double fallback) {
    auto it = hyperparams.find(name);
    return it == hyperparams.end() ? fallback : std::stod(it->second);
  };
  if (method == "gf") {
    return embed_gf(g, dim, param("lr", 1e-2), param("reg", 1.0),
                    static_cast<int>(param("epochs", 100)), seed);
  }
  if (method == "lap") {
    return embed_lap(g, dim);
  }
  if (method == "hope") {
    const auto it = hyperparams.find("similarity");
    const HopeSimilarity kind =
        it == hyperparams.end() ? HopeSimilarity::katz : hope_similarity_from_string(it->second);
    return embed_hope(g, dim, kind, param("beta", 1e-2), seed);
  }
  if (method == "node2vec") {
    Node2VecParams p;
    p.dim = dim;
    p.p = param("p", 1.0);
    p.q = param("q", 1.0);
    p.walk_length = static_cast<int>(param("walk_length", 80));
    p.walks_per_node = static_cast<int>(param("walks_per_node", 10));
    p.window = static_cast<int>(param("window", 10));
    p.seed = seed;
    return embed_node2vec(g, p);
  }
  throw std::invalid_argument("unknown embedding method: " + method);
}

}  // namespace embens
