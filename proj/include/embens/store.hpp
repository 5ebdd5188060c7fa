// Disk-backed embedding cache, keyed `<method>_<dim>_<hyperhash>`, plus the
// dispatcher that fits a method by name.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "embens/embedding.hpp"
#include "embens/graph.hpp"

namespace embens {

class EmbeddingStore {
 public:
  // Empty directory keeps the cache in memory only.
  explicit EmbeddingStore(std::string dir = "");

  static std::string key(const std::string& method, int dim,
                         const std::map<std::string, std::string>& hyperparams,
                         std::uint64_t seed);

  // Memory first, then disk; null when absent. expected_n < 0 skips the check.
  const EmbeddingMatrix* find(const std::string& key, int expected_n);
  const EmbeddingMatrix& put(const std::string& key, EmbeddingMatrix e);
  const EmbeddingMatrix& get(const std::string& key) const;

  // Returns the cached entry or fits, stores and counts a new one.
  const EmbeddingMatrix& get_or_fit(const std::string& key, int expected_n,
                                    const std::function<EmbeddingMatrix()>& fit);

  int fit_count() const { return fit_count_; }
  void reset_fit_count() { fit_count_ = 0; }
  const std::string& directory() const { return dir_; }

 private:
  std::string dir_;
  std::map<std::string, std::unique_ptr<EmbeddingMatrix>> memory_;
  int fit_count_ = 0;
};

// Methods: gf, lap, hope, node2vec. Hyperparameter values arrive as decimal
// strings; method defaults fill anything absent.
EmbeddingMatrix fit_embedding(const Graph& g, const std::string& method, int dim,
                              const std::map<std::string, std::string>& hyperparams,
                              std::uint64_t seed);

}  // namespace embens
