// Multi-label node assignments.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace embens {

// Binary n x L assignment; a node may carry several labels. Classes are
// densely indexed and every class has at least one positive node.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  LabelMatrix(int node_count, int class_count)
      : n_(node_count), l_(class_count), flat_(static_cast<std::size_t>(node_count) * class_count, 0) {}

  int node_count() const { return n_; }
  int class_count() const { return l_; }

  bool get(int node, int cls) const { return flat_[idx(node, cls)] != 0; }
  void set(int node, int cls, bool v = true) { flat_[idx(node, cls)] = v ? 1 : 0; }

  int label_count(int node) const;
  int support(int cls) const;
  bool fully_labeled() const;

  std::vector<std::string> class_names;  // optional, parallel to class index

 private:
  std::size_t idx(int node, int cls) const {
    return static_cast<std::size_t>(node) * l_ + cls;
  }
  int n_ = 0;
  int l_ = 0;
  std::vector<std::uint8_t> flat_;
};

// Parses `node label...` lines against the graph's id mapping. Labels are
// densely re-indexed in first-seen order. Unknown node ids are an error;
// nodes missing from the file are an error unless allow_unlabeled is set.
LabelMatrix load_labels(const std::string& path,
                        const std::unordered_map<std::string, int>& node_map,
                        int node_count, bool allow_unlabeled = false);

void write_labels(const LabelMatrix& labels, const std::string& path,
                  const std::vector<std::string>* node_names = nullptr);

// Re-aligns labels to a node subset (e.g. after WCC extraction); classes that
// lose all positives are dropped and the rest re-indexed.
LabelMatrix restrict_labels(const LabelMatrix& labels, std::span<const int> new_to_old);

}  // namespace embens
