#include "embens/labels.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace embens {

int LabelMatrix::label_count(int node) const {
  int c = 0;
  for (int k = 0; k < l_; ++k) c += flat_[idx(node, k)];
  return c;
}

int LabelMatrix::support(int cls) const {
  int c = 0;
  for (int v = 0; v < n_; ++v) c += flat_[idx(v, cls)];
  return c;
}

bool LabelMatrix::fully_labeled() const {
  for (int v = 0; v < n_; ++v)
    if (label_count(v) == 0) return false;
  return true;
}

LabelMatrix load_labels(const std::string& path,
                        const std::unordered_map<std::string, int>& node_map,
                        int node_count, bool allow_unlabeled) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label file: " + path);

  std::vector<std::string> class_names;
  std::unordered_map<std::string, int> class_index;
  std::vector<std::pair<int, int>> assignments;  // (node, class)

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string node_id;
    if (!(ss >> node_id)) continue;
    if (node_id[0] == '#') continue;
    auto it = node_map.find(node_id);
    if (it == node_map.end())
      throw std::runtime_error("label file line " + std::to_string(line_no) +
                               ": node id `" + node_id + "` not present in the graph");
    std::string lab;
    bool any = false;
    while (ss >> lab) {
      any = true;
      auto [cit, inserted] = class_index.emplace(lab, static_cast<int>(class_names.size()));
      if (inserted) class_names.push_back(lab);
      assignments.emplace_back(it->second, cit->second);
    }
    if (!any)
      throw std::runtime_error("label file line " + std::to_string(line_no) +
                               ": node `" + node_id + "` has no labels");
  }
  if (class_names.empty()) throw std::runtime_error("label file is empty: " + path);

  LabelMatrix m(node_count, static_cast<int>(class_names.size()));
  m.class_names = class_names;
  for (auto [v, c] : assignments) m.set(v, c);
  if (!allow_unlabeled && !m.fully_labeled())
    throw std::runtime_error(
        "label file leaves some nodes unlabeled; pass allow_unlabeled for "
        "partially labeled datasets");
  return m;
}

void write_labels(const LabelMatrix& labels, const std::string& path,
                  const std::vector<std::string>* node_names) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write label file: " + path);
  for (int v = 0; v < labels.node_count(); ++v) {
    if (labels.label_count(v) == 0) continue;
    if (node_names) {
      out << (*node_names)[v];
    } else {
      out << v;
    }
    for (int c = 0; c < labels.class_count(); ++c) {
      if (!labels.get(v, c)) continue;
      if (!labels.class_names.empty()) {
        out << ' ' << labels.class_names[c];
      } else {
        out << ' ' << c;
      }
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing label file: " + path);
}

LabelMatrix restrict_labels(const LabelMatrix& labels, std::span<const int> new_to_old) {
  const int n = static_cast<int>(new_to_old.size());
  const int l = labels.class_count();
  std::vector<int> new_support(l, 0);
  for (int v = 0; v < n; ++v)
    for (int c = 0; c < l; ++c)
      if (labels.get(new_to_old[v], c)) ++new_support[c];

  std::vector<int> remap(l, -1);
  int kept = 0;
  for (int c = 0; c < l; ++c)
    if (new_support[c] > 0) remap[c] = kept++;

  LabelMatrix out(n, kept);
  if (!labels.class_names.empty()) {
    out.class_names.resize(kept);
    for (int c = 0; c < l; ++c)
      if (remap[c] >= 0) out.class_names[remap[c]] = labels.class_names[c];
  }
  for (int v = 0; v < n; ++v)
    for (int c = 0; c < l; ++c)
      if (remap[c] >= 0 && labels.get(new_to_old[v], c)) out.set(v, remap[c]);
  return out;
}

}  // namespace embens
