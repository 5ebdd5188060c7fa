#include "embens/embedding.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace embens {

void EmbeddingMatrix::validate() const {
  if (values.rows() < 1 || values.cols() < 1)
    throw std::runtime_error("embedding `" + method_id + "` is empty");
  if (!values.allFinite())
    throw std::runtime_error("embedding `" + method_id + "` contains non-finite values");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void save_embedding(const EmbeddingMatrix& e, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write embedding: " + path);
  out << e.rows() << ' ' << e.dim() << '\n';
  for (int i = 0; i < e.rows(); ++i) {
    for (int j = 0; j < e.dim(); ++j) {
      if (j) out << ' ';
      out << format_double(e.values(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing embedding: " + path);
}

EmbeddingMatrix load_embedding(const std::string& path, int expected_n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding: " + path);
  int n = 0, d = 0;
  if (!(in >> n >> d) || n < 1 || d < 1)
    throw std::runtime_error("bad embedding header in " + path);
  if (expected_n >= 0 && n != expected_n)
    throw std::runtime_error("embedding " + path + " has " + std::to_string(n) +
                             " rows, expected " + std::to_string(expected_n));
  EmbeddingMatrix e;
  e.values.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) {
      double v;
      if (!(in >> v))
        throw std::runtime_error("row count mismatch in " + path + " (stopped at row " +
                                 std::to_string(i) + ")");
      if (!std::isfinite(v))
        throw std::runtime_error("non-finite value at row " + std::to_string(i) + " of " + path);
      e.values(i, j) = v;
    }
  e.method_id = "external:" + std::filesystem::path(path).filename().string();
  return e;
}

}  // namespace embens
