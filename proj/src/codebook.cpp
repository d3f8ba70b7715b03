#include "evcore/codebook.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "evcore/error.hpp"
#include "evcore/serialization.hpp"
#include "evcore/uncertainty.hpp"

namespace evcore {

Codebook::Codebook(std::size_t k, std::size_t d, std::vector<double> items)
    : k_(k), d_(d), items_(std::move(items)) {
  if (k == 0 || d == 0) throw DimensionError("codebook needs K >= 1 and D >= 1");
  if (items_.size() != k * d) throw DimensionError("codebook storage does not match K x D");
  for (double v : items_) {
    if (!std::isfinite(v)) throw DomainError("non-finite codebook entry");
  }
}

std::vector<std::size_t> top_indices(std::span<const double> values, std::size_t t) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  t = std::min(t, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(t), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return values[a] > values[b] || (values[a] == values[b] && a < b);
                    });
  idx.resize(t);
  return idx;
}

std::vector<double> select_code(const EvidenceVector& evidence, const Codebook& codebook,
                                const SelectionConfig& config) {
  if (evidence.size() != codebook.size()) {
    throw DimensionError("evidence has " + std::to_string(evidence.size()) + " entries, codebook has " +
                         std::to_string(codebook.size()) + " items");
  }
  if (config.t < 1 || config.t > codebook.size()) throw DomainError("t must lie in [1, K]");
  if (!(config.vacuity_threshold >= 0.0 && config.vacuity_threshold <= 1.0)) {
    throw DomainError("vacuity threshold must lie in [0, 1]");
  }
  const DirichletParams params = dirichlet_params(evidence);
  const std::vector<double> b = beliefs(evidence, params);
  const std::size_t best = argmax(b);
  const auto max_code = codebook.code(best);
  const std::vector<double> fallback(max_code.begin(), max_code.end());

  if (vacuity(params) <= config.vacuity_threshold || config.t == 1) return fallback;

  const auto top = top_indices(b, config.t);
  double mass = 0.0;
  for (std::size_t i : top) mass += b[i];
  if (mass <= 0.0) return fallback;

  std::vector<double> out(codebook.dim(), 0.0);
  for (std::size_t i : top) {
    const double w = b[i] / mass;
    const auto c = codebook.code(i);
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += w * c[d];
  }
  return out;
}

std::vector<std::vector<double>> select_codes_batch(std::span<const EvidenceVector> evidences,
                                                    const Codebook& codebook,
                                                    const SelectionConfig& config) {
  std::vector<std::vector<double>> out;
  out.reserve(evidences.size());
  for (const auto& e : evidences) out.push_back(select_code(e, codebook, config));
  return out;
}

Codebook read_codebook_csv(std::istream& in) {
  std::vector<double> items;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t count = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const char* first = cell.data();
      while (first < cell.data() + cell.size() && *first == ' ') ++first;
      const auto res = std::from_chars(first, cell.data() + cell.size(), v);
      if (res.ec != std::errc{}) {
        throw ParseError("codebook CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      items.push_back(v);
      ++count;
    }
    if (rows == 0) cols = count;
    if (count != cols) {
      throw ParseError("codebook CSV line " + std::to_string(line_no) + " has " + std::to_string(count) +
                       " columns, expected " + std::to_string(cols));
    }
    ++rows;
  }
  return Codebook(rows, cols, std::move(items));
}

void write_codebook_csv(std::ostream& out, const Codebook& codebook) {
  for (std::size_t i = 0; i < codebook.size(); ++i) {
    const auto c = codebook.code(i);
    for (std::size_t d = 0; d < c.size(); ++d) {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof(buf), c[d]);
      if (d) out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

void save_codebook(const std::filesystem::path& path, const Codebook& codebook) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_matrix(out, Matrix{codebook.size(), codebook.dim(),
                           std::vector<double>(codebook.items().begin(), codebook.items().end())});
}

Codebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  Matrix m = read_matrix(in);
  return Codebook(m.rows, m.cols, std::move(m.values));
}

}  // namespace evcore
