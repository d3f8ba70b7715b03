#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "evcore/evidential_head.hpp"

namespace evcore {

// K code items of dimension D, stored row-major.
class Codebook {
 public:
  Codebook(std::size_t k, std::size_t d, std::vector<double> items);

  std::size_t size() const noexcept { return k_; }
  std::size_t dim() const noexcept { return d_; }
  std::span<const double> code(std::size_t i) const { return {items_.data() + i * d_, d_}; }
  std::span<const double> items() const noexcept { return items_; }

  friend bool operator==(const Codebook&, const Codebook&) = default;

 private:
  std::size_t k_;
  std::size_t d_;
  std::vector<double> items_;
};

struct SelectionConfig {
  std::size_t t = 1;
  double vacuity_threshold = 0.0;
};

// Uncertainty-guided Top-t selection: vacuity <= threshold returns the
// max-belief code, otherwise the belief-weighted mean of the t highest-belief
// codes. Ties go to the lower index; zero total top-t belief falls back to the
// max-belief code.
std::vector<double> select_code(const EvidenceVector& evidence, const Codebook& codebook,
                                const SelectionConfig& config);

std::vector<std::vector<double>> select_codes_batch(std::span<const EvidenceVector> evidences,
                                                    const Codebook& codebook,
                                                    const SelectionConfig& config);

// Indices of the t largest values, descending, ties by ascending index.
std::vector<std::size_t> top_indices(std::span<const double> values, std::size_t t);

// CSV: K rows of D comma-separated values, no header.
Codebook read_codebook_csv(std::istream& in);
void write_codebook_csv(std::ostream& out, const Codebook& codebook);

// Binary, same container as network checkpoints (matrix block).
void save_codebook(const std::filesystem::path& path, const Codebook& codebook);
Codebook load_codebook(const std::filesystem::path& path);

}  // namespace evcore
