#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "evcore/losses.hpp"

namespace evcore {

struct LabeledDataset {
  std::vector<std::vector<double>> inputs;
  std::vector<OneHotLabel> labels;
  std::size_t class_count = 0;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return inputs.size(); }
  std::size_t dim() const noexcept { return inputs.empty() ? 0 : inputs.front().size(); }

  // Throws on N == 0, ragged or non-finite inputs, or labels not matching K.
  void validate() const;
};

// Class centers used by gaussian_blobs. dim >= K: separation/sqrt(2) times the
// first K basis vectors (pairwise distance = separation). 2 <= dim < K: a circle
// in the first two coordinates with neighbouring centers `separation` apart.
// dim == 1: k * separation on the line.
std::vector<std::vector<double>> blob_centers(std::size_t class_count, double separation,
                                              std::size_t dim);

// n_per_class isotropic N(center, spread^2 I) points per class, class-major order.
LabeledDataset gaussian_blobs(std::size_t class_count, std::size_t n_per_class, double spread,
                              double separation, std::size_t dim, std::uint64_t seed);

// Four unit basis vectors in R^4, point i labelled class i.
LabeledDataset four_point_toy(std::uint64_t seed);

// Translates every input by shift_magnitude along one random unit direction and
// adds fresh N(0, noise_std^2) noise. Labels are kept.
LabeledDataset ood_shift(const LabeledDataset& base, double shift_magnitude, std::uint64_t seed,
                         double noise_std = 0.0);

// Replaces each label, with probability `rate`, by a uniformly drawn different class.
LabeledDataset with_label_noise(const LabeledDataset& base, double rate, std::uint64_t seed);

// MNIST-style IDX files (images 0x00000803, labels 0x00000801). Pixels scaled
// to [0, 1]. limit == 0 loads everything.
LabeledDataset idx_load(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path, std::size_t limit);

// Header x0,...,x{d-1},label then one row per sample.
void write_dataset_csv(std::ostream& out, const LabeledDataset& data);

}  // namespace evcore
