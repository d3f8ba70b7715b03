#include "evcore/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <string>

#include "evcore/error.hpp"
#include "evcore/rng.hpp"
#include "evcore/table.hpp"

namespace evcore {
namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be_u32(const std::vector<unsigned char>& buf, std::size_t offset,
                     const std::filesystem::path& path) {
  if (offset + 4 > buf.size()) {
    throw ParseError(path.string() + ": truncated header at byte offset " + std::to_string(offset));
  }
  return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
         (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

}  // namespace

void LabeledDataset::validate() const {
  if (inputs.empty()) throw DomainError("dataset is empty");
  if (labels.size() != inputs.size()) throw DimensionError("inputs and labels differ in length");
  const std::size_t d = inputs.front().size();
  if (d == 0) throw DimensionError("dataset inputs have zero features");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != d) throw DimensionError("ragged input at row " + std::to_string(i));
    for (double v : inputs[i]) {
      if (!std::isfinite(v)) throw DomainError("non-finite input at row " + std::to_string(i));
    }
    if (labels[i].class_count() != class_count) {
      throw DimensionError("label at row " + std::to_string(i) + " has the wrong class count");
    }
  }
}

std::vector<std::vector<double>> blob_centers(std::size_t class_count, double separation,
                                              std::size_t dim) {
  if (class_count < 2) throw DomainError("need at least 2 classes");
  if (dim == 0) throw DomainError("dim must be positive");
  std::vector<std::vector<double>> centers(class_count, std::vector<double>(dim, 0.0));
  if (dim >= class_count) {
    const double scale = separation / std::numbers::sqrt2;
    for (std::size_t k = 0; k < class_count; ++k) centers[k][k] = scale;
  } else if (dim >= 2) {
    const double step = 2.0 * std::numbers::pi / static_cast<double>(class_count);
    const double radius = separation / (2.0 * std::sin(step / 2.0));
    for (std::size_t k = 0; k < class_count; ++k) {
      centers[k][0] = radius * std::cos(step * static_cast<double>(k));
      centers[k][1] = radius * std::sin(step * static_cast<double>(k));
    }
  } else {
    for (std::size_t k = 0; k < class_count; ++k) centers[k][0] = separation * static_cast<double>(k);
  }
  return centers;
}

LabeledDataset gaussian_blobs(std::size_t class_count, std::size_t n_per_class, double spread,
                              double separation, std::size_t dim, std::uint64_t seed) {
  if (n_per_class == 0) throw DomainError("n_per_class must be positive");
  if (!(spread > 0.0) || !std::isfinite(spread)) throw DomainError("spread must be positive");
  if (!std::isfinite(separation) || separation < 0.0) throw DomainError("separation must be >= 0");
  const auto centers = blob_centers(class_count, separation, dim);

  Rng rng(seed);
  LabeledDataset data;
  data.class_count = class_count;
  data.seed = seed;
  data.inputs.reserve(class_count * n_per_class);
  data.labels.reserve(class_count * n_per_class);
  for (std::size_t k = 0; k < class_count; ++k) {
    for (std::size_t i = 0; i < n_per_class; ++i) {
      std::vector<double> x(dim);
      for (std::size_t d = 0; d < dim; ++d) x[d] = centers[k][d] + spread * rng.normal();
      data.inputs.push_back(std::move(x));
      data.labels.emplace_back(k, class_count);
    }
  }
  return data;
}

LabeledDataset four_point_toy(std::uint64_t seed) {
  LabeledDataset data;
  data.class_count = 4;
  data.seed = seed;
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> x(4, 0.0);
    x[i] = 1.0;
    data.inputs.push_back(std::move(x));
    data.labels.emplace_back(i, 4);
  }
  return data;
}

LabeledDataset ood_shift(const LabeledDataset& base, double shift_magnitude, std::uint64_t seed,
                         double noise_std) {
  base.validate();
  if (!(shift_magnitude > 0.0) || !std::isfinite(shift_magnitude)) {
    throw DomainError("shift magnitude must be positive");
  }
  if (!(noise_std >= 0.0)) throw DomainError("noise_std must be non-negative");
  Rng rng(seed);
  const std::size_t dim = base.dim();
  std::vector<double> direction(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& v : direction) {
      v = rng.normal();
      norm += v * v;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& v : direction) v /= norm;

  LabeledDataset out = base;
  out.seed = seed;
  for (auto& x : out.inputs) {
    for (std::size_t d = 0; d < dim; ++d) {
      x[d] += shift_magnitude * direction[d];
      if (noise_std > 0.0) x[d] += noise_std * rng.normal();
    }
  }
  return out;
}

LabeledDataset with_label_noise(const LabeledDataset& base, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw DomainError("noise rate must lie in [0, 1]");
  LabeledDataset out = base;
  Rng rng(seed);
  const std::size_t k = base.class_count;
  for (auto& label : out.labels) {
    if (rng.uniform() >= rate) continue;
    // Draw from the K - 1 other classes.
    std::size_t other = static_cast<std::size_t>(rng.below(k - 1));
    if (other >= label.gt_index()) ++other;
    label = OneHotLabel(other, k);
  }
  return out;
}

LabeledDataset idx_load(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path, std::size_t limit) {
  const auto images = read_file(images_path);
  const auto labels = read_file(labels_path);

  if (be_u32(images, 0, images_path) != 0x00000803) {
    throw ParseError(images_path.string() + ": bad IDX image magic at byte offset 0");
  }
  if (be_u32(labels, 0, labels_path) != 0x00000801) {
    throw ParseError(labels_path.string() + ": bad IDX label magic at byte offset 0");
  }
  const std::size_t n_images = be_u32(images, 4, images_path);
  const std::size_t rows = be_u32(images, 8, images_path);
  const std::size_t cols = be_u32(images, 12, images_path);
  const std::size_t n_labels = be_u32(labels, 4, labels_path);
  if (n_images != n_labels) {
    throw ParseError("IDX count mismatch: " + std::to_string(n_images) + " images vs " +
                     std::to_string(n_labels) + " labels (byte offset 4)");
  }
  const std::size_t pixels = rows * cols;
  if (pixels == 0) throw ParseError(images_path.string() + ": zero-sized images at byte offset 8");
  const std::size_t n = limit == 0 ? n_images : std::min(limit, n_images);
  if (images.size() < 16 + n * pixels) {
    throw ParseError(images_path.string() + ": truncated pixel data at byte offset " +
                     std::to_string(images.size()));
  }
  if (labels.size() < 8 + n) {
    throw ParseError(labels_path.string() + ": truncated label data at byte offset " +
                     std::to_string(labels.size()));
  }

  std::size_t max_label = 1;
  for (std::size_t i = 0; i < n; ++i) max_label = std::max<std::size_t>(max_label, labels[8 + i]);

  LabeledDataset data;
  data.class_count = max_label + 1;
  data.inputs.reserve(n);
  data.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(pixels);
    const unsigned char* src = images.data() + 16 + i * pixels;
    for (std::size_t p = 0; p < pixels; ++p) x[p] = static_cast<double>(src[p]) / 255.0;
    data.inputs.push_back(std::move(x));
    data.labels.emplace_back(labels[8 + i], data.class_count);
  }
  return data;
}

void write_dataset_csv(std::ostream& out, const LabeledDataset& data) {
  const std::size_t d = data.dim();
  std::vector<std::string> header;
  for (std::size_t j = 0; j < d; ++j) header.push_back("x" + std::to_string(j));
  header.emplace_back("label");
  CsvWriter csv(out, header);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.inputs[i]) csv.field(v);
    csv.field(data.labels[i].gt_index());
    csv.end_row();
  }
}

}  // namespace evcore
