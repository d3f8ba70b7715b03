#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "evcore/network.hpp"

namespace evcore {

// Binary checkpoint layout (all integers little-endian, doubles as IEEE-754
// binary64 little-endian):
//
//   char[8]  magic      "EVCORENN" (network) or "EVCOREMX" (single matrix)
//   u32      version    1
//   network: u32 layer_count L, u32 dims[L + 1], u8 nonlinearity[L]
//            (0 tanh, 1 relu, 2 identity), then per layer
//            f64 weights[out * in] row-major, f64 biases[out]
//   matrix:  u32 rows, u32 cols, f64 values[rows * cols] row-major
void write_network(std::ostream& out, const DenseNet& net);
DenseNet read_network(std::istream& in);
void save_network(const std::filesystem::path& path, const DenseNet& net);
DenseNet load_network(const std::filesystem::path& path);

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

}  // namespace evcore
