#include "evcore/serialization.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "evcore/error.hpp"

namespace evcore {
namespace {

constexpr std::array<char, 8> kNetMagic = {'E', 'V', 'C', 'O', 'R', 'E', 'N', 'N'};
constexpr std::array<char, 8> kMatrixMagic = {'E', 'V', 'C', 'O', 'R', 'E', 'M', 'X'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 4);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw ParseError("checkpoint truncated at byte offset " + std::to_string(offset_));
    }
    offset_ += n;
  }

  std::uint32_t u32() {
    unsigned char b[4];
    bytes(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  std::uint8_t u8() {
    char c;
    bytes(&c, 1);
    return static_cast<std::uint8_t>(c);
  }

  double f64() {
    unsigned char b[8];
    bytes(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return std::bit_cast<double>(v);
  }

  void expect_header(const std::array<char, 8>& magic) {
    std::array<char, 8> got{};
    bytes(got.data(), got.size());
    if (got != magic) throw ParseError("bad checkpoint magic at byte offset 0");
    const std::uint32_t version = u32();
    if (version != kVersion) {
      throw ParseError("unsupported checkpoint version " + std::to_string(version));
    }
  }

  std::size_t offset() const { return offset_; }

 private:
  std::istream& in_;
  std::size_t offset_ = 0;
};

std::uint32_t checked_u32(std::size_t v) {
  if (v > UINT32_MAX) throw DimensionError("dimension too large for checkpoint format");
  return static_cast<std::uint32_t>(v);
}

std::uint8_t nonlinearity_code(Nonlinearity n) {
  switch (n) {
    case Nonlinearity::Tanh: return 0;
    case Nonlinearity::ReLU: return 1;
    case Nonlinearity::Identity: return 2;
  }
  return 2;
}

}  // namespace

void write_network(std::ostream& out, const DenseNet& net) {
  const auto layers = net.layers();
  out.write(kNetMagic.data(), kNetMagic.size());
  put_u32(out, kVersion);
  put_u32(out, checked_u32(layers.size()));
  put_u32(out, checked_u32(net.input_dim()));
  for (const auto& layer : layers) put_u32(out, checked_u32(layer.out));
  for (const auto& layer : layers) {
    const char code = static_cast<char>(nonlinearity_code(layer.nonlinearity));
    out.write(&code, 1);
  }
  for (const auto& layer : layers) {
    for (double w : layer.weights) put_f64(out, w);
    for (double b : layer.biases) put_f64(out, b);
  }
  if (!out) throw Error("failed to write network checkpoint");
}

DenseNet read_network(std::istream& in) {
  Reader r(in);
  r.expect_header(kNetMagic);
  const std::uint32_t n_layers = r.u32();
  if (n_layers == 0 || n_layers > 1024) {
    throw ParseError("implausible layer count " + std::to_string(n_layers));
  }
  std::vector<std::size_t> dims(n_layers + 1);
  for (auto& d : dims) {
    d = r.u32();
    if (d == 0) throw ParseError("zero dimension at byte offset " + std::to_string(r.offset() - 4));
  }
  std::vector<DenseLayer> layers(n_layers);
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    const std::uint8_t code = r.u8();
    if (code > 2) {
      throw ParseError("bad nonlinearity code at byte offset " + std::to_string(r.offset() - 1));
    }
    layers[l].nonlinearity = code == 0   ? Nonlinearity::Tanh
                             : code == 1 ? Nonlinearity::ReLU
                                         : Nonlinearity::Identity;
    layers[l].in = dims[l];
    layers[l].out = dims[l + 1];
  }
  for (auto& layer : layers) {
    layer.weights.resize(layer.in * layer.out);
    layer.biases.resize(layer.out);
    for (double& w : layer.weights) w = r.f64();
    for (double& b : layer.biases) b = r.f64();
  }
  return DenseNet(std::move(layers));
}

void save_network(const std::filesystem::path& path, const DenseNet& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_network(out, net);
}

DenseNet load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_network(in);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  if (m.values.size() != m.rows * m.cols) throw DimensionError("matrix storage does not match shape");
  out.write(kMatrixMagic.data(), kMatrixMagic.size());
  put_u32(out, kVersion);
  put_u32(out, checked_u32(m.rows));
  put_u32(out, checked_u32(m.cols));
  for (double v : m.values) put_f64(out, v);
  if (!out) throw Error("failed to write matrix");
}

Matrix read_matrix(std::istream& in) {
  Reader r(in);
  r.expect_header(kMatrixMagic);
  Matrix m;
  m.rows = r.u32();
  m.cols = r.u32();
  m.values.resize(m.rows * m.cols);
  for (double& v : m.values) v = r.f64();
  return m;
}

}  // namespace evcore
