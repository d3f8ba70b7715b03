#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "evcore/evidential_head.hpp"
#include "evcore/losses.hpp"

namespace evcore {

enum class Nonlinearity { Tanh, ReLU, Identity };

std::string_view to_string(Nonlinearity n);
Nonlinearity parse_nonlinearity(std::string_view name);

// Affine map y = f(W x + b) with W stored row-major (out x in).
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> biases;
  Nonlinearity nonlinearity = Nonlinearity::Identity;

  double weight(std::size_t row, std::size_t col) const { return weights[row * in + col]; }
  double& weight(std::size_t row, std::size_t col) { return weights[row * in + col]; }

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Gradient (or any parameter-shaped quantity) for one layer.
struct LayerGradient {
  std::vector<double> weights;
  std::vector<double> biases;

  friend bool operator==(const LayerGradient&, const LayerGradient&) = default;
};

struct ParamGradient {
  std::vector<LayerGradient> layers;

  ParamGradient& operator+=(const ParamGradient& other);
  ParamGradient& operator*=(double scale);

  double max_abs() const;
  std::size_t size() const;
  // Flat view in the order weights(layer 0), biases(layer 0), weights(layer 1), ...
  std::vector<double> flatten() const;

  friend bool operator==(const ParamGradient&, const ParamGradient&) = default;
};

class DenseNet {
 public:
  DenseNet() = default;
  explicit DenseNet(std::vector<DenseLayer> layers);

  std::span<const DenseLayer> layers() const noexcept { return layers_; }
  std::span<DenseLayer> layers() noexcept { return layers_; }
  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::size_t parameter_count() const;

  // Same flat order as ParamGradient::flatten.
  double& parameter(std::size_t flat_index);
  double parameter(std::size_t flat_index) const;

  ParamGradient zero_gradient() const;
  void apply_update(const ParamGradient& step, double scale);  // theta += scale * step

  friend bool operator==(const DenseNet&, const DenseNet&) = default;

 private:
  std::vector<DenseLayer> layers_;
};

struct UniformScaled {};  // U(-s, s), s = sqrt(6 / (in + out))
struct ConstantInit {
  double value = 0.0;
};
struct ExplicitInit {
  std::vector<DenseLayer> layers;  // only weights/biases are read
};

struct InitSpec {
  std::variant<UniformScaled, ConstantInit, ExplicitInit> scheme = UniformScaled{};
  std::uint64_t seed = 0;
};

// Hidden layers use `hidden`; the final layer is always Identity (logits).
DenseNet init(std::span<const std::size_t> layer_dims, Nonlinearity hidden, const InitSpec& spec);

// Raw outputs of the final layer (any width).
std::vector<double> forward_outputs(const DenseNet& net, std::span<const double> input);
LogitVector forward(const DenseNet& net, std::span<const double> input);

// Everything the combined objective needs besides the sample.
struct Objective {
  LossKind loss = LossKind::EvidLog;
  ActivationKind activation = ActivationKind::Exp;
  RegularizationConfig reg;
  int epoch = 0;
};

struct BackwardResult {
  double loss = 0.0;
  ParamGradient grad;
  std::vector<double> input_grad;
  std::vector<double> logits;
};

BackwardResult backward(const DenseNet& net, std::span<const double> input,
                        const OneHotLabel& label, const Objective& objective);

double sample_loss(const DenseNet& net, std::span<const double> input, const OneHotLabel& label,
                   const Objective& objective);

// Central differences (L(theta + h) - L(theta - h)) / 2h per parameter.
ParamGradient finite_diff_grad(const DenseNet& net, std::span<const double> input,
                               const OneHotLabel& label, const Objective& objective, double h);

// L-infinity norm of the parameter gradient for one sample.
double per_sample_grad_norm(const DenseNet& net, std::span<const double> input,
                            const OneHotLabel& label, const Objective& objective);

// |a - b| / max(|a|, |b|, 1e-3): relative error, degrading to absolute/1e-3 near zero.
double scaled_error(double analytic, double numeric);

}  // namespace evcore
