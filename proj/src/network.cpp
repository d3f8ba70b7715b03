#include "evcore/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evcore/error.hpp"
#include "evcore/rng.hpp"

namespace evcore {
namespace {

double apply(Nonlinearity n, double z) {
  switch (n) {
    case Nonlinearity::Tanh: return std::tanh(z);
    case Nonlinearity::ReLU: return z > 0.0 ? z : 0.0;
    case Nonlinearity::Identity: return z;
  }
  return z;
}

// Derivative expressed through the pre-activation z and output a = f(z).
double derivative(Nonlinearity n, double z, double a) {
  switch (n) {
    case Nonlinearity::Tanh: return 1.0 - a * a;
    case Nonlinearity::ReLU: return z > 0.0 ? 1.0 : 0.0;
    case Nonlinearity::Identity: return 1.0;
  }
  return 1.0;
}

struct Trace {
  std::vector<std::vector<double>> pre;   // z per layer
  std::vector<std::vector<double>> post;  // post[0] = input, post[l + 1] = f(z_l)
};

Trace run_forward(const DenseNet& net, std::span<const double> input) {
  if (input.size() != net.input_dim()) {
    throw DimensionError("input has " + std::to_string(input.size()) + " features, network expects " +
                         std::to_string(net.input_dim()));
  }
  Trace trace;
  trace.post.emplace_back(input.begin(), input.end());
  for (const DenseLayer& layer : net.layers()) {
    const std::vector<double>& x = trace.post.back();
    std::vector<double> z(layer.out);
    std::vector<double> a(layer.out);
    for (std::size_t r = 0; r < layer.out; ++r) {
      double acc = layer.biases[r];
      const double* row = layer.weights.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) acc += row[c] * x[c];
      z[r] = acc;
      a[r] = apply(layer.nonlinearity, acc);
    }
    trace.pre.push_back(std::move(z));
    trace.post.push_back(std::move(a));
  }
  return trace;
}

}  // namespace

std::string_view to_string(Nonlinearity n) {
  switch (n) {
    case Nonlinearity::Tanh: return "tanh";
    case Nonlinearity::ReLU: return "relu";
    case Nonlinearity::Identity: return "identity";
  }
  return "?";
}

Nonlinearity parse_nonlinearity(std::string_view name) {
  if (name == "tanh") return Nonlinearity::Tanh;
  if (name == "relu") return Nonlinearity::ReLU;
  if (name == "identity") return Nonlinearity::Identity;
  throw DomainError("unknown nonlinearity '" + std::string(name) + "'");
}

ParamGradient& ParamGradient::operator+=(const ParamGradient& other) {
  if (other.layers.size() != layers.size()) throw DimensionError("gradient shapes differ");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& w = layers[l].weights;
    auto& b = layers[l].biases;
    const auto& ow = other.layers[l].weights;
    const auto& ob = other.layers[l].biases;
    if (w.size() != ow.size() || b.size() != ob.size()) throw DimensionError("gradient shapes differ");
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += ow[i];
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += ob[i];
  }
  return *this;
}

ParamGradient& ParamGradient::operator*=(double scale) {
  for (auto& layer : layers) {
    for (double& v : layer.weights) v *= scale;
    for (double& v : layer.biases) v *= scale;
  }
  return *this;
}

double ParamGradient::max_abs() const {
  double m = 0.0;
  for (const auto& layer : layers) {
    for (double v : layer.weights) m = std::max(m, std::abs(v));
    for (double v : layer.biases) m = std::max(m, std::abs(v));
  }
  return m;
}

std::size_t ParamGradient::size() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weights.size() + layer.biases.size();
  return n;
}

std::vector<double> ParamGradient::flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  for (const auto& layer : layers) {
    flat.insert(flat.end(), layer.weights.begin(), layer.weights.end());
    flat.insert(flat.end(), layer.biases.begin(), layer.biases.end());
  }
  return flat;
}

DenseNet::DenseNet(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw DimensionError("network needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    if (layer.in == 0 || layer.out == 0) throw DimensionError("layer dimensions must be positive");
    if (layer.weights.size() != layer.in * layer.out || layer.biases.size() != layer.out) {
      throw DimensionError("layer " + std::to_string(l) + " parameter block has the wrong shape");
    }
    if (l > 0 && layers_[l - 1].out != layer.in) {
      throw DimensionError("layer " + std::to_string(l) + " input does not chain with previous output");
    }
    for (double v : layer.weights) {
      if (!std::isfinite(v)) throw DomainError("non-finite weight in layer " + std::to_string(l));
    }
    for (double v : layer.biases) {
      if (!std::isfinite(v)) throw DomainError("non-finite bias in layer " + std::to_string(l));
    }
  }
}

std::size_t DenseNet::input_dim() const { return layers_.empty() ? 0 : layers_.front().in; }
std::size_t DenseNet::output_dim() const { return layers_.empty() ? 0 : layers_.back().out; }

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weights.size() + layer.biases.size();
  return n;
}

double& DenseNet::parameter(std::size_t flat_index) {
  for (auto& layer : layers_) {
    if (flat_index < layer.weights.size()) return layer.weights[flat_index];
    flat_index -= layer.weights.size();
    if (flat_index < layer.biases.size()) return layer.biases[flat_index];
    flat_index -= layer.biases.size();
  }
  throw DimensionError("parameter index out of range");
}

double DenseNet::parameter(std::size_t flat_index) const {
  return const_cast<DenseNet&>(*this).parameter(flat_index);
}

ParamGradient DenseNet::zero_gradient() const {
  ParamGradient g;
  g.layers.reserve(layers_.size());
  for (const auto& layer : layers_) {
    g.layers.push_back({std::vector<double>(layer.weights.size(), 0.0),
                        std::vector<double>(layer.biases.size(), 0.0)});
  }
  return g;
}

void DenseNet::apply_update(const ParamGradient& step, double scale) {
  if (step.layers.size() != layers_.size()) throw DimensionError("update shape mismatch");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    auto& layer = layers_[l];
    const auto& s = step.layers[l];
    if (s.weights.size() != layer.weights.size() || s.biases.size() != layer.biases.size()) {
      throw DimensionError("update shape mismatch");
    }
    for (std::size_t i = 0; i < layer.weights.size(); ++i) layer.weights[i] += scale * s.weights[i];
    for (std::size_t i = 0; i < layer.biases.size(); ++i) layer.biases[i] += scale * s.biases[i];
  }
}

DenseNet init(std::span<const std::size_t> layer_dims, Nonlinearity hidden, const InitSpec& spec) {
  if (layer_dims.size() < 2) throw DimensionError("need at least input and output dimensions");
  for (std::size_t d : layer_dims) {
    if (d == 0) throw DimensionError("layer dimensions must be positive");
  }
  const std::size_t n_layers = layer_dims.size() - 1;
  const auto* explicit_init = std::get_if<ExplicitInit>(&spec.scheme);
  if (explicit_init && explicit_init->layers.size() != n_layers) {
    throw DimensionError("explicit init has " + std::to_string(explicit_init->layers.size()) +
                         " layers, expected " + std::to_string(n_layers));
  }

  Rng rng(spec.seed);
  std::vector<DenseLayer> layers;
  layers.reserve(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    DenseLayer layer;
    layer.in = layer_dims[l];
    layer.out = layer_dims[l + 1];
    layer.nonlinearity = l + 1 == n_layers ? Nonlinearity::Identity : hidden;
    if (std::holds_alternative<UniformScaled>(spec.scheme)) {
      const double s = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
      layer.weights.resize(layer.in * layer.out);
      for (double& w : layer.weights) w = rng.uniform(-s, s);
      layer.biases.assign(layer.out, 0.0);
    } else if (const auto* c = std::get_if<ConstantInit>(&spec.scheme)) {
      layer.weights.assign(layer.in * layer.out, c->value);
      layer.biases.assign(layer.out, c->value);
    } else {
      const DenseLayer& src = explicit_init->layers[l];
      if (src.weights.size() != layer.in * layer.out || src.biases.size() != layer.out) {
        throw DimensionError("explicit init layer " + std::to_string(l) + " has the wrong shape");
      }
      layer.weights = src.weights;
      layer.biases = src.biases;
    }
    layers.push_back(std::move(layer));
  }
  return DenseNet(std::move(layers));
}

std::vector<double> forward_outputs(const DenseNet& net, std::span<const double> input) {
  return std::move(run_forward(net, input).post.back());
}

LogitVector forward(const DenseNet& net, std::span<const double> input) {
  return LogitVector(forward_outputs(net, input));
}

BackwardResult backward(const DenseNet& net, std::span<const double> input,
                        const OneHotLabel& label, const Objective& objective) {
  Trace trace = run_forward(net, input);
  const LogitVector logits(trace.post.back());
  LossWithGrad head = combined_loss_with_grad(objective.loss, objective.reg, objective.activation,
                                              logits, label, objective.epoch);

  BackwardResult result;
  result.loss = head.loss;
  result.logits = trace.post.back();
  result.grad = net.zero_gradient();

  // delta holds dL/dz for the current layer.
  std::vector<double> delta = std::move(head.grad);
  const auto layers = net.layers();
  for (std::size_t l = layers.size(); l-- > 0;) {
    const DenseLayer& layer = layers[l];
    const std::vector<double>& x = trace.post[l];
    LayerGradient& g = result.grad.layers[l];
    for (std::size_t r = 0; r < layer.out; ++r) {
      g.biases[r] = delta[r];
      double* row = g.weights.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) row[c] = delta[r] * x[c];
    }
    std::vector<double> prev(layer.in, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      if (delta[r] == 0.0) continue;
      const double* row = layer.weights.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) prev[c] += row[c] * delta[r];
    }
    if (l > 0) {
      const DenseLayer& below = layers[l - 1];
      for (std::size_t c = 0; c < layer.in; ++c) {
        prev[c] *= derivative(below.nonlinearity, trace.pre[l - 1][c], trace.post[l][c]);
      }
    }
    delta = std::move(prev);
  }
  result.input_grad = std::move(delta);
  return result;
}

double sample_loss(const DenseNet& net, std::span<const double> input, const OneHotLabel& label,
                   const Objective& objective) {
  return combined_loss(objective.loss, objective.reg, objective.activation, forward(net, input), label,
                       objective.epoch);
}

ParamGradient finite_diff_grad(const DenseNet& net, std::span<const double> input,
                               const OneHotLabel& label, const Objective& objective, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  DenseNet probe = net;
  std::vector<double> flat(net.parameter_count());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    double& p = probe.parameter(i);
    const double saved = p;
    p = saved + h;
    const double up = sample_loss(probe, input, label, objective);
    p = saved - h;
    const double down = sample_loss(probe, input, label, objective);
    p = saved;
    flat[i] = (up - down) / (2.0 * h);
  }
  ParamGradient g = net.zero_gradient();
  std::size_t i = 0;
  for (auto& layer : g.layers) {
    for (double& v : layer.weights) v = flat[i++];
    for (double& v : layer.biases) v = flat[i++];
  }
  return g;
}

double per_sample_grad_norm(const DenseNet& net, std::span<const double> input,
                            const OneHotLabel& label, const Objective& objective) {
  return backward(net, input, label, objective).grad.max_abs();
}

double scaled_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
  return std::abs(analytic - numeric) / scale;
}

}  // namespace evcore
