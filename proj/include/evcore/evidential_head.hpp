#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace evcore {

enum class ActivationKind { ReLU, SoftPlus, Exp, SELU };

std::string_view to_string(ActivationKind kind);
ActivationKind parse_activation(std::string_view name);

// Largest logit accepted by the Exp activation before raising OverflowError.
inline constexpr double kMaxExpLogit = 700.0;

// Raw network outputs before the evidential activation. K >= 2, all finite.
class LogitVector {
 public:
  explicit LogitVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

// Non-negative, finite per-class evidence.
class EvidenceVector {
 public:
  explicit EvidenceVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  std::span<const double> values() const noexcept { return values_; }
  double total() const noexcept;

 private:
  std::vector<double> values_;
};

// alpha = e + 1 and the Dirichlet strength S = sum(alpha).
class DirichletParams {
 public:
  // Validates alpha_k >= 1; computes S.
  explicit DirichletParams(std::vector<double> alpha);

  std::size_t size() const noexcept { return alpha_.size(); }
  double operator[](std::size_t k) const { return alpha_[k]; }
  std::span<const double> alpha() const noexcept { return alpha_; }
  double strength() const noexcept { return strength_; }

 private:
  std::vector<double> alpha_;
  double strength_;
};

// Scalar evidential activation. Exp throws OverflowError above kMaxExpLogit
// (index 0; the vector overload reports the real index).
double activate(ActivationKind kind, double logit);

EvidenceVector activate(ActivationKind kind, const LogitVector& logits);

// de/do. ReLU uses 0 at the kink.
double activation_derivative(ActivationKind kind, double logit);

// Inverse of the activation on its range. ReLU is not invertible and throws
// UnsupportedActivationError; evidence <= 0 throws InfiniteRegularizerError.
double inverse_activation(ActivationKind kind, double evidence);

DirichletParams dirichlet_params(const EvidenceVector& evidence);

double sigmoid(double x);

}  // namespace evcore
