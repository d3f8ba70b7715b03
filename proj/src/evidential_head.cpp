#include "evcore/evidential_head.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "evcore/error.hpp"

namespace evcore {

std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::SoftPlus: return "softplus";
    case ActivationKind::Exp: return "exp";
    case ActivationKind::SELU: return "selu";
  }
  return "?";
}

ActivationKind parse_activation(std::string_view name) {
  if (name == "relu") return ActivationKind::ReLU;
  if (name == "softplus") return ActivationKind::SoftPlus;
  if (name == "exp") return ActivationKind::Exp;
  if (name == "selu") return ActivationKind::SELU;
  throw DomainError("unknown activation '" + std::string(name) + "'");
}

LogitVector::LogitVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw DimensionError("logit vector needs at least 2 classes");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw DomainError("non-finite logit at index " + std::to_string(k));
    }
  }
}

EvidenceVector::EvidenceVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DimensionError("evidence vector is empty");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k]) || values_[k] < 0.0) {
      throw DomainError("evidence must be finite and non-negative at index " +
                        std::to_string(k));
    }
  }
}

double EvidenceVector::total() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

DirichletParams::DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty()) throw DimensionError("Dirichlet parameters are empty");
  strength_ = 0.0;
  for (std::size_t k = 0; k < alpha_.size(); ++k) {
    if (!std::isfinite(alpha_[k]) || alpha_[k] < 1.0) {
      throw DomainError("Dirichlet alpha must be >= 1 at index " + std::to_string(k));
    }
    strength_ += alpha_[k];
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double z = std::exp(x);
  return z / (1.0 + z);
}

double activate(ActivationKind kind, double logit) {
  switch (kind) {
    case ActivationKind::ReLU:
      return logit > 0.0 ? logit : 0.0;
    case ActivationKind::SoftPlus:
      return logit > 0.0 ? logit + std::log1p(std::exp(-logit)) : std::log1p(std::exp(logit));
    case ActivationKind::Exp:
      if (logit > kMaxExpLogit) {
        throw OverflowError("exp evidence overflow: logit " + std::to_string(logit) +
                                " exceeds " + std::to_string(kMaxExpLogit),
                            0);
      }
      return std::exp(logit);
    case ActivationKind::SELU:
      return logit > 0.0 ? logit + 1.0 : std::exp(logit);
  }
  return 0.0;
}

EvidenceVector activate(ActivationKind kind, const LogitVector& logits) {
  std::vector<double> evidence(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    if (kind == ActivationKind::Exp && logits[k] > kMaxExpLogit) {
      throw OverflowError("exp evidence overflow at index " + std::to_string(k) + ": logit " +
                              std::to_string(logits[k]),
                          k);
    }
    evidence[k] = activate(kind, logits[k]);
  }
  return EvidenceVector(std::move(evidence));
}

double activation_derivative(ActivationKind kind, double logit) {
  switch (kind) {
    case ActivationKind::ReLU: return logit > 0.0 ? 1.0 : 0.0;
    case ActivationKind::SoftPlus: return sigmoid(logit);
    case ActivationKind::Exp: return std::exp(logit);
    case ActivationKind::SELU: return logit > 0.0 ? 1.0 : std::exp(logit);
  }
  return 0.0;
}

double inverse_activation(ActivationKind kind, double evidence) {
  if (kind == ActivationKind::ReLU) {
    throw UnsupportedActivationError("ReLU evidence cannot be inverted to a logit");
  }
  if (!(evidence > 0.0)) {
    throw InfiniteRegularizerError("evidence " + std::to_string(evidence) + " maps to logit -inf under " +
                                   std::string(to_string(kind)));
  }
  switch (kind) {
    case ActivationKind::SoftPlus:
      // ln(exp(e) - 1), written to stay finite for large e.
      return evidence > 30.0 ? evidence + std::log1p(-std::exp(-evidence))
                             : std::log(std::expm1(evidence));
    case ActivationKind::Exp:
      return std::log(evidence);
    case ActivationKind::SELU:
      return evidence > 1.0 ? evidence - 1.0 : std::log(evidence);
    case ActivationKind::ReLU:
      break;
  }
  return 0.0;
}

DirichletParams dirichlet_params(const EvidenceVector& evidence) {
  std::vector<double> alpha(evidence.size());
  std::transform(evidence.values().begin(), evidence.values().end(), alpha.begin(),
                 [](double e) { return e + 1.0; });
  return DirichletParams(std::move(alpha));
}

}  // namespace evcore
