#include "evcore/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evcore/error.hpp"
#include "evcore/special_math.hpp"

namespace evcore {
namespace {

void check_dims(const DirichletParams& params, const OneHotLabel& label) {
  if (params.size() != label.class_count()) {
    throw DimensionError("label has " + std::to_string(label.class_count()) +
                         " classes but Dirichlet has " + std::to_string(params.size()));
  }
}

// alpha~ keeps incorrect-class alphas and resets the ground truth to 1.
std::vector<double> masked_alpha(const DirichletParams& params, const OneHotLabel& label) {
  std::vector<double> alpha(params.alpha().begin(), params.alpha().end());
  alpha[label.gt_index()] = 1.0;
  return alpha;
}

}  // namespace

OneHotLabel::OneHotLabel(std::size_t gt_index, std::size_t class_count)
    : gt_(gt_index), k_(class_count) {
  if (class_count == 0) throw DimensionError("label needs at least one class");
  if (gt_index >= class_count) {
    throw DomainError("label index " + std::to_string(gt_index) + " out of range for " +
                      std::to_string(class_count) + " classes");
  }
}

std::vector<double> OneHotLabel::values() const {
  std::vector<double> v(k_, 0.0);
  v[gt_] = 1.0;
  return v;
}

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::EvidMSE: return "mse";
    case LossKind::EvidCE: return "ce";
    case LossKind::EvidLog: return "log";
  }
  return "?";
}

LossKind parse_loss(std::string_view name) {
  if (name == "mse") return LossKind::EvidMSE;
  if (name == "ce") return LossKind::EvidCE;
  if (name == "log") return LossKind::EvidLog;
  throw DomainError("unknown loss '" + std::string(name) + "'");
}

void RegularizationConfig::validate() const {
  if (!std::isfinite(lambda1) || lambda1 < 0.0) {
    throw DomainError("lambda1 must be finite and non-negative");
  }
  if (anneal_epochs < 1) throw DomainError("anneal_epochs must be positive");
}

double evid_mse_loss(const DirichletParams& params, const OneHotLabel& label) {
  check_dims(params, label);
  const double s = params.strength();
  double loss = 0.0;
  for (std::size_t j = 0; j < params.size(); ++j) {
    const double a = params[j];
    const double err = label[j] - a / s;
    loss += err * err + a * (s - a) / (s * s * (s + 1.0));
  }
  return loss;
}

double evid_ce_loss(const DirichletParams& params, const OneHotLabel& label) {
  check_dims(params, label);
  return digamma(params.strength()) - digamma(params[label.gt_index()]);
}

double evid_log_loss(const DirichletParams& params, const OneHotLabel& label) {
  check_dims(params, label);
  return std::log(params.strength()) - std::log(params[label.gt_index()]);
}

double evidential_loss(LossKind kind, const DirichletParams& params, const OneHotLabel& label) {
  switch (kind) {
    case LossKind::EvidMSE: return evid_mse_loss(params, label);
    case LossKind::EvidCE: return evid_ce_loss(params, label);
    case LossKind::EvidLog: return evid_log_loss(params, label);
  }
  return 0.0;
}

std::vector<double> evidential_loss_grad_alpha(LossKind kind, const DirichletParams& params,
                                               const OneHotLabel& label) {
  check_dims(params, label);
  const std::size_t k_count = params.size();
  const double s = params.strength();
  const std::size_t gt = label.gt_index();
  std::vector<double> grad(k_count, 0.0);

  switch (kind) {
    case LossKind::EvidMSE: {
      // With p = alpha / S: L = sum (y - p)^2 + (1 - sum p^2) / (S + 1).
      std::vector<double> dl_dp(k_count);
      double sum_p2 = 0.0;
      double weighted = 0.0;
      for (std::size_t j = 0; j < k_count; ++j) {
        const double p = params[j] / s;
        dl_dp[j] = -2.0 * (label[j] - p) - 2.0 * p / (s + 1.0);
        sum_p2 += p * p;
        weighted += dl_dp[j] * p;
      }
      const double ds_term = (1.0 - sum_p2) / ((s + 1.0) * (s + 1.0));
      for (std::size_t k = 0; k < k_count; ++k) {
        grad[k] = (dl_dp[k] - weighted) / s - ds_term;
      }
      break;
    }
    case LossKind::EvidCE: {
      const double tri_s = trigamma(s);
      std::fill(grad.begin(), grad.end(), tri_s);
      grad[gt] -= trigamma(params[gt]);
      break;
    }
    case LossKind::EvidLog: {
      std::fill(grad.begin(), grad.end(), 1.0 / s);
      grad[gt] -= 1.0 / params[gt];
      break;
    }
  }
  return grad;
}

double kl_incorrect_reg(const DirichletParams& params, const OneHotLabel& label) {
  check_dims(params, label);
  const std::vector<double> alpha = masked_alpha(params, label);
  double s = 0.0;
  for (double a : alpha) s += a;
  const double psi_s = digamma(s);
  double kl = ln_gamma(s) - ln_gamma(static_cast<double>(alpha.size()));
  for (double a : alpha) {
    kl -= ln_gamma(a);
    kl += (a - 1.0) * (digamma(a) - psi_s);
  }
  // Rounding can leave a tiny negative residue at alpha~ = 1.
  return std::max(kl, 0.0);
}

std::vector<double> kl_incorrect_reg_grad_alpha(const DirichletParams& params,
                                                const OneHotLabel& label) {
  check_dims(params, label);
  const std::vector<double> alpha = masked_alpha(params, label);
  double s = 0.0;
  for (double a : alpha) s += a;
  const double excess = s - static_cast<double>(alpha.size());
  const double tri_s = trigamma(s);
  std::vector<double> grad(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    grad[k] = (alpha[k] - 1.0) * trigamma(alpha[k]) - excess * tri_s;
  }
  grad[label.gt_index()] = 0.0;
  return grad;
}

double correct_evidence_reg(double logit_gt, double vacuity) {
  if (!(vacuity >= 0.0 && vacuity <= 1.0)) throw DomainError("vacuity must lie in [0, 1]");
  return logit_gt < 0.0 ? -vacuity * logit_gt : 0.0;
}

double correct_evidence_reg_evidence_form(ActivationKind kind, double evidence_gt, double vacuity) {
  return correct_evidence_reg(inverse_activation(kind, evidence_gt), vacuity);
}

double annealed_kl_weight(const RegularizationConfig& reg, int epoch) {
  const double progress =
      static_cast<double>(std::max(epoch, 0)) / static_cast<double>(reg.anneal_epochs);
  return reg.lambda1 * std::min(1.0, progress);
}

LossWithGrad combined_loss_with_grad(LossKind loss_kind, const RegularizationConfig& reg,
                                     ActivationKind kind, const LogitVector& logits,
                                     const OneHotLabel& label, int epoch) {
  if (logits.size() != label.class_count()) {
    throw DimensionError("logits have " + std::to_string(logits.size()) + " entries but label has " +
                         std::to_string(label.class_count()) + " classes");
  }
  const EvidenceVector evidence = activate(kind, logits);
  const DirichletParams params = dirichlet_params(evidence);
  const std::size_t k_count = params.size();
  const std::size_t gt = label.gt_index();
  const double s = params.strength();

  LossWithGrad out;
  out.loss = evidential_loss(loss_kind, params, label);
  std::vector<double> dl_dalpha = evidential_loss_grad_alpha(loss_kind, params, label);

  const double eta = annealed_kl_weight(reg, epoch);
  if (eta > 0.0) {
    out.loss += eta * kl_incorrect_reg(params, label);
    const std::vector<double> kl_grad = kl_incorrect_reg_grad_alpha(params, label);
    for (std::size_t k = 0; k < k_count; ++k) dl_dalpha[k] += eta * kl_grad[k];
  }

  double direct_gt = 0.0;
  const double o_gt = logits[gt];
  if (reg.use_correct_reg && o_gt < 0.0) {
    const double vac = static_cast<double>(k_count) / s;
    out.loss += -vac * o_gt;
    direct_gt = -vac;
    // d(vacuity)/d(alpha_k) = -K / S^2
    const double through_vacuity = o_gt * static_cast<double>(k_count) / (s * s);
    for (std::size_t k = 0; k < k_count; ++k) dl_dalpha[k] += through_vacuity;
  }

  out.grad.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double de_do = activation_derivative(kind, logits[k]);
    // 0 * finite stays exactly 0, which keeps ReLU zero-evidence samples frozen.
    out.grad[k] = de_do == 0.0 ? 0.0 : dl_dalpha[k] * de_do;
  }
  out.grad[gt] += direct_gt;
  return out;
}

double combined_loss(LossKind loss_kind, const RegularizationConfig& reg, ActivationKind kind,
                     const LogitVector& logits, const OneHotLabel& label, int epoch) {
  if (logits.size() != label.class_count()) {
    throw DimensionError("logits and label disagree on class count");
  }
  const EvidenceVector evidence = activate(kind, logits);
  const DirichletParams params = dirichlet_params(evidence);
  double loss = evidential_loss(loss_kind, params, label);
  const double eta = annealed_kl_weight(reg, epoch);
  if (eta > 0.0) loss += eta * kl_incorrect_reg(params, label);
  if (reg.use_correct_reg) {
    const double vac = static_cast<double>(params.size()) / params.strength();
    loss += correct_evidence_reg(logits[label.gt_index()], vac);
  }
  return loss;
}

std::vector<double> loss_grad_wrt_logits(LossKind loss_kind, const RegularizationConfig& reg,
                                         ActivationKind kind, const LogitVector& logits,
                                         const OneHotLabel& label, int epoch) {
  return combined_loss_with_grad(loss_kind, reg, kind, logits, label, epoch).grad;
}

}  // namespace evcore
