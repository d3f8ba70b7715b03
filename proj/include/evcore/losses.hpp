#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "evcore/evidential_head.hpp"

namespace evcore {

class OneHotLabel {
 public:
  OneHotLabel(std::size_t gt_index, std::size_t class_count);

  std::size_t gt_index() const noexcept { return gt_; }
  std::size_t class_count() const noexcept { return k_; }
  double operator[](std::size_t k) const noexcept { return k == gt_ ? 1.0 : 0.0; }
  std::vector<double> values() const;

  friend bool operator==(const OneHotLabel&, const OneHotLabel&) = default;

 private:
  std::size_t gt_;
  std::size_t k_;
};

enum class LossKind { EvidMSE, EvidCE, EvidLog };

std::string_view to_string(LossKind kind);
LossKind parse_loss(std::string_view name);

struct RegularizationConfig {
  double lambda1 = 0.0;        // incorrect-evidence (KL) strength
  bool use_correct_reg = false;
  int anneal_epochs = 10;

  void validate() const;
};

// Bayes risk with squared error; lies in [0, 2].
double evid_mse_loss(const DirichletParams& params, const OneHotLabel& label);
// Bayes risk with cross-entropy: psi(S) - psi(alpha_gt).
double evid_ce_loss(const DirichletParams& params, const OneHotLabel& label);
// Type-II maximum likelihood: ln S - ln alpha_gt.
double evid_log_loss(const DirichletParams& params, const OneHotLabel& label);

double evidential_loss(LossKind kind, const DirichletParams& params, const OneHotLabel& label);

// dL/dalpha_k for each evidential loss.
std::vector<double> evidential_loss_grad_alpha(LossKind kind, const DirichletParams& params,
                                               const OneHotLabel& label);

// KL(Dir(alpha~) || Dir(1)) with alpha~ = y + (1 - y) * alpha.
double kl_incorrect_reg(const DirichletParams& params, const OneHotLabel& label);
std::vector<double> kl_incorrect_reg_grad_alpha(const DirichletParams& params,
                                                const OneHotLabel& label);

// -1(o_gt < 0) * vacuity * o_gt.
double correct_evidence_reg(double logit_gt, double vacuity);

// Same regularizer written in terms of the ground-truth evidence.
double correct_evidence_reg_evidence_form(ActivationKind kind, double evidence_gt, double vacuity);

// eta_1 = lambda1 * min(1, epoch / anneal_epochs), epoch clamped below at 0.
double annealed_kl_weight(const RegularizationConfig& reg, int epoch);

double combined_loss(LossKind loss_kind, const RegularizationConfig& reg, ActivationKind kind,
                     const LogitVector& logits, const OneHotLabel& label, int epoch);

struct LossWithGrad {
  double loss = 0.0;
  std::vector<double> grad;  // dL/do_k
};

// Loss and its exact gradient w.r.t. the logits. The vacuity weight of the
// correct-evidence term is differentiated through as well.
LossWithGrad combined_loss_with_grad(LossKind loss_kind, const RegularizationConfig& reg,
                                     ActivationKind kind, const LogitVector& logits,
                                     const OneHotLabel& label, int epoch);

std::vector<double> loss_grad_wrt_logits(LossKind loss_kind, const RegularizationConfig& reg,
                                         ActivationKind kind, const LogitVector& logits,
                                         const OneHotLabel& label, int epoch);

}  // namespace evcore
