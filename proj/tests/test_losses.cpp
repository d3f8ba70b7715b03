#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "evcore/error.hpp"
#include "evcore/losses.hpp"
#include "evcore/rng.hpp"
#include "evcore/special_math.hpp"
#include "evcore/uncertainty.hpp"

using namespace evcore;

namespace {

constexpr LossKind kLosses[] = {LossKind::EvidMSE, LossKind::EvidCE, LossKind::EvidLog};
constexpr ActivationKind kActs[] = {ActivationKind::ReLU, ActivationKind::SoftPlus, ActivationKind::Exp,
                                    ActivationKind::SELU};

DirichletParams alpha_of(std::vector<double> a) { return DirichletParams(std::move(a)); }

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3});
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Direct evaluation of the Dirichlet KL to the uniform Dirichlet.
double kl_to_uniform(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v;
  double kl = std::lgamma(s) - std::lgamma(static_cast<double>(a.size()));
  for (double v : a) kl -= std::lgamma(v);
  for (double v : a) kl += (v - 1.0) * (digamma(v) - digamma(s));
  return kl;
}

// Monte-Carlo KL(Dir(a) || Dir(1)) = E[ln Dir(p | a)] - ln Gamma(K), p ~ Dir(a)
// drawn through normalised std::gamma_distribution variates.
double monte_carlo_kl(const std::vector<double>& a, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<std::gamma_distribution<double>> gammas;
  double s = 0.0;
  for (double v : a) {
    gammas.emplace_back(v, 1.0);
    s += v;
  }
  double log_norm = std::lgamma(s) - std::lgamma(static_cast<double>(a.size()));
  for (double v : a) log_norm -= std::lgamma(v);
  std::vector<double> g(a.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < samples; ++n) {
    double total = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      g[k] = gammas[k](gen);
      total += g[k];
    }
    double term = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] != 1.0) term += (a[k] - 1.0) * std::log(g[k] / total);
    }
    acc += term;
  }
  return log_norm + acc / static_cast<double>(samples);
}

}  // namespace

TEST_SUITE("losses") {
  TEST_CASE("mse loss examples") {
    CHECK(evid_mse_loss(alpha_of({1, 1}), OneHotLabel(0, 2)) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(evid_mse_loss(alpha_of({1, 1}), OneHotLabel(1, 2)) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(evid_mse_loss(alpha_of(std::vector<double>(10, 1.0)), OneHotLabel(3, 10)) ==
          doctest::Approx(0.9 + 90.0 / 1100.0).epsilon(1e-14));
    std::vector<double> fit(10, 1.0);
    fit[0] = 1e6;
    CHECK(evid_mse_loss(alpha_of(fit), OneHotLabel(0, 10)) <= 1e-3);
  }

  TEST_CASE("mse loss lies in [0, 2]") {
    Rng rng(21);
    for (int i = 0; i < 10000; ++i) {
      const std::size_t k = 2 + rng.below(9);
      std::vector<double> a(k);
      for (double& v : a) v = rng.uniform(1.0, 1e4);
      const double l = evid_mse_loss(alpha_of(a), OneHotLabel(rng.below(k), k));
      CHECK(l >= 0.0);
      CHECK(l <= 2.0);
    }
  }

  TEST_CASE("ce loss examples") {
    double h9 = 0.0;
    for (int k = 1; k <= 9; ++k) h9 += 1.0 / k;
    CHECK(evid_ce_loss(alpha_of(std::vector<double>(10, 1.0)), OneHotLabel(0, 10)) ==
          doctest::Approx(h9).epsilon(1e-12));
    CHECK(evid_ce_loss(alpha_of({1, 1}), OneHotLabel(1, 2)) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> a(10, 1.0);
    a[0] = 101.0;
    double oracle = 0.0;  // psi(110) - psi(101) = sum_{n=101}^{109} 1/n
    for (int n = 101; n <= 109; ++n) oracle += 1.0 / n;
    CHECK(evid_ce_loss(alpha_of(a), OneHotLabel(0, 10)) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(oracle == doctest::Approx(0.0857).epsilon(1e-3));
  }

  TEST_CASE("log loss examples") {
    CHECK(evid_log_loss(alpha_of(std::vector<double>(10, 1.0)), OneHotLabel(4, 10)) ==
          doctest::Approx(std::log(10.0)).epsilon(1e-14));
    std::vector<double> a(10, 1.0);
    a[0] = 101.0;
    CHECK(evid_log_loss(alpha_of(a), OneHotLabel(0, 10)) == doctest::Approx(std::log(110.0 / 101.0)).epsilon(1e-14));
    CHECK(evid_log_loss(alpha_of({2, 1}), OneHotLabel(0, 2)) == doctest::Approx(std::log(1.5)).epsilon(1e-14));
  }

  TEST_CASE("losses are non-negative") {
    Rng rng(22);
    for (int i = 0; i < 2000; ++i) {
      const std::size_t k = 2 + rng.below(6);
      std::vector<double> a(k);
      for (double& v : a) v = 1.0 + std::exp(rng.uniform(-10.0, 8.0));
      const OneHotLabel y(rng.below(k), k);
      for (auto kind : kLosses) CHECK(evidential_loss(kind, alpha_of(a), y) >= 0.0);
      CHECK(kl_incorrect_reg(alpha_of(a), y) >= 0.0);
    }
  }

  TEST_CASE("dimension mismatch") {
    for (auto kind : kLosses) {
      CHECK_THROWS_AS(evidential_loss(kind, alpha_of({1, 1, 1}), OneHotLabel(0, 2)), DimensionError);
    }
    CHECK_THROWS_AS(kl_incorrect_reg(alpha_of({1, 1, 1}), OneHotLabel(0, 2)), DimensionError);
    CHECK_THROWS_AS(OneHotLabel(2, 2), DomainError);
  }

  TEST_CASE("loss gradients in alpha match finite differences") {
    Rng rng(23);
    for (int i = 0; i < 300; ++i) {
      const std::size_t k = 2 + rng.below(5);
      std::vector<double> a(k);
      for (double& v : a) v = 1.0 + std::exp(rng.uniform(-3.0, 4.0));
      const OneHotLabel y(rng.below(k), k);
      for (auto kind : kLosses) {
        const auto g = evidential_loss_grad_alpha(kind, alpha_of(a), y);
        for (std::size_t j = 0; j < k; ++j) {
          const double h = 1e-6 * a[j];
          auto up = a, down = a;
          up[j] += h;
          down[j] -= h;
          if (down[j] < 1.0) continue;
          const double fd =
              (evidential_loss(kind, alpha_of(up), y) - evidential_loss(kind, alpha_of(down), y)) / (2 * h);
          CHECK(relative_error(g[j], fd) <= 1e-5);
        }
      }
    }
  }

  TEST_CASE("kl regularizer closed cases") {
    CHECK(kl_incorrect_reg(alpha_of({1, 1, 1}), OneHotLabel(1, 3)) == 0.0);
    // gt masked, so the remaining alpha~ = (2, 1) case
    CHECK(std::abs(kl_incorrect_reg(alpha_of({2, 1}), OneHotLabel(1, 2)) - (std::numbers::ln2 - 0.5)) <= 1e-9);
    CHECK(std::abs(kl_incorrect_reg(alpha_of({2, 7}), OneHotLabel(1, 2)) - (std::numbers::ln2 - 0.5)) <= 1e-9);
    CHECK(kl_incorrect_reg(alpha_of({1, 1e5, 1}), OneHotLabel(1, 3)) == 0.0);
  }

  TEST_CASE("kl regularizer matches direct evaluation") {
    Rng rng(24);
    for (int i = 0; i < 500; ++i) {
      const std::size_t k = 2 + rng.below(8);
      std::vector<double> a(k);
      for (double& v : a) v = 1.0 + std::exp(rng.uniform(-4.0, 5.0));
      const std::size_t gt = rng.below(k);
      auto masked = a;
      masked[gt] = 1.0;
      CHECK(kl_incorrect_reg(alpha_of(a), OneHotLabel(gt, k)) ==
            doctest::Approx(kl_to_uniform(masked)).epsilon(1e-10).scale(1.0));
    }
  }

  TEST_CASE("kl regularizer Monte-Carlo cross-check") {
    const double mc2 = monte_carlo_kl({2.0, 1.0}, 4'000'000, 1);
    CHECK(std::abs(mc2 - kl_incorrect_reg(alpha_of({2, 1}), OneHotLabel(1, 2))) <= 1e-3);
    const double mc3 = monte_carlo_kl({1.0, 3.0, 2.5}, 4'000'000, 2);
    CHECK(std::abs(mc3 - kl_incorrect_reg(alpha_of({9.0, 3.0, 2.5}), OneHotLabel(0, 3))) <= 1e-3);
  }

  TEST_CASE("kl gradient matches finite differences and vanishes at gt") {
    Rng rng(25);
    for (int i = 0; i < 300; ++i) {
      const std::size_t k = 2 + rng.below(5);
      std::vector<double> a(k);
      for (double& v : a) v = 1.0 + std::exp(rng.uniform(-3.0, 4.0));
      const OneHotLabel y(rng.below(k), k);
      const auto g = kl_incorrect_reg_grad_alpha(alpha_of(a), y);
      CHECK(g[y.gt_index()] == 0.0);
      for (std::size_t j = 0; j < k; ++j) {
        const double h = 1e-6 * a[j];
        auto up = a, down = a;
        up[j] += h;
        down[j] -= h;
        if (down[j] < 1.0) continue;
        const double fd = (kl_incorrect_reg(alpha_of(up), y) - kl_incorrect_reg(alpha_of(down), y)) / (2 * h);
        CHECK(relative_error(g[j], fd) <= 1e-5);
      }
    }
  }

  TEST_CASE("kl term has no gradient through the gt logit") {
    Rng rng(26);
    const RegularizationConfig kl_only{1.0, false, 10};
    for (int i = 0; i < 200; ++i) {
      const std::size_t k = 2 + rng.below(5);
      std::vector<double> o(k);
      for (double& v : o) v = rng.uniform(-3.0, 3.0);
      const OneHotLabel y(rng.below(k), k);
      auto kl_at = [&](const std::vector<double>& logits) {
        return kl_incorrect_reg(dirichlet_params(activate(ActivationKind::Exp, LogitVector(logits))), y);
      };
      auto up = o, down = o;
      up[y.gt_index()] += 1e-6;
      down[y.gt_index()] -= 1e-6;
      CHECK(std::abs(kl_at(up) - kl_at(down)) / 2e-6 <= 1e-8);
      // The analytic combined gradient with only the KL term: gt entry equals
      // the bare evidential loss gradient.
      const LogitVector logits(o);
      const auto with_kl = loss_grad_wrt_logits(LossKind::EvidLog, kl_only, ActivationKind::Exp, logits, y, 20);
      const auto bare = loss_grad_wrt_logits(LossKind::EvidLog, RegularizationConfig{}, ActivationKind::Exp, logits, y, 20);
      CHECK(with_kl[y.gt_index()] == doctest::Approx(bare[y.gt_index()]).epsilon(1e-14));
    }
  }

  TEST_CASE("correct evidence regularizer") {
    CHECK(correct_evidence_reg(1.5, 0.3) == 0.0);
    CHECK(correct_evidence_reg(1.5, 1.0) == 0.0);
    CHECK(correct_evidence_reg(-2.0, 1.0) == 2.0);
    CHECK(correct_evidence_reg(-2.0, 0.25) == 0.5);
    CHECK(correct_evidence_reg(0.0, 1.0) == 0.0);
    CHECK_THROWS_AS(correct_evidence_reg(-1.0, 1.5), DomainError);
  }

  TEST_CASE("evidence form of the correct evidence regularizer") {
    CHECK(std::abs(correct_evidence_reg_evidence_form(ActivationKind::Exp, std::exp(-2.0), 1.0) - 2.0) <= 1e-12);
    CHECK(correct_evidence_reg_evidence_form(ActivationKind::SoftPlus, std::numbers::ln2, 1.0) == 0.0);
    CHECK(std::abs(correct_evidence_reg_evidence_form(ActivationKind::SELU, std::exp(-0.5), 0.5) - 0.25) <= 1e-12);
    CHECK_THROWS_AS(correct_evidence_reg_evidence_form(ActivationKind::ReLU, 1.0, 1.0), UnsupportedActivationError);
    CHECK_THROWS_AS(correct_evidence_reg_evidence_form(ActivationKind::Exp, 0.0, 1.0), InfiniteRegularizerError);
    CHECK_THROWS_AS(correct_evidence_reg_evidence_form(ActivationKind::SELU, 0.0, 1.0), InfiniteRegularizerError);

    Rng rng(27);
    for (int i = 0; i < 1000; ++i) {
      const ActivationKind kind = kActs[1 + rng.below(3)];
      const double o = rng.uniform(-10.0, 10.0);
      const double nu = rng.uniform(0.0, 1.0);
      const double e = activate(kind, o);
      CAPTURE(o);
      CHECK(std::abs(correct_evidence_reg_evidence_form(kind, e, nu) - correct_evidence_reg(o, nu)) <= 1e-9);
    }
  }

  TEST_CASE("kl annealing") {
    RegularizationConfig reg{1.0, false, 10};
    CHECK(annealed_kl_weight(reg, 5) == 0.5);
    CHECK(annealed_kl_weight(reg, 10) == 1.0);
    CHECK(annealed_kl_weight(reg, 37) == 1.0);
    CHECK(annealed_kl_weight(reg, 0) == 0.0);
    CHECK(annealed_kl_weight(reg, -4) == 0.0);
    reg.lambda1 = 3.0;
    CHECK(annealed_kl_weight(reg, 5) == 0.5 * annealed_kl_weight(reg, 20));
    reg.anneal_epochs = 4;
    CHECK(annealed_kl_weight(reg, 2) == 1.5);
    CHECK_THROWS_AS((RegularizationConfig{-1.0, false, 10}.validate()), DomainError);
    CHECK_THROWS_AS((RegularizationConfig{1.0, false, 0}.validate()), DomainError);
  }

  TEST_CASE("combined loss composition") {
    Rng rng(28);
    for (int i = 0; i < 200; ++i) {
      const std::size_t k = 2 + rng.below(5);
      std::vector<double> o(k);
      for (double& v : o) v = rng.uniform(-4.0, 4.0);
      const LogitVector logits(o);
      const OneHotLabel y(rng.below(k), k);
      const ActivationKind act = kActs[rng.below(4)];
      const LossKind kind = kLosses[rng.below(3)];
      const int epoch = static_cast<int>(rng.below(20));
      const DirichletParams p = dirichlet_params(activate(act, logits));
      const double bare = evidential_loss(kind, p, y);
      CHECK(combined_loss(kind, RegularizationConfig{}, act, logits, y, epoch) == bare);

      const RegularizationConfig full{2.0, true, 10};
      const double expected = bare + annealed_kl_weight(full, epoch) * kl_incorrect_reg(p, y) +
                              correct_evidence_reg(o[y.gt_index()], vacuity(p));
      CHECK(combined_loss(kind, full, act, logits, y, epoch) == doctest::Approx(expected).epsilon(1e-14));
      CHECK(combined_loss_with_grad(kind, full, act, logits, y, epoch).loss ==
            doctest::Approx(expected).epsilon(1e-14));
    }
  }

  TEST_CASE("log loss gradient hand example") {
    // alpha = (2, 1) comes from Exp logits (0, -inf); use a very negative logit.
    const auto g = loss_grad_wrt_logits(LossKind::EvidLog, RegularizationConfig{}, ActivationKind::ReLU,
                                        LogitVector({1.0, -1.0}), OneHotLabel(0, 2), 0);
    CHECK(g[0] == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
    CHECK(g[1] == 0.0);
    const auto ge = loss_grad_wrt_logits(LossKind::EvidLog, RegularizationConfig{}, ActivationKind::Exp,
                                         LogitVector({0.0, -700.0}), OneHotLabel(0, 2), 0);
    CHECK(ge[0] == doctest::Approx(-1.0 / 6.0).epsilon(1e-12));
    CHECK(std::abs(ge[1]) <= 1e-300);
  }

  TEST_CASE("vanishing gradients at zero evidence") {
    Rng rng(29);
    for (int i = 0; i < 200; ++i) {
      const std::size_t k = 2 + rng.below(9);
      std::vector<double> deep(k), nonpos(k);
      for (double& v : deep) v = rng.uniform(-80.0, -30.0);
      for (double& v : nonpos) v = rng.uniform(-5.0, 0.0);
      nonpos[rng.below(k)] = 0.0;
      const OneHotLabel y(rng.below(k), k);
      for (auto kind : kLosses) {
        for (auto act : kActs) {
          const auto g = loss_grad_wrt_logits(kind, RegularizationConfig{}, act, LogitVector(deep), y, 3);
          CHECK(max_abs(g) <= 1e-10);
        }
        const auto gr = loss_grad_wrt_logits(kind, RegularizationConfig{}, ActivationKind::ReLU,
                                             LogitVector(nonpos), y, 3);
        CHECK(max_abs(gr) == 0.0);
      }
    }
  }

  TEST_CASE("gradient restoration at zero evidence") {
    Rng rng(30);
    const RegularizationConfig gred{0.0, true, 10};
    for (int i = 0; i < 100; ++i) {
      const std::size_t k = 2 + rng.below(9);
      std::vector<double> o(k);
      for (double& v : o) v = rng.uniform(-5.0, -1e-3);
      const OneHotLabel y(rng.below(k), k);
      for (auto kind : kLosses) {
        const auto g = loss_grad_wrt_logits(kind, gred, ActivationKind::ReLU, LogitVector(o), y, 0);
        CHECK(std::abs(g[y.gt_index()] + 1.0) <= 1e-9);
        for (std::size_t j = 0; j < k; ++j) {
          if (j != y.gt_index()) CHECK(g[j] == 0.0);
        }
      }
    }
    for (auto kind : kLosses) {
      for (auto act : {ActivationKind::SoftPlus, ActivationKind::Exp, ActivationKind::SELU}) {
        const auto g = loss_grad_wrt_logits(kind, gred, act, LogitVector({-60.0, -55.0, -70.0}), OneHotLabel(1, 3), 0);
        CHECK(std::abs(g[1] + 1.0) <= 1e-9);
      }
    }
  }

  TEST_CASE("combined gradient matches finite differences") {
    Rng rng(31);
    constexpr double h = 1e-3;
    for (int i = 0; i < 1000; ++i) {
      const std::size_t k = 2 + rng.below(5);
      std::vector<double> o(k);
      for (double& v : o) v = rng.uniform(-6.0, 6.0);
      const OneHotLabel y(rng.below(k), k);
      const ActivationKind act = kActs[rng.below(4)];
      const LossKind kind = kLosses[rng.below(3)];
      const RegularizationConfig reg{rng.uniform(0.0, 3.0), rng.below(2) == 1, 10};
      const int epoch = static_cast<int>(rng.below(15));
      bool near_kink = false;
      for (double v : o) near_kink |= std::abs(v) < 1e-2;
      if (near_kink) continue;
      const auto g = loss_grad_wrt_logits(kind, reg, act, LogitVector(o), y, epoch);
      for (std::size_t j = 0; j < k; ++j) {
        auto at = [&](double step) {
          auto v = o;
          v[j] += step;
          return combined_loss(kind, reg, act, LogitVector(v), y, epoch);
        };
        // five-point stencil: the KL term makes L large enough that a plain
        // central difference at small h is dominated by rounding
        const double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
        CHECK(relative_error(g[j], fd) <= 1e-5);
      }
    }
  }

  TEST_CASE("mse gradient shrinks as exp evidence vanishes") {
    const OneHotLabel y(1, 4);
    double prev = std::numeric_limits<double>::infinity();
    for (double o = 0.0; o >= -30.0; o -= 0.5) {
      const auto g = loss_grad_wrt_logits(LossKind::EvidMSE, RegularizationConfig{}, ActivationKind::Exp,
                                          LogitVector(std::vector<double>(4, o)), y, 0);
      double norm = 0.0;
      for (double v : g) norm += v * v;
      norm = std::sqrt(norm);
      CHECK(norm < prev);
      prev = norm;
    }
  }

  TEST_CASE("loss names") {
    for (auto kind : kLosses) CHECK(parse_loss(to_string(kind)) == kind);
    CHECK_THROWS_AS(parse_loss("hinge"), DomainError);
  }
}
