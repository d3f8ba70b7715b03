#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "evcore/error.hpp"
#include "evcore/rng.hpp"
#include "evcore/uncertainty.hpp"

using namespace evcore;

namespace {

PredictionRecord rec(double confidence, bool correct, double vac = 0.5) {
  PredictionRecord r;
  r.confidence = confidence;
  r.correct = correct;
  r.vacuity = vac;
  r.uncertainty_score = 1.0 - confidence;
  return r;
}

double brute_force_auroc(const std::vector<double>& id, const std::vector<double>& ood) {
  double wins = 0.0;
  for (double o : ood) {
    for (double i : id) wins += o > i ? 1.0 : (o == i ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(id.size()) * static_cast<double>(ood.size()));
}

}  // namespace

TEST_SUITE("uncertainty") {
  TEST_CASE("vacuity") {
    for (std::size_t k : {2u, 3u, 10u}) {
      CHECK(vacuity(dirichlet_params(EvidenceVector(std::vector<double>(k, 0.0)))) == 1.0);
    }
    std::vector<double> e(10, 0.0);
    e[3] = 10.0;
    CHECK(vacuity(dirichlet_params(EvidenceVector(e))) == 0.5);
    CHECK(vacuity(dirichlet_params(EvidenceVector({1e6, 0.0}))) == doctest::Approx(2.0 / 1000002.0).epsilon(1e-14));
  }

  TEST_CASE("beliefs") {
    const EvidenceVector zero({0.0, 0.0, 0.0});
    for (double b : beliefs(zero, dirichlet_params(zero))) CHECK(b == 0.0);

    const EvidenceVector e2({2.0, 0.0});
    const auto b2 = beliefs(e2, dirichlet_params(e2));
    CHECK(b2[0] == 0.5);
    CHECK(b2[1] == 0.0);

    const EvidenceVector e3({3.0, 1.0, 0.0});
    const auto p3 = dirichlet_params(e3);
    const auto b3 = beliefs(e3, p3);
    CHECK(b3[0] == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
    CHECK(b3[1] == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
    CHECK(b3[2] == 0.0);
    CHECK(vacuity(p3) == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
  }

  TEST_CASE("expected probabilities") {
    const auto u = expected_probs(dirichlet_params(EvidenceVector(std::vector<double>(4, 0.0))));
    for (double p : u) CHECK(p == 0.25);
    const auto p = expected_probs(DirichletParams({5.0, 2.0, 1.0}));
    CHECK(p[0] == 0.625);
    CHECK(p[1] == 0.25);
    CHECK(p[2] == 0.125);
    const auto lim = expected_probs(DirichletParams({1e6, 1.0}));
    CHECK(lim[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(std::abs(lim[1]) <= 1e-5);
  }

  TEST_CASE("opinion invariants on random evidence") {
    Rng rng(41);
    for (int i = 0; i < 10000; ++i) {
      std::vector<double> e(2 + rng.below(9));
      for (double& v : e) v = rng.below(4) == 0 ? 0.0 : std::exp(rng.uniform(-5.0, 8.0));
      const EvidenceVector ev(e);
      const UncertaintyReport r = uncertainty_report(ev);
      double bsum = 0.0, psum = 0.0;
      for (double b : r.beliefs) {
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
        bsum += b;
      }
      for (double p : r.expected_probs) psum += p;
      CHECK(std::abs(bsum + r.vacuity - 1.0) <= 1e-9);
      CHECK(std::abs(psum - 1.0) <= 1e-9);
      CHECK(r.dissonance >= 0.0);
      CHECK(r.dissonance <= 1.0);
      CHECK(r.predicted_class == argmax(r.beliefs));
    }
  }

  TEST_CASE("dissonance") {
    CHECK(dissonance(std::vector<double>{1.0, 0.0, 0.0}) == 0.0);
    CHECK(dissonance(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
    CHECK(dissonance(std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(dissonance(std::vector<double>{0.3, 0.0, 0.0, 0.0}) == 0.0);
    // (0.2, 0.6): Bal = 1 - 0.4/0.8 = 0.5, each term b_i * Bal = 0.1 and 0.3
    CHECK(dissonance(std::vector<double>{0.2, 0.6}) == doctest::Approx(0.4).epsilon(1e-14));
  }

  TEST_CASE("argmax ties go low") {
    CHECK(argmax(std::vector<double>{0.2, 0.5, 0.5}) == 1);
    CHECK(argmax(std::vector<double>{0.0, 0.0}) == 0);
  }

  TEST_CASE("prediction record") {
    const PredictionRecord r = prediction_record(EvidenceVector({4.0, 1.0, 0.0}), 0);
    CHECK(r.correct);
    CHECK(r.confidence == 0.625);
    CHECK(r.uncertainty_score == 0.375);
    CHECK(r.vacuity == 0.375);
    CHECK_FALSE(prediction_record(EvidenceVector({4.0, 1.0, 0.0}), 2).correct);
  }

  TEST_CASE("ece hand cases") {
    const std::vector<PredictionRecord> perfect{rec(1.0, true), rec(1.0, true), rec(1.0, true)};
    CHECK(ece(perfect, 10) == 0.0);

    const std::vector<PredictionRecord> one_bin{rec(0.9, true), rec(0.9, false)};
    CHECK(std::abs(ece(one_bin, 10) - 0.4) <= 1e-12);

    // bin [0.6, 0.7): acc 0.5, conf 0.6 (gap 0.1); bin [0.8, 0.9): acc 0.5, conf 0.8 (gap 0.3)
    const std::vector<PredictionRecord> two_bins{rec(0.6, true), rec(0.6, false), rec(0.8, true), rec(0.8, false)};
    CHECK(std::abs(ece(two_bins, 10) - 0.2) <= 1e-12);

    CHECK_THROWS_AS(ece(std::vector<PredictionRecord>{}, 10), DomainError);
    CHECK_THROWS_AS(ece(perfect, 0), DomainError);
  }

  TEST_CASE("ece properties") {
    Rng rng(42);
    std::vector<PredictionRecord> records;
    for (int i = 0; i < 500; ++i) records.push_back(rec(rng.uniform(0.1, 1.0), rng.below(3) != 0));
    const double base = ece(records, 15);
    auto shuffled = records;
    rng.shuffle(std::span<PredictionRecord>(shuffled));
    CHECK(ece(shuffled, 15) == doctest::Approx(base).epsilon(1e-12));

    double acc = 0.0, conf = 0.0;
    for (const auto& r : records) {
      acc += r.correct ? 1.0 : 0.0;
      conf += r.confidence;
    }
    acc /= records.size();
    conf /= records.size();
    CHECK(ece(records, 1) == doctest::Approx(std::abs(acc - conf)).epsilon(1e-12));
  }

  TEST_CASE("reliability bins") {
    const std::vector<PredictionRecord> records{rec(0.05, false), rec(1.0, true), rec(0.95, false)};
    const auto bins = reliability_bins(records, 10);
    REQUIRE(bins.size() == 10);
    CHECK(bins[0].count == 1);
    CHECK(bins[9].count == 2);  // last bin is closed at 1
    CHECK(bins[9].accuracy == 0.5);
    CHECK(bins[9].confidence == doctest::Approx(0.975));
    CHECK(std::isnan(bins[4].accuracy));
    CHECK(bins[4].count == 0);
  }

  TEST_CASE("auroc examples") {
    CHECK(auroc(std::vector<double>{0.1, 0.2}, std::vector<double>{0.8, 0.9}) == 1.0);
    CHECK(auroc(std::vector<double>{0.3, 0.3, 0.3}, std::vector<double>{0.3, 0.3}) == 0.5);
    CHECK(auroc(std::vector<double>{0.1, 0.5}, std::vector<double>{0.4, 0.9}) == 0.75);
    CHECK(auroc(std::vector<double>{0.8, 0.9}, std::vector<double>{0.1, 0.2}) == 0.0);
    CHECK_THROWS_AS(auroc(std::vector<double>{}, std::vector<double>{0.1}), DomainError);
    CHECK_THROWS_AS(auroc(std::vector<double>{0.1}, std::vector<double>{}), DomainError);
  }

  TEST_CASE("auroc matches brute force") {
    Rng rng(43);
    for (int i = 0; i < 2000; ++i) {
      std::vector<double> id(1 + rng.below(50)), ood(1 + rng.below(50));
      // coarse grid so that ties are frequent
      for (double& v : id) v = static_cast<double>(rng.below(12)) / 11.0;
      for (double& v : ood) v = static_cast<double>(rng.below(12)) / 11.0;
      CHECK(auroc(id, ood) == doctest::Approx(brute_force_auroc(id, ood)).epsilon(1e-12));
    }
  }

  TEST_CASE("accuracy vacuity curve") {
    const std::vector<PredictionRecord> records{rec(0.9, true, 0.1), rec(0.8, true, 0.2), rec(0.3, false, 0.9)};
    const std::vector<double> taus{0.05, 0.5, 1.0};
    const auto curve = accuracy_vacuity_curve(records, taus);
    REQUIRE(curve.size() == 3);
    CHECK(std::isnan(curve[0].accuracy));
    CHECK(curve[0].coverage == 0.0);
    CHECK(curve[1].accuracy == 1.0);
    CHECK(curve[1].coverage == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(curve[2].accuracy == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(curve[2].coverage == 1.0);

    const std::vector<PredictionRecord> half{rec(0.5, true, 0.5), rec(0.5, false, 0.5)};
    const std::vector<double> t04{0.4};
    CHECK(accuracy_vacuity_curve(half, t04)[0].coverage == 0.0);
  }

  TEST_CASE("coverage is non-decreasing in the threshold") {
    Rng rng(44);
    std::vector<PredictionRecord> records;
    for (int i = 0; i < 300; ++i) records.push_back(rec(0.5, rng.below(2) == 1, rng.uniform()));
    std::vector<double> taus;
    for (int i = 0; i <= 50; ++i) taus.push_back(i / 50.0);
    const auto curve = accuracy_vacuity_curve(records, taus);
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].coverage >= curve[i - 1].coverage);
  }

  TEST_CASE("top-k confident accuracy") {
    const std::vector<PredictionRecord> records{rec(0.9, true, 0.1), rec(0.2, false, 0.9)};
    const std::vector<double> fr{0.5, 1.0};
    const auto top = topk_confident_accuracy(records, fr);
    CHECK(top[0].accuracy == 1.0);
    CHECK(top[1].accuracy == 0.5);
    // ties keep the input order
    const std::vector<PredictionRecord> tied{rec(0.5, false, 0.3), rec(0.5, true, 0.3), rec(0.5, true, 0.3)};
    const std::vector<double> third{1.0 / 3.0};
    CHECK(topk_confident_accuracy(tied, third)[0].accuracy == 0.0);
    CHECK_THROWS_AS(topk_confident_accuracy(std::vector<PredictionRecord>{}, fr), DomainError);
  }
}
