#include "evcore/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "evcore/error.hpp"

namespace evcore {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double balance(double x, double y) {
  const double sum = x + y;
  return sum > 0.0 ? 1.0 - std::abs(x - y) / sum : 0.0;
}

std::size_t bin_index(double confidence, std::size_t n_bins) {
  const auto idx = static_cast<std::size_t>(confidence * static_cast<double>(n_bins));
  return std::min(idx, n_bins - 1);
}

}  // namespace

double vacuity(const DirichletParams& params) {
  return static_cast<double>(params.size()) / params.strength();
}

std::vector<double> beliefs(const EvidenceVector& evidence, const DirichletParams& params) {
  if (evidence.size() != params.size()) throw DimensionError("evidence/params size mismatch");
  std::vector<double> b(evidence.size());
  const double s = params.strength();
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = evidence[k] / s;
  return b;
}

std::vector<double> expected_probs(const DirichletParams& params) {
  std::vector<double> p(params.size());
  const double s = params.strength();
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = params[k] / s;
  return p;
}

double dissonance(std::span<const double> b) {
  const double total = std::accumulate(b.begin(), b.end(), 0.0);
  double diss = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] == 0.0) continue;
    const double others = total - b[i];
    if (others <= 0.0) continue;
    double balanced = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (j != i) balanced += b[j] * balance(b[i], b[j]);
    }
    diss += b[i] * balanced / others;
  }
  return std::clamp(diss, 0.0, 1.0);
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw DimensionError("argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return best;
}

UncertaintyReport uncertainty_report(const EvidenceVector& evidence) {
  const DirichletParams params = dirichlet_params(evidence);
  UncertaintyReport report;
  report.vacuity = vacuity(params);
  report.beliefs = beliefs(evidence, params);
  report.expected_probs = expected_probs(params);
  report.dissonance = dissonance(report.beliefs);
  report.predicted_class = argmax(report.beliefs);
  return report;
}

PredictionRecord prediction_record(const EvidenceVector& evidence, std::size_t true_class) {
  const DirichletParams params = dirichlet_params(evidence);
  const std::vector<double> probs = expected_probs(params);
  const std::size_t predicted = argmax(probs);
  PredictionRecord rec;
  rec.confidence = probs[predicted];
  rec.correct = predicted == true_class;
  rec.vacuity = vacuity(params);
  rec.uncertainty_score = 1.0 - rec.confidence;
  return rec;
}

std::vector<ReliabilityBin> reliability_bins(std::span<const PredictionRecord> records,
                                             std::size_t n_bins) {
  if (n_bins == 0) throw DomainError("n_bins must be positive");
  std::vector<ReliabilityBin> bins(n_bins);
  std::vector<double> correct(n_bins, 0.0);
  std::vector<double> conf(n_bins, 0.0);
  for (const auto& r : records) {
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
      throw DomainError("confidence outside [0, 1]");
    }
    const std::size_t b = bin_index(r.confidence, n_bins);
    ++bins[b].count;
    correct[b] += r.correct ? 1.0 : 0.0;
    conf[b] += r.confidence;
  }
  for (std::size_t b = 0; b < n_bins; ++b) {
    bins[b].lower = static_cast<double>(b) / static_cast<double>(n_bins);
    bins[b].upper = static_cast<double>(b + 1) / static_cast<double>(n_bins);
    const double n = static_cast<double>(bins[b].count);
    bins[b].accuracy = bins[b].count ? correct[b] / n : kNaN;
    bins[b].confidence = bins[b].count ? conf[b] / n : kNaN;
  }
  return bins;
}

double ece(std::span<const PredictionRecord> records, std::size_t n_bins) {
  if (records.empty()) throw DomainError("ECE of an empty record set");
  const auto bins = reliability_bins(records, n_bins);
  const double total = static_cast<double>(records.size());
  double err = 0.0;
  for (const auto& bin : bins) {
    if (bin.count == 0) continue;
    err += static_cast<double>(bin.count) / total * std::abs(bin.accuracy - bin.confidence);
  }
  return err;
}

double auroc(std::span<const double> id_scores, std::span<const double> ood_scores) {
  if (id_scores.empty() || ood_scores.empty()) throw DomainError("AUROC needs both score sets");
  // Rank-sum (Mann-Whitney U) with average ranks for ties.
  struct Item {
    double score;
    bool ood;
  };
  std::vector<Item> items;
  items.reserve(id_scores.size() + ood_scores.size());
  for (double s : id_scores) items.push_back({s, false});
  for (double s : ood_scores) items.push_back({s, true});
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score < b.score; });

  double ood_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    while (j < items.size() && items[j].score == items[i].score) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (items[t].ood) ood_rank_sum += avg_rank;
    }
    i = j;
  }
  const double n_ood = static_cast<double>(ood_scores.size());
  const double n_id = static_cast<double>(id_scores.size());
  const double u = ood_rank_sum - n_ood * (n_ood + 1.0) / 2.0;
  return u / (n_ood * n_id);
}

std::vector<AccuracyVacuityPoint> accuracy_vacuity_curve(std::span<const PredictionRecord> records,
                                                         std::span<const double> thresholds) {
  std::vector<AccuracyVacuityPoint> curve;
  curve.reserve(thresholds.size());
  const double total = static_cast<double>(records.size());
  for (double tau : thresholds) {
    std::size_t kept = 0;
    std::size_t hits = 0;
    for (const auto& r : records) {
      if (r.vacuity <= tau) {
        ++kept;
        hits += r.correct ? 1 : 0;
      }
    }
    AccuracyVacuityPoint pt;
    pt.threshold = tau;
    pt.coverage = records.empty() ? 0.0 : static_cast<double>(kept) / total;
    pt.accuracy = kept ? static_cast<double>(hits) / static_cast<double>(kept) : kNaN;
    curve.push_back(pt);
  }
  return curve;
}

std::vector<TopKAccuracy> topk_confident_accuracy(std::span<const PredictionRecord> records,
                                                  std::span<const double> fractions) {
  if (records.empty()) throw DomainError("top-K accuracy of an empty record set");
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].vacuity < records[b].vacuity;
  });

  std::vector<TopKAccuracy> out;
  out.reserve(fractions.size());
  const double n = static_cast<double>(records.size());
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw DomainError("top-K fraction must lie in (0, 1]");
    // The epsilon keeps e.g. 0.3 * 10 from rounding up to 4.
    auto take = static_cast<std::size_t>(std::ceil(f * n - 1e-9));
    take = std::clamp<std::size_t>(take, 1, records.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < take; ++i) hits += records[order[i]].correct ? 1 : 0;
    out.push_back({f, static_cast<double>(hits) / static_cast<double>(take)});
  }
  return out;
}

}  // namespace evcore
