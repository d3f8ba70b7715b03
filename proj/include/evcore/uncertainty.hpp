#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evcore/evidential_head.hpp"

namespace evcore {

// Subjective-logic opinion derived from one evidence vector.
struct UncertaintyReport {
  double vacuity = 1.0;
  std::vector<double> beliefs;
  std::vector<double> expected_probs;
  double dissonance = 0.0;
  std::size_t predicted_class = 0;
};

struct PredictionRecord {
  double confidence = 0.0;  // max expected probability
  bool correct = false;
  double vacuity = 1.0;
  double uncertainty_score = 0.0;  // 1 - max p(y)
};

double vacuity(const DirichletParams& params);
std::vector<double> beliefs(const EvidenceVector& evidence, const DirichletParams& params);
std::vector<double> expected_probs(const DirichletParams& params);
double dissonance(std::span<const double> beliefs);

// Index of the largest value; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> values);

UncertaintyReport uncertainty_report(const EvidenceVector& evidence);

PredictionRecord prediction_record(const EvidenceVector& evidence, std::size_t true_class);

double ece(std::span<const PredictionRecord> records, std::size_t n_bins);

struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double accuracy = 0.0;    // NaN when count == 0
  double confidence = 0.0;  // NaN when count == 0
};

std::vector<ReliabilityBin> reliability_bins(std::span<const PredictionRecord> records,
                                             std::size_t n_bins);

// P(ood > id) with ties counted one half.
double auroc(std::span<const double> id_scores, std::span<const double> ood_scores);

struct AccuracyVacuityPoint {
  double threshold = 0.0;
  double accuracy = 0.0;  // NaN when nothing is retained
  double coverage = 0.0;
};

std::vector<AccuracyVacuityPoint> accuracy_vacuity_curve(std::span<const PredictionRecord> records,
                                                         std::span<const double> thresholds);

struct TopKAccuracy {
  double fraction = 0.0;
  double accuracy = 0.0;
};

std::vector<TopKAccuracy> topk_confident_accuracy(std::span<const PredictionRecord> records,
                                                  std::span<const double> fractions);

}  // namespace evcore
