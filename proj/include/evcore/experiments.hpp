#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evcore/data.hpp"
#include "evcore/network.hpp"
#include "evcore/rng.hpp"
#include "evcore/trainer.hpp"

namespace evcore {

// ---------------------------------------------------------------------------
// Zero-evidence stagnation on the four-point toy set.
//
// A single 4x4 layer is initialised so that samples 0 and 1 produce some
// (misplaced) positive evidence while samples 2 and 3 produce strictly
// negative logits on every class. The same init is trained twice with ReLU
// evidence and the MSE evidential loss: once bare ("evidential") and once with
// the correct-evidence regularizer ("gred").
// ---------------------------------------------------------------------------

struct StagnationConfig {
  double lr = 0.1;
  int epochs = 500;
  std::uint64_t seed = 7;
  double frozen_logit = -5.0;  // initial weight from frozen inputs to every class
};

struct StagnationRow {
  int epoch = 0;  // state at the start of `epoch`; epoch == epochs is the final state
  std::size_t sample_id = 0;
  double total_evidence = 0.0;
  double grad_norm = 0.0;
  std::string variant;
};

struct StagnationSummary {
  std::string variant;
  double final_accuracy = 0.0;
  // Epochs (counted from 1) until train accuracy first hit 100%, -1 if never.
  int epochs_to_full_fit = -1;
  std::vector<std::size_t> frozen_per_epoch;  // history frozen_sample_count
  // For the samples that start frozen: were they exactly zero-gradient at every
  // recorded state, and the largest logit they ever produced.
  bool frozen_throughout = true;
  double max_frozen_logit = 0.0;
};

struct StagnationReport {
  std::vector<StagnationRow> rows;
  StagnationSummary evidential;
  StagnationSummary gred;
  std::vector<std::size_t> initially_frozen;
};

DenseNet stagnation_init(double frozen_logit);
StagnationReport stagnation_experiment(const StagnationConfig& config);

// ---------------------------------------------------------------------------
// Incorrect-evidence regularization sweep.
// ---------------------------------------------------------------------------

struct SweepRow {
  double lambda1 = 0.0;
  std::string variant;  // "baseline" or "gred"
  double test_accuracy = 0.0;
  double mean_vacuity = 0.0;
};

// Trains both variants from `init_net` for every lambda1; `config.reg.lambda1`
// and `use_correct_reg` are overridden.
std::vector<SweepRow> regularization_sweep(std::span<const double> lambdas, const TrainConfig& config,
                                           const DenseNet& init_net, const LabeledDataset& data,
                                           const LabeledDataset& test);

// ---------------------------------------------------------------------------
// OOD detection with the score 1 - max expected probability.
// ---------------------------------------------------------------------------

struct OodResult {
  double auroc = 0.5;
  std::vector<double> id_scores;
  std::vector<double> ood_scores;
};

OodResult ood_experiment(const DenseNet& net, ActivationKind activation, const LabeledDataset& id_data,
                         const LabeledDataset& ood_data);

// ---------------------------------------------------------------------------
// Analytic backward vs central finite differences on random configurations.
// ---------------------------------------------------------------------------

struct GradCheckCase {
  DenseNet net;
  std::vector<double> input;
  OneHotLabel label{0, 2};
  Objective objective;
};

// Random small network/sample/objective away from every kink (ReLU hidden
// units, ReLU/SELU evidence, the correct-evidence indicator).
GradCheckCase random_grad_check_case(Rng& rng);

struct GradCheckResult {
  std::size_t trials = 0;
  std::size_t parameters = 0;
  double max_error = 0.0;  // max scaled_error over every parameter
};

GradCheckResult run_grad_check(std::size_t trials, std::uint64_t seed, double h = 1e-6);

}  // namespace evcore
