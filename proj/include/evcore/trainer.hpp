#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "evcore/data.hpp"
#include "evcore/network.hpp"
#include "evcore/uncertainty.hpp"

namespace evcore {

struct Sgd {
  double lr = 0.1;
  double momentum = 0.0;
};

struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  LossKind loss = LossKind::EvidLog;
  ActivationKind activation = ActivationKind::Exp;
  RegularizationConfig reg;
  std::variant<Sgd, Adam> optimizer = Sgd{};
  int epochs = 100;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  // When > 0 every training input is replaced by its FGSM perturbation.
  double adversarial_eps = 0.0;

  void validate() const;
  Objective objective(int epoch) const;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;  // mean combined loss over the epoch's samples
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;  // NaN without a test set
  double mean_vacuity = 0.0;   // over the test set, or the train set without one
  std::size_t frozen_sample_count = 0;  // per-sample grad norm < 1e-10
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
};

struct TrainResult {
  DenseNet net;
  TrainHistory history;
};

inline constexpr double kFrozenGradThreshold = 1e-10;

// Called with the epoch index and the parameters the epoch starts from.
using EpochObserver = std::function<void(int epoch, const DenseNet& net)>;

// Mini-batch training on the batch-mean gradient of the combined loss. The
// shuffle for epoch e is drawn from Rng::derive(seed, e).
TrainResult train(DenseNet net, const LabeledDataset& data, const LabeledDataset& test,
                  const TrainConfig& config, const EpochObserver& observer = {});

// x' = x + eps * sign(dL/dx), sign(0) = 0.
std::vector<double> fgsm_attack(const DenseNet& net, std::span<const double> input,
                                const OneHotLabel& label, double epsilon, const Objective& objective);

std::vector<PredictionRecord> predict_records(const DenseNet& net, const LabeledDataset& data,
                                              ActivationKind activation);

double accuracy(const DenseNet& net, const LabeledDataset& data, ActivationKind activation);

// Worker threads for per-sample gradients: EVCORE_THREADS, 0 or unset = hardware.
std::size_t worker_count();

}  // namespace evcore
