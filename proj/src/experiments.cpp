#include "evcore/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evcore/error.hpp"
#include "evcore/uncertainty.hpp"

namespace evcore {
namespace {

constexpr std::size_t kToyClasses = 4;

StagnationSummary run_stagnation_variant(const StagnationConfig& config, bool use_gred,
                                         const std::vector<std::size_t>& frozen_ids,
                                         std::vector<StagnationRow>& rows) {
  const LabeledDataset toy = four_point_toy(config.seed);
  TrainConfig tc;
  tc.loss = LossKind::EvidMSE;
  tc.activation = ActivationKind::ReLU;
  tc.reg = RegularizationConfig{0.0, use_gred, 10};
  tc.optimizer = Sgd{config.lr, 0.0};
  tc.epochs = config.epochs;
  tc.batch_size = toy.size();
  tc.seed = config.seed;

  StagnationSummary summary;
  summary.variant = use_gred ? "gred" : "evidential";
  summary.max_frozen_logit = -std::numeric_limits<double>::infinity();

  auto record = [&](int epoch, const DenseNet& net) {
    const Objective objective = tc.objective(epoch);
    for (std::size_t i = 0; i < toy.size(); ++i) {
      const BackwardResult res = backward(net, toy.inputs[i], toy.labels[i], objective);
      const EvidenceVector evidence = activate(tc.activation, LogitVector(res.logits));
      StagnationRow row;
      row.epoch = epoch;
      row.sample_id = i;
      row.total_evidence = evidence.total();
      row.grad_norm = res.grad.max_abs();
      row.variant = summary.variant;
      rows.push_back(row);
      if (std::find(frozen_ids.begin(), frozen_ids.end(), i) != frozen_ids.end()) {
        if (row.grad_norm != 0.0) summary.frozen_throughout = false;
        summary.max_frozen_logit =
            std::max(summary.max_frozen_logit, *std::max_element(res.logits.begin(), res.logits.end()));
      }
    }
  };

  TrainResult result = train(stagnation_init(config.frozen_logit), toy, LabeledDataset{}, tc, record);
  record(config.epochs, result.net);

  summary.final_accuracy = result.history.epochs.back().train_accuracy;
  for (const auto& e : result.history.epochs) {
    summary.frozen_per_epoch.push_back(e.frozen_sample_count);
    if (summary.epochs_to_full_fit < 0 && e.train_accuracy == 1.0) {
      summary.epochs_to_full_fit = e.epoch + 1;
    }
  }
  return summary;
}

}  // namespace

DenseNet stagnation_init(double frozen_logit) {
  if (!(frozen_logit < 0.0)) throw DomainError("frozen logit must be negative");
  // Column j holds the logits produced by toy input j (a unit vector).
  // Inputs 0 and 1 start with their evidence on the other class, inputs 2 and 3
  // start with every logit negative.
  const double columns[kToyClasses][kToyClasses] = {
      {0.5, 1.0, -1.0, -1.0},
      {1.0, 0.5, -1.0, -1.0},
      {frozen_logit, frozen_logit, frozen_logit, frozen_logit},
      {frozen_logit, frozen_logit, frozen_logit, frozen_logit},
  };
  DenseLayer layer;
  layer.in = kToyClasses;
  layer.out = kToyClasses;
  layer.weights.resize(kToyClasses * kToyClasses);
  layer.biases.assign(kToyClasses, 0.0);
  for (std::size_t j = 0; j < kToyClasses; ++j) {
    for (std::size_t c = 0; c < kToyClasses; ++c) layer.weight(c, j) = columns[j][c];
  }
  const std::size_t dims[] = {kToyClasses, kToyClasses};
  return init(dims, Nonlinearity::Identity, InitSpec{ExplicitInit{{layer}}, 0});
}

StagnationReport stagnation_experiment(const StagnationConfig& config) {
  if (config.epochs < 1) throw DomainError("epochs must be >= 1");
  StagnationReport report;
  report.initially_frozen = {2, 3};
  report.evidential = run_stagnation_variant(config, false, report.initially_frozen, report.rows);
  report.gred = run_stagnation_variant(config, true, report.initially_frozen, report.rows);
  return report;
}

std::vector<SweepRow> regularization_sweep(std::span<const double> lambdas, const TrainConfig& config,
                                           const DenseNet& init_net, const LabeledDataset& data,
                                           const LabeledDataset& test) {
  std::vector<SweepRow> rows;
  for (double lambda : lambdas) {
    if (!(lambda >= 0.0)) throw DomainError("lambda1 must be >= 0");
    for (bool gred : {false, true}) {
      TrainConfig tc = config;
      tc.reg.lambda1 = lambda;
      tc.reg.use_correct_reg = gred;
      const TrainResult result = train(init_net, data, test, tc);
      const auto& last = result.history.epochs.back();
      rows.push_back({lambda, gred ? "gred" : "baseline", last.test_accuracy, last.mean_vacuity});
    }
  }
  return rows;
}

OodResult ood_experiment(const DenseNet& net, ActivationKind activation, const LabeledDataset& id_data,
                         const LabeledDataset& ood_data) {
  OodResult result;
  for (const auto& r : predict_records(net, id_data, activation)) {
    result.id_scores.push_back(r.uncertainty_score);
  }
  for (const auto& r : predict_records(net, ood_data, activation)) {
    result.ood_scores.push_back(r.uncertainty_score);
  }
  result.auroc = auroc(result.id_scores, result.ood_scores);
  return result;
}

GradCheckCase random_grad_check_case(Rng& rng) {
  constexpr double kKink = 1e-4;
  constexpr LossKind kLosses[] = {LossKind::EvidMSE, LossKind::EvidCE, LossKind::EvidLog};
  constexpr ActivationKind kActs[] = {ActivationKind::ReLU, ActivationKind::SoftPlus,
                                      ActivationKind::Exp, ActivationKind::SELU};
  for (;;) {
    std::vector<std::size_t> dims;
    dims.push_back(2 + rng.below(3));
    const std::size_t hidden_layers = rng.below(3);
    for (std::size_t h = 0; h < hidden_layers; ++h) dims.push_back(2 + rng.below(4));
    const std::size_t k = 2 + rng.below(4);
    dims.push_back(k);
    const Nonlinearity hidden = rng.below(2) ? Nonlinearity::Tanh : Nonlinearity::ReLU;

    GradCheckCase c;
    c.net = init(dims, hidden, InitSpec{UniformScaled{}, rng.next_u64()});
    for (auto& layer : c.net.layers()) {
      for (double& b : layer.biases) b = rng.uniform(-0.5, 0.5);
    }
    c.input.resize(dims.front());
    for (double& x : c.input) x = rng.normal();
    c.label = OneHotLabel(rng.below(k), k);
    c.objective.loss = kLosses[rng.below(3)];
    c.objective.activation = kActs[rng.below(4)];
    c.objective.reg.lambda1 = rng.below(2) ? rng.uniform(0.0, 2.0) : 0.0;
    c.objective.reg.use_correct_reg = rng.below(2) == 1;
    c.objective.epoch = static_cast<int>(rng.below(15));

    // Reject anything within kKink of a non-differentiable point.
    bool near_kink = false;
    std::vector<double> x = c.input;
    const auto layers = c.net.layers();
    for (std::size_t l = 0; l < layers.size() && !near_kink; ++l) {
      const DenseLayer& layer = layers[l];
      std::vector<double> next(layer.out);
      for (std::size_t r = 0; r < layer.out; ++r) {
        double z = layer.biases[r];
        for (std::size_t col = 0; col < layer.in; ++col) z += layer.weight(r, col) * x[col];
        const bool last = l + 1 == layers.size();
        if (!last && layer.nonlinearity == Nonlinearity::ReLU && std::abs(z) < kKink) near_kink = true;
        if (last) {
          const bool kinked_head = c.objective.activation == ActivationKind::ReLU ||
                                   c.objective.activation == ActivationKind::SELU;
          if (kinked_head && std::abs(z) < kKink) near_kink = true;
          if (c.objective.reg.use_correct_reg && r == c.label.gt_index() && std::abs(z) < kKink) {
            near_kink = true;
          }
        }
        next[r] = layer.nonlinearity == Nonlinearity::Tanh   ? std::tanh(z)
                  : layer.nonlinearity == Nonlinearity::ReLU ? std::max(z, 0.0)
                                                             : z;
      }
      x = std::move(next);
    }
    if (!near_kink) return c;
  }
}

GradCheckResult run_grad_check(std::size_t trials, std::uint64_t seed, double h) {
  Rng rng(seed);
  GradCheckResult result;
  for (std::size_t t = 0; t < trials; ++t) {
    const GradCheckCase c = random_grad_check_case(rng);
    const auto analytic = backward(c.net, c.input, c.label, c.objective).grad.flatten();
    const auto numeric = finite_diff_grad(c.net, c.input, c.label, c.objective, h).flatten();
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      result.max_error = std::max(result.max_error, scaled_error(analytic[i], numeric[i]));
    }
    result.parameters += analytic.size();
    ++result.trials;
  }
  return result;
}

}  // namespace evcore
