#include "evcore/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "evcore/error.hpp"
#include "evcore/rng.hpp"

namespace evcore {
namespace {

// Runs fn(i) for i in [0, n) over static contiguous chunks. Results must be
// written to per-index slots by fn; the first exception (lowest chunk) wins.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        const std::size_t end = std::min(n, (w + 1) * chunk);
        for (std::size_t i = w * chunk; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

class Optimizer {
 public:
  Optimizer(const std::variant<Sgd, Adam>& kind, const DenseNet& net)
      : kind_(kind), first_(net.zero_gradient()), second_(net.zero_gradient()) {}

  void step(DenseNet& net, const ParamGradient& grad) {
    if (const auto* sgd = std::get_if<Sgd>(&kind_)) {
      if (sgd->momentum == 0.0) {
        net.apply_update(grad, -sgd->lr);
        return;
      }
      first_ *= sgd->momentum;
      first_ += grad;
      net.apply_update(first_, -sgd->lr);
      return;
    }
    const Adam& adam = std::get<Adam>(kind_);
    ++t_;
    const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(t_));
    ParamGradient update = net.zero_gradient();
    for (std::size_t l = 0; l < grad.layers.size(); ++l) {
      auto run = [&](const std::vector<double>& g, std::vector<double>& m, std::vector<double>& v,
                     std::vector<double>& u) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g[i];
          v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g[i] * g[i];
          u[i] = (m[i] / c1) / (std::sqrt(v[i] / c2) + adam.eps);
        }
      };
      run(grad.layers[l].weights, first_.layers[l].weights, second_.layers[l].weights,
          update.layers[l].weights);
      run(grad.layers[l].biases, first_.layers[l].biases, second_.layers[l].biases,
          update.layers[l].biases);
    }
    net.apply_update(update, -adam.lr);
  }

 private:
  std::variant<Sgd, Adam> kind_;
  ParamGradient first_;
  ParamGradient second_;
  std::uint64_t t_ = 0;
};

double mean_vacuity(const std::vector<PredictionRecord>& records) {
  double sum = 0.0;
  for (const auto& r : records) sum += r.vacuity;
  return records.empty() ? std::numeric_limits<double>::quiet_NaN()
                         : sum / static_cast<double>(records.size());
}

double record_accuracy(const std::vector<PredictionRecord>& records) {
  if (records.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t hits = 0;
  for (const auto& r : records) hits += r.correct ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

}  // namespace

std::size_t worker_count() {
  if (const char* env = std::getenv("EVCORE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void TrainConfig::validate() const {
  reg.validate();
  if (epochs < 1) throw DomainError("epochs must be >= 1");
  if (batch_size < 1) throw DomainError("batch size must be >= 1");
  if (!(adversarial_eps >= 0.0)) throw DomainError("adversarial epsilon must be >= 0");
  const double lr = std::visit([](const auto& o) { return o.lr; }, optimizer);
  // lr == 0 is accepted as a null update.
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw DomainError("learning rate must be >= 0");
  if (const auto* adam = std::get_if<Adam>(&optimizer)) {
    if (!(adam->beta1 >= 0.0 && adam->beta1 < 1.0 && adam->beta2 >= 0.0 && adam->beta2 < 1.0) ||
        !(adam->eps > 0.0)) {
      throw DomainError("invalid Adam hyper-parameters");
    }
  }
}

Objective TrainConfig::objective(int epoch) const {
  return Objective{loss, activation, reg, epoch};
}

std::vector<PredictionRecord> predict_records(const DenseNet& net, const LabeledDataset& data,
                                              ActivationKind activation) {
  std::vector<PredictionRecord> records(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    const EvidenceVector evidence = activate(activation, forward(net, data.inputs[i]));
    records[i] = prediction_record(evidence, data.labels[i].gt_index());
  });
  return records;
}

double accuracy(const DenseNet& net, const LabeledDataset& data, ActivationKind activation) {
  return record_accuracy(predict_records(net, data, activation));
}

std::vector<double> fgsm_attack(const DenseNet& net, std::span<const double> input,
                                const OneHotLabel& label, double epsilon, const Objective& objective) {
  if (!(epsilon >= 0.0)) throw DomainError("FGSM epsilon must be >= 0");
  std::vector<double> out(input.begin(), input.end());
  if (epsilon == 0.0) return out;
  const BackwardResult res = backward(net, input, label, objective);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double g = res.input_grad[i];
    if (g > 0.0) out[i] += epsilon;
    else if (g < 0.0) out[i] -= epsilon;
  }
  return out;
}

TrainResult train(DenseNet net, const LabeledDataset& data, const LabeledDataset& test,
                  const TrainConfig& config, const EpochObserver& observer) {
  config.validate();
  data.validate();
  if (data.dim() != net.input_dim()) {
    throw DimensionError("dataset has " + std::to_string(data.dim()) + " features, network expects " +
                         std::to_string(net.input_dim()));
  }
  if (data.class_count != net.output_dim()) {
    throw DimensionError("dataset has " + std::to_string(data.class_count) +
                         " classes, network emits " + std::to_string(net.output_dim()));
  }
  const bool has_test = test.size() > 0;
  if (has_test) {
    test.validate();
    if (test.dim() != net.input_dim()) throw DimensionError("test set feature count mismatch");
  }

  Optimizer optimizer(config.optimizer, net);
  TrainResult result;
  result.history.epochs.reserve(static_cast<std::size_t>(config.epochs));

  std::vector<std::size_t> order(data.size());
  std::vector<BackwardResult> per_sample;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (observer) observer(epoch, net);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng = Rng::derive(config.seed, static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    const Objective objective = config.objective(epoch);
    double loss_sum = 0.0;
    std::size_t frozen = 0;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::size_t batch = end - start;
      per_sample.assign(batch, BackwardResult{});
      parallel_for(batch, [&](std::size_t b) {
        const std::size_t idx = order[start + b];
        try {
          const auto& label = data.labels[idx];
          if (config.adversarial_eps > 0.0) {
            const auto adv = fgsm_attack(net, data.inputs[idx], label, config.adversarial_eps, objective);
            per_sample[b] = backward(net, adv, label, objective);
          } else {
            per_sample[b] = backward(net, data.inputs[idx], label, objective);
          }
        } catch (const NumericalError& e) {
          throw NumericalError("epoch " + std::to_string(epoch) + ", sample " + std::to_string(idx) +
                               ": " + e.what());
        }
      });

      // Fixed-order reduction keeps results independent of the thread count.
      ParamGradient grad = net.zero_gradient();
      for (const auto& r : per_sample) {
        grad += r.grad;
        loss_sum += r.loss;
        if (r.grad.max_abs() < kFrozenGradThreshold) ++frozen;
      }
      grad *= 1.0 / static_cast<double>(batch);
      optimizer.step(net, grad);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(data.size());
    stats.frozen_sample_count = frozen;
    const auto train_records = predict_records(net, data, config.activation);
    stats.train_accuracy = record_accuracy(train_records);
    if (has_test) {
      const auto test_records = predict_records(net, test, config.activation);
      stats.test_accuracy = record_accuracy(test_records);
      stats.mean_vacuity = mean_vacuity(test_records);
    } else {
      stats.test_accuracy = std::numeric_limits<double>::quiet_NaN();
      stats.mean_vacuity = mean_vacuity(train_records);
    }
    result.history.epochs.push_back(stats);
  }
  result.net = std::move(net);
  return result;
}

}  // namespace evcore
