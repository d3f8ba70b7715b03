#include "evcore/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evcore/codebook.hpp"
#include "evcore/data.hpp"
#include "evcore/error.hpp"
#include "evcore/experiments.hpp"
#include "evcore/serialization.hpp"
#include "evcore/table.hpp"
#include "evcore/trainer.hpp"
#include "evcore/uncertainty.hpp"

namespace evcore::cli {
namespace {

// Offsets added to --seed for the independent streams a command draws from.
constexpr std::uint64_t kTestSeedOffset = 1000;
constexpr std::uint64_t kNoiseSeedOffset = 2000;
constexpr std::uint64_t kShiftSeedOffset = 3000;

struct TrainOptions {
  std::string loss = "log";
  std::string act = "exp";
  double lambda1 = 0.0;
  std::string cor_reg = "off";
  int anneal = 10;
  int epochs = 50;
  double lr = 0.01;
  std::size_t batch = 32;
  std::string optimizer = "adam";
  double momentum = 0.0;
  std::vector<std::size_t> hidden{32};
  std::string hidden_act = "tanh";
  double adv_eps = 0.0;
  std::string load;
  std::string save;
};

struct DataOptions {
  std::size_t classes = 10;
  std::size_t per_class = 100;
  double spread = 1.0;
  double sep = 4.0;
  std::size_t dim = 10;
  double label_noise = 0.0;
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  std::size_t limit = 0;
};

struct CommonOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
};

// Results go to --out when given, otherwise to the caller's stream. Summary
// lines follow the CSV on stdout only when the CSV went to a file.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& out, std::ostream& err) : out_(out), err_(err) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error("cannot open " + path + " for writing");
    }
  }
  std::ostream& csv() { return file_ ? *file_ : out_; }
  std::ostream& summary() { return file_ ? out_ : err_; }

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::unique_ptr<std::ofstream> file_;
};

void add_common(CLI::App* app, CommonOptions& common, bool seed_required) {
  auto* seed = app->add_option("--seed", common.seed, "RNG seed");
  if (seed_required) seed->required();
  app->add_option("--out", common.out, "CSV output path (stdout when empty)");
  app->add_option("--config", common.config, "flat key=value file; flags override it");
}

void add_train_options(CLI::App* app, TrainOptions& t) {
  app->add_option("--loss", t.loss, "evidential loss")->check(CLI::IsMember({"mse", "ce", "log"}));
  app->add_option("--act", t.act, "evidence activation")
      ->check(CLI::IsMember({"relu", "softplus", "exp", "selu"}));
  app->add_option("--lambda1", t.lambda1, "incorrect-evidence KL weight")->check(CLI::NonNegativeNumber);
  app->add_option("--cor-reg", t.cor_reg, "correct-evidence regularizer")->check(CLI::IsMember({"on", "off"}));
  app->add_option("--anneal", t.anneal, "epochs until the KL weight reaches lambda1")
      ->check(CLI::PositiveNumber);
  app->add_option("--epochs", t.epochs, "training epochs")->check(CLI::PositiveNumber);
  app->add_option("--lr", t.lr, "learning rate")->check(CLI::NonNegativeNumber);
  app->add_option("--batch", t.batch, "mini-batch size")->check(CLI::PositiveNumber);
  app->add_option("--optimizer", t.optimizer, "optimizer")->check(CLI::IsMember({"sgd", "adam"}));
  app->add_option("--momentum", t.momentum, "SGD momentum")->check(CLI::Range(0.0, 1.0));
  app->add_option("--hidden", t.hidden, "hidden layer widths")->delimiter(',')->check(CLI::PositiveNumber);
  app->add_option("--hidden-act", t.hidden_act, "hidden nonlinearity")
      ->check(CLI::IsMember({"tanh", "relu"}));
  app->add_option("--adv-eps", t.adv_eps, "train on FGSM inputs with this epsilon (0 = off)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--load", t.load, "start from this checkpoint instead of a random init");
  app->add_option("--save", t.save, "write the trained network checkpoint here");
}

void add_data_options(CLI::App* app, DataOptions& d) {
  app->add_option("--classes", d.classes, "blob classes")->check(CLI::Range(2, 100000));
  app->add_option("--per-class", d.per_class, "blob samples per class")->check(CLI::PositiveNumber);
  app->add_option("--spread", d.spread, "blob standard deviation")->check(CLI::PositiveNumber);
  app->add_option("--sep", d.sep, "distance between neighbouring blob centers")->check(CLI::NonNegativeNumber);
  app->add_option("--dim", d.dim, "blob input dimension")->check(CLI::PositiveNumber);
  app->add_option("--label-noise", d.label_noise, "fraction of training labels flipped")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--train-images", d.train_images, "IDX image file (replaces blobs)");
  app->add_option("--train-labels", d.train_labels, "IDX label file");
  app->add_option("--test-images", d.test_images, "IDX test image file");
  app->add_option("--test-labels", d.test_labels, "IDX test label file");
  app->add_option("--limit", d.limit, "max IDX samples to load (0 = all)");
}

TrainConfig make_train_config(const TrainOptions& t, std::uint64_t seed) {
  TrainConfig tc;
  tc.loss = parse_loss(t.loss);
  tc.activation = parse_activation(t.act);
  tc.reg.lambda1 = t.lambda1;
  tc.reg.use_correct_reg = t.cor_reg == "on";
  tc.reg.anneal_epochs = t.anneal;
  if (t.optimizer == "sgd") {
    tc.optimizer = Sgd{t.lr, t.momentum};
  } else {
    Adam adam;
    adam.lr = t.lr;
    tc.optimizer = adam;
  }
  tc.epochs = t.epochs;
  tc.batch_size = t.batch;
  tc.seed = seed;
  tc.adversarial_eps = t.adv_eps;
  tc.validate();
  return tc;
}

struct Datasets {
  LabeledDataset train;
  LabeledDataset test;
};

Datasets make_datasets(const DataOptions& d, std::uint64_t seed) {
  Datasets out;
  if (!d.train_images.empty() || !d.train_labels.empty()) {
    if (d.train_images.empty() || d.train_labels.empty()) {
      throw DomainError("--train-images and --train-labels go together");
    }
    out.train = idx_load(d.train_images, d.train_labels, d.limit);
    if (d.test_images.empty() != d.test_labels.empty()) {
      throw DomainError("--test-images and --test-labels go together");
    }
    out.test = d.test_images.empty() ? out.train : idx_load(d.test_images, d.test_labels, d.limit);
    out.test.class_count = out.train.class_count = std::max(out.train.class_count, out.test.class_count);
  } else {
    out.train = gaussian_blobs(d.classes, d.per_class, d.spread, d.sep, d.dim, seed);
    out.test = gaussian_blobs(d.classes, d.per_class, d.spread, d.sep, d.dim, seed + kTestSeedOffset);
  }
  if (d.label_noise > 0.0) out.train = with_label_noise(out.train, d.label_noise, seed + kNoiseSeedOffset);
  return out;
}

DenseNet make_net(const TrainOptions& t, const LabeledDataset& data, std::uint64_t seed) {
  if (!t.load.empty()) {
    DenseNet net = load_network(t.load);
    if (net.input_dim() != data.dim() || net.output_dim() != data.class_count) {
      throw DimensionError("checkpoint " + t.load + " does not match the dataset shape");
    }
    return net;
  }
  std::vector<std::size_t> dims{data.dim()};
  dims.insert(dims.end(), t.hidden.begin(), t.hidden.end());
  dims.push_back(data.class_count);
  return init(dims, parse_nonlinearity(t.hidden_act), InitSpec{UniformScaled{}, seed});
}

TrainResult train_from_options(const TrainOptions& t, const Datasets& data, std::uint64_t seed) {
  const TrainConfig tc = make_train_config(t, seed);
  TrainResult result = train(make_net(t, data.train, seed), data.train, data.test, tc);
  if (!t.save.empty()) save_network(t.save, result.net);
  return result;
}

// Reads `key = value` lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string();
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return entries;
}

bool flag_given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

std::optional<std::string> flag_value(const std::vector<std::string>& args, const std::string& flag) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == flag && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind(flag + "=", 0) == 0) return args[i].substr(flag.size() + 1);
  }
  return std::nullopt;
}

// Config entries become ordinary arguments placed before the command line
// ones, skipping any flag the command line already sets.
void merge_config(CLI::App& app, std::vector<std::string>& args) {
  if (args.empty()) return;
  CLI::App* sub = app.get_subcommand_no_throw(args.front());
  if (sub == nullptr) return;
  const auto path = flag_value(args, "--config");
  if (!path) return;
  std::vector<std::string> extra;
  for (const auto& [key, value] : read_config(*path)) {
    const std::string flag = "--" + key;
    if (key == "config" || key == "help" || sub->get_option_no_throw(flag) == nullptr) {
      throw DomainError("config " + *path + ": unknown key '" + key + "' for " + args.front());
    }
    if (flag_given(args, flag)) continue;
    extra.push_back(flag);
    extra.push_back(value);
  }
  args.insert(args.begin() + 1, extra.begin(), extra.end());
}

void write_history(std::ostream& out, const TrainHistory& history) {
  CsvWriter csv(out, {"epoch", "train_loss", "train_accuracy", "test_accuracy", "mean_vacuity",
                      "frozen_sample_count"});
  for (const auto& e : history.epochs) {
    csv.field(e.epoch);
    csv.field(e.train_loss);
    csv.field(e.train_accuracy);
    csv.field(e.test_accuracy);
    csv.field(e.mean_vacuity);
    csv.field(e.frozen_sample_count);
    csv.end_row();
  }
}

std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int i = 1; i <= 10; ++i) t.push_back(i / 10.0);
  return t;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evidential classification toolkit", "evcore"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  CommonOptions common;
  TrainOptions topts;
  DataOptions dopts;

  auto* train_cmd = app.add_subcommand("train", "train a network and write its per-epoch history");
  auto* grad_cmd = app.add_subcommand("grad-check", "compare backward against finite differences");
  auto* stag_cmd = app.add_subcommand("stagnation", "zero-evidence stagnation on the four-point toy set");
  auto* sweep_cmd = app.add_subcommand("reg-sweep", "baseline vs correct-evidence reg across lambda1");
  auto* accv_cmd = app.add_subcommand("acc-vacuity", "accuracy vs vacuity threshold on the test set");
  auto* cal_cmd = app.add_subcommand("calibration", "reliability bins and ECE on the test set");
  auto* ood_cmd = app.add_subcommand("ood", "AUROC of 1 - max p(y) against shifted test data");
  auto* atk_cmd = app.add_subcommand("attack", "test accuracy and vacuity under FGSM");
  auto* cb_cmd = app.add_subcommand("codebook-demo", "uncertainty-guided top-t codebook selection");
  auto* gen_cmd = app.add_subcommand("gen-data", "write a synthetic dataset as CSV");

  for (auto* sub : {train_cmd, sweep_cmd, accv_cmd, cal_cmd, ood_cmd, atk_cmd}) {
    sub->option_defaults()->always_capture_default();
    add_common(sub, common, true);
    add_train_options(sub, topts);
    add_data_options(sub, dopts);
  }

  std::size_t trials = 50;
  double fd_step = 1e-6;
  double tolerance = 1e-5;
  grad_cmd->option_defaults()->always_capture_default();
  add_common(grad_cmd, common, true);
  grad_cmd->add_option("--trials", trials, "random configurations")->check(CLI::PositiveNumber);
  grad_cmd->add_option("--fd-step", fd_step, "central difference step")->check(CLI::PositiveNumber);
  grad_cmd->add_option("--tol", tolerance, "pass threshold on the max relative error");

  StagnationConfig stag;
  stag_cmd->option_defaults()->always_capture_default();
  common.seed = stag.seed;
  add_common(stag_cmd, common, false);
  stag_cmd->add_option("--epochs", stag.epochs, "training epochs")->check(CLI::PositiveNumber);
  stag_cmd->add_option("--lr", stag.lr, "SGD learning rate")->check(CLI::NonNegativeNumber);
  stag_cmd->add_option("--frozen-logit", stag.frozen_logit, "initial logit of the frozen samples");

  std::vector<double> lambdas{0.0, 0.1, 1.0, 10.0};
  sweep_cmd->add_option("--lambdas", lambdas, "lambda1 values")->delimiter(',');

  std::vector<double> thresholds = default_thresholds();
  std::vector<double> fractions;
  accv_cmd->add_option("--thresholds", thresholds, "vacuity thresholds")->delimiter(',');
  accv_cmd->add_option("--topk", fractions, "report top-K% confident accuracy at these fractions instead")
      ->delimiter(',');

  std::size_t bins = 10;
  cal_cmd->add_option("--bins", bins, "reliability bins")->check(CLI::PositiveNumber);

  double shift = 10.0;
  double ood_noise = 0.0;
  ood_cmd->add_option("--shift", shift, "OOD translation magnitude")->check(CLI::PositiveNumber);
  ood_cmd->add_option("--ood-noise", ood_noise, "extra noise std on OOD inputs")->check(CLI::NonNegativeNumber);

  std::vector<double> eps{0.0, 0.05};
  atk_cmd->add_option("--eps", eps, "FGSM strengths")->delimiter(',');

  std::size_t cb_k = 3;
  std::size_t cb_d = 2;
  std::size_t cb_t = 2;
  double vthr = 0.0;
  std::vector<double> evidence;
  std::string codebook_path;
  cb_cmd->option_defaults()->always_capture_default();
  cb_cmd->add_option("--k", cb_k, "codebook items")->check(CLI::PositiveNumber);
  cb_cmd->add_option("--d", cb_d, "code dimension")->check(CLI::PositiveNumber);
  cb_cmd->add_option("--t", cb_t, "top-t items")->check(CLI::PositiveNumber);
  cb_cmd->add_option("--vthr", vthr, "vacuity threshold")->check(CLI::Range(0.0, 1.0));
  cb_cmd->add_option("--evidence", evidence, "evidence vector (default 4,1,0,...)")->delimiter(',');
  cb_cmd->add_option("--codebook", codebook_path, "codebook CSV (default c_i[j] = i*d + j + 1)");
  cb_cmd->add_option("--out", common.out, "CSV output path (stdout when empty)");
  cb_cmd->add_option("--config", common.config, "flat key=value file; flags override it");

  std::string kind = "blobs";
  gen_cmd->option_defaults()->always_capture_default();
  add_common(gen_cmd, common, true);
  add_data_options(gen_cmd, dopts);
  gen_cmd->add_option("--kind", kind, "dataset")->check(CLI::IsMember({"blobs", "toy", "shifted"}));
  gen_cmd->add_option("--shift", shift, "translation for --kind shifted")->check(CLI::PositiveNumber);

  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

  try {
    merge_config(app, args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    out << sub->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    Sink sink(common.out, out, err);

    if (*train_cmd) {
      const Datasets data = make_datasets(dopts, common.seed);
      const TrainResult result = train_from_options(topts, data, common.seed);
      write_history(sink.csv(), result.history);
    } else if (*grad_cmd) {
      const GradCheckResult r = run_grad_check(trials, common.seed, fd_step);
      CsvWriter csv(sink.csv(), {"trials", "parameters", "max_relative_error"});
      csv.field(r.trials);
      csv.field(r.parameters);
      csv.field(r.max_error);
      csv.end_row();
      if (!(r.max_error <= tolerance)) {
        err << "max relative error " << r.max_error << " exceeds " << tolerance << "\n";
        return 1;
      }
    } else if (*stag_cmd) {
      stag.seed = common.seed;
      const StagnationReport report = stagnation_experiment(stag);
      CsvWriter csv(sink.csv(), {"epoch", "sample_id", "total_evidence", "grad_norm", "variant"});
      for (const auto& row : report.rows) {
        csv.field(row.epoch);
        csv.field(row.sample_id);
        csv.field(row.total_evidence);
        csv.field(row.grad_norm);
        csv.field(row.variant);
        csv.end_row();
      }
      for (const auto* s : {&report.evidential, &report.gred}) {
        sink.summary() << s->variant << ": final_accuracy=" << s->final_accuracy
                       << " epochs_to_full_fit=" << s->epochs_to_full_fit
                       << " frozen_throughout=" << (s->frozen_throughout ? "yes" : "no") << "\n";
      }
    } else if (*sweep_cmd) {
      const Datasets data = make_datasets(dopts, common.seed);
      const TrainConfig tc = make_train_config(topts, common.seed);
      const auto rows =
          regularization_sweep(lambdas, tc, make_net(topts, data.train, common.seed), data.train, data.test);
      CsvWriter csv(sink.csv(), {"lambda1", "variant", "test_accuracy", "mean_vacuity"});
      for (const auto& row : rows) {
        csv.field(row.lambda1);
        csv.field(row.variant);
        csv.field(row.test_accuracy);
        csv.field(row.mean_vacuity);
        csv.end_row();
      }
    } else if (*accv_cmd) {
      const Datasets data = make_datasets(dopts, common.seed);
      const TrainResult result = train_from_options(topts, data, common.seed);
      const auto records = predict_records(result.net, data.test, parse_activation(topts.act));
      if (!fractions.empty()) {
        CsvWriter csv(sink.csv(), {"fraction", "accuracy"});
        for (const auto& p : topk_confident_accuracy(records, fractions)) {
          csv.field(p.fraction);
          csv.field(p.accuracy);
          csv.end_row();
        }
      } else {
        CsvWriter csv(sink.csv(), {"threshold", "accuracy", "coverage"});
        for (const auto& p : accuracy_vacuity_curve(records, thresholds)) {
          csv.field(p.threshold);
          csv.field(p.accuracy);
          csv.field(p.coverage);
          csv.end_row();
        }
      }
    } else if (*cal_cmd) {
      const Datasets data = make_datasets(dopts, common.seed);
      const TrainResult result = train_from_options(topts, data, common.seed);
      const auto records = predict_records(result.net, data.test, parse_activation(topts.act));
      CsvWriter csv(sink.csv(), {"bin_lower", "bin_upper", "count", "accuracy", "confidence"});
      for (const auto& b : reliability_bins(records, bins)) {
        csv.field(b.lower);
        csv.field(b.upper);
        csv.field(b.count);
        csv.field(b.accuracy);
        csv.field(b.confidence);
        csv.end_row();
      }
      sink.summary() << "ece=" << ece(records, bins) << "\n";
    } else if (*ood_cmd) {
      const Datasets data = make_datasets(dopts, common.seed);
      const TrainResult result = train_from_options(topts, data, common.seed);
      const LabeledDataset ood = ood_shift(data.test, shift, common.seed + kShiftSeedOffset, ood_noise);
      const OodResult r = ood_experiment(result.net, parse_activation(topts.act), data.test, ood);
      CsvWriter csv(sink.csv(), {"sample_id", "set", "score"});
      for (std::size_t i = 0; i < r.id_scores.size(); ++i) {
        csv.field(i);
        csv.field("id");
        csv.field(r.id_scores[i]);
        csv.end_row();
      }
      for (std::size_t i = 0; i < r.ood_scores.size(); ++i) {
        csv.field(i);
        csv.field("ood");
        csv.field(r.ood_scores[i]);
        csv.end_row();
      }
      sink.summary() << "auroc=" << r.auroc << "\n";
    } else if (*atk_cmd) {
      const Datasets data = make_datasets(dopts, common.seed);
      const TrainResult result = train_from_options(topts, data, common.seed);
      const TrainConfig tc = make_train_config(topts, common.seed);
      const Objective objective = tc.objective(tc.epochs);
      CsvWriter csv(sink.csv(), {"eps", "accuracy", "mean_vacuity"});
      for (double e : eps) {
        if (!(e >= 0.0)) throw DomainError("--eps values must be >= 0");
        LabeledDataset attacked = data.test;
        for (std::size_t i = 0; i < attacked.size(); ++i) {
          attacked.inputs[i] = fgsm_attack(result.net, data.test.inputs[i], data.test.labels[i], e, objective);
        }
        const auto records = predict_records(result.net, attacked, tc.activation);
        double correct = 0.0;
        double vac = 0.0;
        for (const auto& r : records) {
          correct += r.correct ? 1.0 : 0.0;
          vac += r.vacuity;
        }
        csv.field(e);
        csv.field(correct / static_cast<double>(records.size()));
        csv.field(vac / static_cast<double>(records.size()));
        csv.end_row();
      }
    } else if (*cb_cmd) {
      std::optional<Codebook> book;
      if (!codebook_path.empty()) {
        std::ifstream in(codebook_path);
        if (!in) throw Error("cannot open " + codebook_path);
        book = read_codebook_csv(in);
      } else {
        std::vector<double> items(cb_k * cb_d);
        for (std::size_t i = 0; i < cb_k; ++i) {
          for (std::size_t j = 0; j < cb_d; ++j) items[i * cb_d + j] = static_cast<double>(i * cb_d + j + 1);
        }
        book = Codebook(cb_k, cb_d, std::move(items));
      }
      if (evidence.empty()) {
        evidence.assign(book->size(), 0.0);
        evidence[0] = 4.0;
        if (evidence.size() > 1) evidence[1] = 1.0;
      }
      const auto code = select_code(EvidenceVector(evidence), *book, SelectionConfig{cb_t, vthr});
      std::vector<std::string> header;
      for (std::size_t j = 0; j < code.size(); ++j) header.push_back("d" + std::to_string(j));
      CsvWriter csv(sink.csv(), header);
      for (double v : code) csv.field(v);
      csv.end_row();
    } else if (*gen_cmd) {
      LabeledDataset data;
      if (kind == "toy") {
        data = four_point_toy(common.seed);
      } else {
        data = make_datasets(dopts, common.seed).train;
        if (kind == "shifted") data = ood_shift(data, shift, common.seed + kShiftSeedOffset);
      }
      write_dataset_csv(sink.csv(), data);
    }
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace evcore::cli
