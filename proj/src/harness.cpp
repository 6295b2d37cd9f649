/*
 * Copyright 2026 The polk Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "polk/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "polk/dataset.hpp"
#include "polk/diagnostics.hpp"
#include "polk/errors.hpp"
#include "polk/metrics.hpp"
#include "polk/model_io.hpp"
#include "polk/trainer.hpp"

namespace polk {

namespace {

struct TrainArgs {
  std::string task;
  std::string data;
  std::string eval;
  Index sparse_dim = 0;
  int classes = 0;
  std::string kernel = "gaussian";
  double bandwidth = 0.6;
  double offset = 1.0;
  int degree = 2;
  double eta = 6.0;
  std::string schedule = "constant";
  std::string budget = "matchedK=0.04";
  double lambda = 1e-6;
  Index batch = 32;
  int passes = 1;
  bool shuffle = false;
  std::uint64_t seed = 0;
  std::int64_t checkpoint_every = 10;
  std::string model_out;
  std::string metrics_out;
  Index max_model_order = -1;
  std::string komp = "fast";
  bool timing = false;
  // diag only
  std::string probe_out;
  double fault_epsilon_scale = 1.0;
};

void add_train_flags(CLI::App* app, TrainArgs& a) {
  app->add_option("--task", a.task, "mksvm | mlogistic | blogistic")
      ->required()
      ->check(CLI::IsMember({"mksvm", "mlogistic", "blogistic"}));
  app->add_option("--data", a.data, "training data (dense CSV unless --sparse-dim)")->required();
  app->add_option("--eval", a.eval, "evaluation data; defaults to the training data");
  app->add_option("--sparse-dim", a.sparse_dim, "read data as sparse 'label idx:val' text of this dimension")
      ->check(CLI::PositiveNumber);
  app->add_option("--classes", a.classes, "number of classes (multi-class tasks; default: largest label)");
  app->add_option("--kernel", a.kernel, "gaussian | polynomial")->check(CLI::IsMember({"gaussian", "polynomial"}));
  app->add_option("--bandwidth", a.bandwidth, "gaussian bandwidth sigma^2");
  app->add_option("--offset", a.offset, "polynomial offset b");
  app->add_option("--degree", a.degree, "polynomial degree c");
  app->add_option("--eta", a.eta, "step size (initial step size when diminishing)");
  app->add_option("--schedule", a.schedule, "constant | diminishing")
      ->check(CLI::IsMember({"constant", "diminishing"}));
  app->add_option("--budget", a.budget, "matchedK=<K> | matched-dim | fixed=<eps> | dense");
  app->add_option("--lambda", a.lambda, "regularization");
  app->add_option("--batch", a.batch, "mini-batch size");
  app->add_option("--passes", a.passes, "passes over the training data");
  app->add_flag("--shuffle", a.shuffle, "shuffle every pass with --seed");
  app->add_option("--seed", a.seed, "seed");
  app->add_option("--checkpoint-every", a.checkpoint_every, "steps between metrics rows");
  app->add_option("--model-out", a.model_out, "write the final model here");
  app->add_option("--metrics-out", a.metrics_out, "write the metrics CSV here");
  app->add_option("--max-model-order", a.max_model_order, "model order cap");
  app->add_option("--komp", a.komp, "fast | reference")->check(CLI::IsMember({"fast", "reference"}));
  app->add_flag("--timing", a.timing, "add an elapsed_seconds column to the metrics");
}

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || !std::isfinite(v)) throw UsageError("bad " + what + " '" + text + "'");
  return v;
}

BudgetRule parse_budget(const std::string& text) {
  if (text == "dense") return BudgetRule::dense();
  if (text == "matched-dim") return BudgetRule::matched_diminishing();
  if (text.rfind("matchedK=", 0) == 0) return BudgetRule::matched_constant(parse_number(text.substr(9), "K"));
  if (text.rfind("fixed=", 0) == 0) return BudgetRule::fixed(parse_number(text.substr(6), "budget"));
  throw UsageError("unknown budget '" + text + "' (matchedK=<K>, matched-dim, fixed=<eps>, dense)");
}

Dataset load_data(const std::string& path, Index sparse_dim) {
  return sparse_dim > 0 ? load_sparse_text(path, sparse_dim) : load_dense_csv(path);
}

struct Prepared {
  TrainConfig config;
  Dataset data;
  std::optional<Dataset> eval;
};

Prepared prepare(const TrainArgs& a) {
  Prepared p;
  p.data = load_data(a.data, a.sparse_dim);
  if (!a.eval.empty()) p.eval = load_data(a.eval, a.sparse_dim);

  TrainConfig& c = p.config;
  c.kernel = a.kernel == "gaussian" ? KernelSpec::gaussian(a.bandwidth) : KernelSpec::polynomial(a.offset, a.degree);
  if (a.task == "blogistic") {
    c.loss = LossKind::binary_logistic();
  } else {
    int classes = a.classes;
    if (classes == 0) classes = std::max(p.data.num_classes, p.eval ? p.eval->num_classes : 0);
    c.loss = a.task == "mksvm" ? LossKind::multi_hinge(classes) : LossKind::multi_logistic(classes);
  }
  c.lambda = a.lambda;
  c.schedule = a.schedule == "constant" ? StepSchedule::constant(a.eta) : StepSchedule::diminishing(a.eta);
  c.budget = parse_budget(a.budget);
  c.batch_size = a.batch;
  if (a.max_model_order >= 0) c.max_model_order = a.max_model_order;
  c.seed = a.seed;
  c.checkpoint_every = a.checkpoint_every;
  c.passes = a.passes;
  c.shuffle = a.shuffle;
  c.komp = a.komp == "fast" ? KompStrategy::fast : KompStrategy::reference;
  c.timing = a.timing;
  c.validate();
  return p;
}

std::string summary_line(const std::vector<MetricsRecord>& metrics) {
  const MetricsRecord& last = metrics.back();
  char buf[160];
  std::snprintf(buf, sizeof buf, "risk=%.6g error=%.4g%% order=%.4g", last.trailing_risk, last.trailing_error_pct,
                last.trailing_model_order);
  return buf;
}

void write_outputs(const TrainArgs& a, const Prepared& p, const TrainResult& result) {
  if (!a.model_out.empty()) save_model(a.model_out, Model{result.f, p.config.loss, p.config.lambda});
  if (!a.metrics_out.empty()) write_metrics_csv(a.metrics_out, result.metrics, p.config.timing);
}

int cmd_gen(const MultidistSpec& spec, const std::string& out_dir, std::ostream& out) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
  const DatasetSplit split = gen_multidist(spec);
  const std::string train_path = (fs::path(out_dir) / "train.csv").string();
  const std::string test_path = (fs::path(out_dir) / "test.csv").string();
  write_dense_csv(train_path, split.train);
  write_dense_csv(test_path, split.test);
  out << "multidist classes=" << spec.classes << " modes=" << spec.modes_per_class << " train=" << spec.n_train
      << " test=" << spec.n_test << " seed=" << spec.seed << " out=" << train_path << ',' << test_path << '\n';
  return kExitOk;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const Prepared p = prepare(a);
  const TrainResult result = train(p.config, p.data, p.eval ? &*p.eval : nullptr);
  write_outputs(a, p, result);
  out << summary_line(result.metrics) << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& model_path, const std::string& data_path, Index sparse_dim, std::ostream& out) {
  const Model model = load_model(model_path);
  const Dataset data = load_data(data_path, sparse_dim);
  if (data.dim() != model.f.dim()) {
    throw UsageError("data dimension " + std::to_string(data.dim()) + " does not match model dimension " +
                     std::to_string(model.f.dim()));
  }
  for (int y : data.labels) {
    if (!model.loss.valid_label(y)) throw UsageError("label " + std::to_string(y) + " is not valid for this model");
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "error=%.6g%% n=%lld order=%lld", error_rate_pct(model.f, data, model.loss),
                static_cast<long long>(data.size()), static_cast<long long>(model.f.model_order()));
  out << buf << '\n';
  return kExitOk;
}

int cmd_diag(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const Prepared p = prepare(a);
  TheoryProbe probe(lipschitz_constant(p.config.loss), p.config.lambda, p.config.kernel);
  probe.set_epsilon_scale(a.fault_epsilon_scale);
  const TrainResult result = train(p.config, p.data, p.eval ? &*p.eval : nullptr, &probe);
  write_outputs(a, p, result);
  if (!a.probe_out.empty()) {
    std::ofstream f(a.probe_out, std::ios::binary);
    if (!f) throw IoError("cannot open '" + a.probe_out + "' for writing");
    write_probe_csv(f, probe);
    if (!f.flush()) throw IoError("write to '" + a.probe_out + "' failed");
  }
  const ProbeSummary s = summarize(probe);
  out << summary_line(result.metrics) << '\n';
  out << "steps=" << s.steps << " bias_failures=" << s.bias_failures << " norm_failures=" << s.norm_failures;
  if (!s.norm_applicable) out << " (norm bound n/a: lambda=0)";
  if (probe.records().size() >= 2) out << " sigma2=" << format_double(variance_estimate(probe.records()));
  if (p.config.schedule.kind() == StepSchedule::Kind::constant && p.config.lambda > 0.0 &&
      p.config.budget.kind() == BudgetRule::Kind::matched_constant && probe.records().size() >= 2) {
    out << " radius=" << format_double(neighborhood_report(probe.records(), probe, p.config.budget.parameter()).radius);
  }
  out << '\n';
  if (s.bias_failures > 0 || s.norm_failures > 0) {
    err << "polk: diagnostic checks failed\n";
    return kExitDiagnostic;
  }
  return kExitOk;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Inserts "--key=value" for every line of each --config file directly after
/// the subcommand name, so explicit flags (which come later) take precedence.
std::vector<std::string> splice_config(const std::vector<std::string>& args) {
  std::vector<std::string> from_files;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      continue;
    }
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      const std::string key = eq == std::string::npos ? "" : trim(line.substr(0, eq));
      if (key.empty() || key == "config") throw ParseError(path, line_no, "expected key=value");
      from_files.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
    }
  }
  if (from_files.empty()) return args;
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < args.size() && !args[i].empty() && args[i][0] == '-') out.push_back(args[i++]);
  if (i < args.size()) out.push_back(args[i++]);
  out.insert(out.end(), from_files.begin(), from_files.end());
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(i), args.end());
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parsimonious online kernel learning", "polk"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  MultidistSpec gen_spec;
  std::string out_dir = ".";
  CLI::App* gen = app.add_subcommand("gen", "write the multidist benchmark as train.csv / test.csv");
  gen->add_option("--classes", gen_spec.classes, "classes")->check(CLI::Range(2, 1000));
  gen->add_option("--train", gen_spec.n_train, "training samples")->check(CLI::NonNegativeNumber);
  gen->add_option("--test", gen_spec.n_test, "test samples")->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", gen_spec.seed, "seed");
  gen->add_option("--out-dir", out_dir, "output directory");

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  add_train_flags(train_cmd, train_args);

  TrainArgs diag_args;
  CLI::App* diag = app.add_subcommand("diag", "train with the theory probe attached");
  add_train_flags(diag, diag_args);
  diag->add_option("--probe", diag_args.probe_out, "write the per-step probe CSV here");
  diag->add_option("--fault-epsilon-scale", diag_args.fault_epsilon_scale)->group("");

  std::string model_path, data_path;
  Index eval_sparse_dim = 0;
  CLI::App* eval = app.add_subcommand("eval", "report the error rate of a saved model");
  eval->add_option("--model", model_path, "model file")->required();
  eval->add_option("--data", data_path, "labelled data")->required();
  eval->add_option("--sparse-dim", eval_sparse_dim, "read data as sparse text of this dimension")
      ->check(CLI::PositiveNumber);

  std::string config_path;
  for (CLI::App* sub : {gen, train_cmd, diag, eval}) {
    sub->add_option("--config", config_path, "key=value file of flags; command-line flags override it");
  }

  std::vector<std::string> full;
  try {
    full = splice_config(args);
  } catch (const ParseError& e) {
    err << "polk: parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "polk: I/O error: " << e.what() << '\n';
    return kExitIo;
  }

  try {
    std::vector<std::string> reversed(full.rbegin(), full.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_spec, out_dir, out);
    if (train_cmd->parsed()) return cmd_train(train_args, out);
    if (diag->parsed()) return cmd_diag(diag_args, out, err);
    return cmd_eval(model_path, data_path, eval_sparse_dim, out);
  } catch (const CapacityError& e) {
    err << "polk: capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const ParseError& e) {
    err << "polk: parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "polk: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "polk: configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "polk: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "polk: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace polk
