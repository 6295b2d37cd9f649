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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "oracles.hpp"
#include "polk/dataset.hpp"
#include "polk/errors.hpp"
#include "polk/harness.hpp"
#include "polk/metrics.hpp"
#include "polk/model_io.hpp"

using namespace polk;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("polk_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

Model random_model(std::mt19937_64& rng, bool poly) {
  const KernelSpec k = poly ? KernelSpec::polynomial(0.5, 3) : KernelSpec::gaussian(0.37);
  const KernelExpansion f(k, Dictionary(oracle::random_points(rng, 3, 7)), oracle::random_weights(rng, 7, 4));
  return Model{f, LossKind::multi_logistic(4), 1e-6};
}

}  // namespace

TEST_CASE("model files round trip byte for byte") {
  std::mt19937_64 rng(51);
  for (bool poly : {false, true}) {
    const Model m = random_model(rng, poly);
    std::stringstream first;
    save_model(first, m);
    const Model back = load_model(first);
    std::stringstream second;
    save_model(second, back);
    CHECK(first.str() == second.str());
    CHECK(back.f.kernel() == m.f.kernel());
    CHECK(back.loss == m.loss);
    CHECK(back.lambda == m.lambda);
    for (int i = 0; i < 50; ++i) {
      const Vector x = oracle::random_points(rng, 3, 1, 2.0).col(0);
      CHECK(evaluate(back.f, x) == evaluate(m.f, x));
    }
  }
  const Model zero{KernelExpansion::zero(KernelSpec::gaussian(1.0), 2, 1), LossKind::binary_logistic(), 0.0};
  std::stringstream s;
  save_model(s, zero);
  CHECK(s.str() == "polk-model v1\nkernel gaussian 1\ndims 2 0 1\nlambda 0\nloss binary_logistic\n");
  CHECK(load_model(s).f.model_order() == 0);
}

TEST_CASE("malformed model files") {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    try {
      load_model(in);
    } catch (const ParseError&) {
      return true;
    }
    return false;
  };
  const std::string head = "polk-model v1\nkernel gaussian 1\ndims 1 1 1\nlambda 0\nloss binary_logistic\n";
  CHECK(!bad(head + "0.5\n2\n"));
  CHECK(bad("polk-model v2\n"));
  CHECK(bad(""));
  CHECK(bad(head + "0.5\n"));
  CHECK(bad(head + "0.5 1\n2\n"));
  CHECK(bad(head + "0.5\n2\nextra\n"));
  CHECK(bad(head + "abc\n2\n"));
  CHECK(bad("polk-model v1\nkernel laplace 1\n"));
  CHECK(bad("polk-model v1\nkernel gaussian -1\ndims 1 0 1\nlambda 0\nloss binary_logistic\n"));
  CHECK(bad("polk-model v1\nkernel gaussian 1\ndims 1 0 2\nlambda 0\nloss binary_logistic\n"));
  CHECK(bad("polk-model v1\nkernel gaussian 1\ndims 1 0 2\nlambda 0\nloss hinge\n"));
  CHECK_THROWS_AS(load_model("/nonexistent/model.txt"), IoError);
}

TEST_CASE("metrics csv schema") {
  MetricsRecord r;
  r.t = 10;
  r.samples_seen = 320;
  r.eta = 6.0;
  r.epsilon = 0.5;
  r.model_order = 17;
  r.empirical_risk = 0.1;
  r.test_error_pct = 4.2;
  r.norm_bound = std::nan("");
  std::ostringstream out;
  write_metrics_csv(out, {r, r}, false);
  const std::string text = out.str();
  CHECK(text.substr(0, text.find('\n')) ==
        "t,samples_seen,eta,epsilon,model_order,empirical_risk,test_error_pct,bias,bias_bound,iterate_norm,"
        "norm_bound,trailing_risk,trailing_error_pct,trailing_model_order");
  std::istringstream in(text);
  const auto back = parse_metrics_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].model_order == 17);
  CHECK(back[0].test_error_pct == 4.2);
  CHECK(std::isnan(back[0].norm_bound));

  r.elapsed_seconds = 1.5;
  std::ostringstream timed;
  write_metrics_csv(timed, {r}, true);
  std::istringstream tin(timed.str());
  CHECK(parse_metrics_csv(tin)[0].elapsed_seconds == 1.5);

  std::istringstream broken("t,x\n1,2\n");
  CHECK_THROWS_AS(parse_metrics_csv(broken), ParseError);
}

TEST_CASE("cli gen") {
  TempDir dir;
  const Run r = cli({"gen", "--classes", "2", "--train", "10", "--test", "5", "--seed", "3", "--out-dir", dir / "a"});
  CHECK(r.code == 0);
  CHECK(r.out.find("seed=3") != std::string::npos);
  const Dataset train = load_dense_csv(dir / "a/train.csv");
  CHECK(train.size() == 10);
  CHECK(load_dense_csv(dir / "a/test.csv").size() == 5);
  CHECK(cli({"gen", "--classes", "2", "--train", "10", "--test", "5", "--seed", "3", "--out-dir", dir / "b"}).code == 0);
  CHECK(slurp(dir / "a/train.csv") == slurp(dir / "b/train.csv"));
  CHECK(slurp(dir / "a/test.csv") == slurp(dir / "b/test.csv"));

  CHECK(cli({"gen", "--out-dir", dir / "d"}).code == 0);
  const Dataset full = load_dense_csv(dir / "d/train.csv");
  CHECK(full.size() == 5000);
  CHECK(full.dim() == 2);
  CHECK(full.num_classes == 5);
  CHECK(load_dense_csv(dir / "d/test.csv").size() == 2500);

  std::ofstream(dir / "file") << "x";
  CHECK(cli({"gen", "--out-dir", dir / "file/sub"}).code == kExitIo);
}

TEST_CASE("cli train, eval and diag") {
  TempDir dir;
  REQUIRE(cli({"gen", "--classes", "3", "--train", "300", "--test", "100", "--out-dir", dir.path.string()}).code == 0);
  const std::string train = dir / "train.csv", test = dir / "test.csv";
  const std::vector<std::string> base{"--task", "mksvm", "--data", train, "--eval", test, "--batch", "8"};
  auto with = [&](std::string cmd, std::vector<std::string> extra) {
    std::vector<std::string> a{std::move(cmd)};
    a.insert(a.end(), base.begin(), base.end());
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };

  const Run r = cli(with("train", {"--model-out", dir / "m.txt", "--metrics-out", dir / "m.csv"}));
  REQUIRE(r.code == 0);
  CHECK(std::regex_match(r.out, std::regex("risk=[-+0-9.e]+ error=[0-9.e+-]+% order=[0-9.e+-]+\n")));
  std::ifstream mcsv(dir / "m.csv");
  const auto metrics = parse_metrics_csv(mcsv);
  CHECK(!metrics.empty());

  const Run e = cli({"eval", "--model", dir / "m.txt", "--data", test});
  REQUIRE(e.code == 0);
  const Model model = load_model(dir / "m.txt");
  const Dataset t = load_dense_csv(test);
  char want[64];
  std::snprintf(want, sizeof want, "error=%.6g%%", error_rate_pct(model.f, t, model.loss));
  CHECK(e.out.rfind(want, 0) == 0);
  CHECK(e.out.find("n=100") != std::string::npos);

  // zero model: every prediction is class 1
  const Model zero{KernelExpansion::zero(KernelSpec::gaussian(1.0), 2, 3), LossKind::multi_hinge(3), 0.0};
  save_model(dir / "zero.txt", zero);
  const Run z = cli({"eval", "--model", dir / "zero.txt", "--data", test});
  int ones = 0;
  for (int y : t.labels) ones += y == 1;
  std::snprintf(want, sizeof want, "error=%.6g%%", 100.0 * (1.0 - ones / 100.0));
  CHECK(z.out.rfind(want, 0) == 0);

  const Model wide{KernelExpansion::zero(KernelSpec::gaussian(1.0), 3, 3), LossKind::multi_hinge(3), 0.0};
  save_model(dir / "wide.txt", wide);
  CHECK(cli({"eval", "--model", dir / "wide.txt", "--data", test}).code == kExitUsage);

  const Run d = cli(with("diag", {"--lambda", "1", "--eta", "0.5", "--probe", dir / "probe.csv"}));
  CHECK(d.code == 0);
  CHECK(d.out.find("bias_failures=0 norm_failures=0") != std::string::npos);
  CHECK(fs::file_size(dir / "probe.csv") > 0);
  CHECK(cli(with("diag", {"--lambda", "0.1", "--eta", "1", "--budget", "fixed=0.3", "--fault-epsilon-scale", "0.25"}))
            .code == kExitDiagnostic);

  const Run bad_eta = cli(with("train", {"--lambda", "1", "--eta", "1"}));
  CHECK(bad_eta.code == kExitUsage);
  CHECK(bad_eta.err.find("1/lambda") != std::string::npos);

  CHECK(cli(with("train", {"--budget", "dense", "--batch", "1", "--max-model-order", "100"})).code == kExitCapacity);
  CHECK(cli(with("train", {"--budget", "sometimes"})).code == kExitUsage);
  CHECK(cli(with("train", {"--no-such-flag"})).code == kExitUsage);
  CHECK(cli({"train", "--help"}).code == 0);
  CHECK(cli({}).code == kExitUsage);

  std::ofstream(dir / "broken.csv") << "1,0.5,0.5\n2,zzz,1\n";
  const Run broken = cli({"train", "--task", "mksvm", "--data", dir / "broken.csv"});
  CHECK(broken.code == kExitIo);
  CHECK(broken.err.find(":2:") != std::string::npos);
}

TEST_CASE("cli config file with command-line override") {
  TempDir dir;
  REQUIRE(cli({"gen", "--classes", "2", "--train", "60", "--test", "20", "--out-dir", dir.path.string()}).code == 0);
  std::ofstream(dir / "run.cfg") << "# settings\ntask=mksvm\ndata=" << (dir / "train.csv") << "\nbudget=dense\n"
                                 << "batch=4\n";
  const Run from_file = cli({"train", "--config", dir / "run.cfg"});
  REQUIRE(from_file.code == 0);
  CHECK(from_file.out.find("order=60") != std::string::npos);
  const Run overridden = cli({"train", "--config", dir / "run.cfg", "--budget", "matchedK=1"});
  REQUIRE(overridden.code == 0);
  CHECK(overridden.out.find("order=60") == std::string::npos);

  std::ofstream(dir / "bad.cfg") << "task\n";
  CHECK(cli({"train", "--config", dir / "bad.cfg"}).code == kExitIo);
  CHECK(cli({"train", "--config", dir / "missing.cfg"}).code == kExitIo);
}

TEST_CASE("cli runs are reproducible") {
  TempDir dir;
  REQUIRE(cli({"gen", "--classes", "3", "--train", "200", "--test", "50", "--out-dir", dir.path.string()}).code == 0);
  for (const char* name : {"a.csv", "b.csv"}) {
    REQUIRE(cli({"train", "--task", "mlogistic", "--data", dir / "train.csv", "--eval", dir / "test.csv", "--batch",
                 "4", "--passes", "2", "--shuffle", "--seed", "7", "--metrics-out", dir / name})
                .code == 0);
  }
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
}
