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

#include "polk/model_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "polk/dataset.hpp"
#include "polk/errors.hpp"

namespace polk {

namespace {

void write_row(std::ostream& out, const Matrix& m, Index row) {
  for (Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << format_double(m(row, c));
  out << '\n';
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::istringstream next(const char* what) {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError(source_, line_no_ + 1, std::string("missing ") + what);
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return std::istringstream(line);
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

  void expect_end(std::istringstream& s) const {
    std::string extra;
    if (s >> extra) fail("trailing content '" + extra + "'");
  }

  double number(std::istringstream& s) const {
    std::string tok;
    if (!(s >> tok)) fail("missing value");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      fail("'" + tok + "' is not a number");
    }
    if (used != tok.size() || !std::isfinite(v)) fail("'" + tok + "' is not a finite number");
    return v;
  }

  long long integer(std::istringstream& s) const {
    std::string tok;
    if (!(s >> tok)) fail("missing integer");
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      fail("'" + tok + "' is not an integer");
    }
    if (used != tok.size()) fail("'" + tok + "' is not an integer");
    return v;
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

}  // namespace

void save_model(std::ostream& out, const Model& model) {
  const KernelExpansion& f = model.f;
  if (f.num_classes() != model.loss.num_classes()) throw UsageError("save_model: loss and function disagree on C");
  out << "polk-model v1\n";
  const KernelSpec& k = f.kernel();
  if (k.family() == KernelFamily::gaussian) {
    out << "kernel gaussian " << format_double(k.bandwidth_sq()) << '\n';
  } else {
    out << "kernel polynomial " << format_double(k.offset()) << ' ' << k.degree() << '\n';
  }
  out << "dims " << f.dim() << ' ' << f.model_order() << ' ' << f.num_classes() << '\n';
  out << "lambda " << format_double(model.lambda) << '\n';
  out << "loss " << to_string(model.loss.family()) << '\n';
  const Matrix atoms = f.dict().points().transpose();
  for (Index m = 0; m < f.model_order(); ++m) write_row(out, atoms, m);
  for (Index m = 0; m < f.model_order(); ++m) write_row(out, f.weights(), m);
}

void save_model(const std::string& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  save_model(out, model);
  if (!out.flush()) throw IoError("write to '" + path + "' failed");
}

Model load_model(std::istream& in, const std::string& source) {
  LineReader r(in, source);
  {
    auto s = r.next("header");
    std::string magic, version;
    s >> magic >> version;
    if (magic != "polk-model") r.fail("not a polk model file");
    if (version != "v1") r.fail("unsupported model version '" + version + "'");
    r.expect_end(s);
  }

  std::optional<KernelSpec> kernel;
  {
    auto s = r.next("kernel line");
    std::string key, family;
    s >> key >> family;
    if (key != "kernel") r.fail("expected 'kernel'");
    try {
      if (family == "gaussian") {
        kernel = KernelSpec::gaussian(r.number(s));
      } else if (family == "polynomial") {
        const double b = r.number(s);
        kernel = KernelSpec::polynomial(b, static_cast<int>(r.integer(s)));
      } else {
        r.fail("unknown kernel family '" + family + "'");
      }
    } catch (const UsageError& e) {
      r.fail(e.what());
    }
    r.expect_end(s);
  }

  Index p = 0, m = 0, c = 0;
  {
    auto s = r.next("dims line");
    std::string key;
    s >> key;
    if (key != "dims") r.fail("expected 'dims'");
    p = r.integer(s);
    m = r.integer(s);
    c = r.integer(s);
    if (p < 1 || m < 0 || c < 1) r.fail("invalid dimensions");
    r.expect_end(s);
  }

  double lambda = 0.0;
  {
    auto s = r.next("lambda line");
    std::string key;
    s >> key;
    if (key != "lambda") r.fail("expected 'lambda'");
    lambda = r.number(s);
    if (lambda < 0.0) r.fail("lambda must be >= 0");
    r.expect_end(s);
  }

  std::optional<LossKind> loss;
  {
    auto s = r.next("loss line");
    std::string key, name;
    s >> key >> name;
    if (key != "loss") r.fail("expected 'loss'");
    try {
      switch (parse_loss_family(name)) {
        case LossFamily::multi_hinge: loss = LossKind::multi_hinge(static_cast<int>(c)); break;
        case LossFamily::multi_logistic: loss = LossKind::multi_logistic(static_cast<int>(c)); break;
        case LossFamily::binary_logistic:
          if (c != 1) r.fail("binary_logistic models have C = 1");
          loss = LossKind::binary_logistic();
          break;
      }
    } catch (const UsageError& e) {
      r.fail(e.what());
    }
    r.expect_end(s);
  }

  Matrix atoms(p, m);
  for (Index i = 0; i < m; ++i) {
    auto s = r.next("dictionary row");
    for (Index j = 0; j < p; ++j) atoms(j, i) = r.number(s);
    r.expect_end(s);
  }
  Matrix weights(m, c);
  for (Index i = 0; i < m; ++i) {
    auto s = r.next("weight row");
    for (Index j = 0; j < c; ++j) weights(i, j) = r.number(s);
    r.expect_end(s);
  }
  std::string rest;
  while (std::getline(in, rest)) {
    if (rest.find_first_not_of(" \t\r") != std::string::npos) r.fail("unexpected content after weights");
  }
  return Model{KernelExpansion(*kernel, Dictionary(std::move(atoms)), std::move(weights)), *loss, lambda};
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_model(in, path);
}

}  // namespace polk
