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

#include "polk/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string_view>

#include "polk/errors.hpp"

namespace polk {

namespace {

Dataset draw_samples(std::mt19937_64& rng, const MultidistSpec& spec, const Matrix& means,
                     Index count) {
  std::uniform_int_distribution<int> pick_class(1, spec.classes);
  std::uniform_int_distribution<int> pick_mode(0, spec.modes_per_class - 1);
  std::normal_distribution<double> noise(0.0, std::sqrt(spec.within_mode_var));
  Dataset out;
  out.features.resize(count, 2);
  out.labels.resize(static_cast<std::size_t>(count));
  out.num_classes = spec.classes;
  for (Index n = 0; n < count; ++n) {
    const int y = pick_class(rng);
    const int j = pick_mode(rng);
    const Index mode = (y - 1) * spec.modes_per_class + j;
    const double x0 = means(mode, 0) + noise(rng);
    const double x1 = means(mode, 1) + noise(rng);
    out.features(n, 0) = x0;
    out.features(n, 1) = x1;
    out.labels[static_cast<std::size_t>(n)] = y;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_int(std::string_view s, int& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty() && std::isfinite(out);
}

int parse_label(std::string_view field, const std::string& source, std::size_t line_no) {
  int label = 0;
  if (!parse_int(field, label)) {
    throw ParseError(source, line_no, "label '" + std::string(field) + "' is not an integer");
  }
  if (label < 0) throw ParseError(source, line_no, "label must be >= 0");
  return label;
}

bool skip_line(std::string_view line) {
  const auto body = trim(line);
  return body.empty() || body.front() == '#';
}

Dataset assemble(std::vector<std::vector<double>>& rows, std::vector<int>& labels, Index dim) {
  Dataset out;
  out.features.resize(static_cast<Index>(rows.size()), dim);
  for (std::size_t n = 0; n < rows.size(); ++n) {
    for (Index c = 0; c < dim; ++c) out.features(static_cast<Index>(n), c) = rows[n][static_cast<std::size_t>(c)];
  }
  out.labels = std::move(labels);
  out.num_classes = *std::max_element(out.labels.begin(), out.labels.end());
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

DatasetSplit gen_multidist(const MultidistSpec& spec) {
  if (spec.classes < 2) throw UsageError("multidist: need at least 2 classes");
  if (spec.modes_per_class < 1) throw UsageError("multidist: need at least 1 mode per class");
  if (!(spec.within_mode_var > 0.0) || !(spec.mean_scatter_var > 0.0)) {
    throw UsageError("multidist: variances must be positive");
  }
  if (spec.n_train < 0 || spec.n_test < 0) throw UsageError("multidist: negative sample count");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> scatter(0.0, std::sqrt(spec.mean_scatter_var));
  Matrix means(spec.classes * spec.modes_per_class, 2);
  for (int y = 1; y <= spec.classes; ++y) {
    const double angle = 2.0 * std::numbers::pi * (y - 1) / spec.classes;
    for (int j = 0; j < spec.modes_per_class; ++j) {
      const Index mode = (y - 1) * spec.modes_per_class + j;
      means(mode, 0) = std::cos(angle) + scatter(rng);
      means(mode, 1) = std::sin(angle) + scatter(rng);
    }
  }
  DatasetSplit split;
  split.train = draw_samples(rng, spec, means, spec.n_train);
  split.test = draw_samples(rng, spec, means, spec.n_test);
  return split;
}

Dataset parse_dense_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  Index dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    const Index row_dim = static_cast<Index>(fields.size()) - 1;
    if (row_dim < 1) throw ParseError(source, line_no, "row has no feature values");
    if (dim >= 0 && row_dim != dim) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(dim) + " features, found " + std::to_string(row_dim));
    }
    dim = row_dim;
    labels.push_back(parse_label(fields[0], source, line_no));
    std::vector<double> values(static_cast<std::size_t>(dim));
    for (Index c = 0; c < dim; ++c) {
      const auto field = fields[static_cast<std::size_t>(c) + 1];
      if (!parse_double(field, values[static_cast<std::size_t>(c)])) {
        throw ParseError(source, line_no, "field '" + std::string(trim(field)) + "' is not a finite number");
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError(source, std::max<std::size_t>(line_no, 1), "no data rows");
  return assemble(rows, labels, dim);
}

Dataset load_dense_csv(const std::string& path) {
  auto in = open_input(path);
  return parse_dense_csv(in, path);
}

void write_dense_csv(std::ostream& out, const Dataset& data) {
  for (Index n = 0; n < data.size(); ++n) {
    out << data.labels[static_cast<std::size_t>(n)];
    for (Index c = 0; c < data.dim(); ++c) out << ',' << format_double(data.features(n, c));
    out << '\n';
  }
}

void write_dense_csv(const std::string& path, const Dataset& data) {
  auto out = open_output(path);
  write_dense_csv(out, data);
  if (!out) throw IoError("error writing '" + path + "'");
}

Dataset parse_sparse_text(std::istream& in, Index dim, const std::string& source) {
  if (dim < 1) throw UsageError("sparse text: dimension must be >= 1");
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::istringstream tokens(line);
    std::string token;
    tokens >> token;
    labels.push_back(parse_label(token, source, line_no));
    std::vector<double> values(static_cast<std::size_t>(dim), 0.0);
    int previous = 0;
    while (tokens >> token) {
      const auto colon = token.find(':');
      int idx = 0;
      double value = 0.0;
      if (colon == std::string::npos || !parse_int(std::string_view(token).substr(0, colon), idx) ||
          !parse_double(std::string_view(token).substr(colon + 1), value)) {
        throw ParseError(source, line_no, "malformed entry '" + token + "'");
      }
      if (idx < 1 || idx > dim) {
        throw ParseError(source, line_no, "index " + std::to_string(idx) + " outside 1.." + std::to_string(dim));
      }
      if (idx <= previous) throw ParseError(source, line_no, "indices must be strictly increasing");
      previous = idx;
      values[static_cast<std::size_t>(idx - 1)] = value;
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError(source, std::max<std::size_t>(line_no, 1), "no data rows");
  return assemble(rows, labels, dim);
}

Dataset load_sparse_text(const std::string& path, Index dim) {
  auto in = open_input(path);
  return parse_sparse_text(in, dim, path);
}

void write_sparse_text(std::ostream& out, const Dataset& data) {
  for (Index n = 0; n < data.size(); ++n) {
    out << data.labels[static_cast<std::size_t>(n)];
    for (Index c = 0; c < data.dim(); ++c) {
      if (data.features(n, c) != 0.0) out << ' ' << (c + 1) << ':' << format_double(data.features(n, c));
    }
    out << '\n';
  }
}

}  // namespace polk
