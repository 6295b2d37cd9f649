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

#include "polk/metrics.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "polk/dataset.hpp"
#include "polk/errors.hpp"

namespace polk {

namespace {

const std::vector<std::string> kColumns = {
    "t",          "samples_seen",  "eta",           "epsilon",       "model_order",        "empirical_risk",
    "test_error_pct", "bias",      "bias_bound",    "iterate_norm",  "norm_bound",         "trailing_risk",
    "trailing_error_pct", "trailing_model_order"};

constexpr double kTrailingFraction = 0.05;

template <typename T>
bool parse_field(std::string_view s, T& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<std::string> metrics_columns(bool timing) {
  std::vector<std::string> cols = kColumns;
  if (timing) cols.emplace_back("elapsed_seconds");
  return cols;
}

void update_trailing(std::vector<MetricsRecord>& records) {
  if (records.empty()) return;
  MetricsRecord& last = records.back();
  const double cutoff = (1.0 - kTrailingFraction) * static_cast<double>(last.samples_seen);
  double risk = 0.0, error = 0.0, order = 0.0;
  int count = 0;
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    if (static_cast<double>(it->samples_seen) < cutoff) break;
    risk += it->empirical_risk;
    error += it->test_error_pct;
    order += static_cast<double>(it->model_order);
    ++count;
  }
  last.trailing_risk = risk / count;
  last.trailing_error_pct = error / count;
  last.trailing_model_order = order / count;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records, bool timing) {
  const auto cols = metrics_columns(timing);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const MetricsRecord& r : records) {
    out << r.t << ',' << r.samples_seen << ',' << format_double(r.eta) << ',' << format_double(r.epsilon) << ','
        << r.model_order << ',' << format_double(r.empirical_risk) << ',' << format_double(r.test_error_pct) << ','
        << format_double(r.bias) << ',' << format_double(r.bias_bound) << ',' << format_double(r.iterate_norm)
        << ',' << format_double(r.norm_bound) << ',' << format_double(r.trailing_risk) << ','
        << format_double(r.trailing_error_pct) << ',' << format_double(r.trailing_model_order);
    if (timing) out << ',' << format_double(r.elapsed_seconds.value_or(0.0));
    out << '\n';
  }
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records, bool timing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_metrics_csv(out, records, timing);
  if (!out.flush()) throw IoError("write to '" + path + "' failed");
}

std::vector<MetricsRecord> parse_metrics_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  bool timing = false;
  {
    std::ostringstream plain, timed;
    const auto a = metrics_columns(false), b = metrics_columns(true);
    for (std::size_t i = 0; i < a.size(); ++i) plain << (i ? "," : "") << a[i];
    for (std::size_t i = 0; i < b.size(); ++i) timed << (i ? "," : "") << b[i];
    if (line == timed.str()) timing = true;
    else if (line != plain.str()) throw ParseError(source, 1, "unexpected header");
  }
  const std::size_t width = metrics_columns(timing).size();

  std::vector<MetricsRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != width) throw ParseError(source, line_no, "expected " + std::to_string(width) + " fields");
    MetricsRecord r;
    std::int64_t order = 0;
    double d[12];
    bool ok = parse_field(f[0], r.t) && parse_field(f[1], r.samples_seen) && parse_field(f[4], order);
    const int dbl_cols[12] = {2, 3, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
    for (int i = 0; i < 12 && ok; ++i) {
      if (dbl_cols[i] >= static_cast<int>(width)) {
        d[i] = 0.0;
        continue;
      }
      ok = parse_field(f[static_cast<std::size_t>(dbl_cols[i])], d[i]);
    }
    if (!ok) throw ParseError(source, line_no, "field does not parse as its declared type");
    r.model_order = static_cast<Index>(order);
    r.eta = d[0];
    r.epsilon = d[1];
    r.empirical_risk = d[2];
    r.test_error_pct = d[3];
    r.bias = d[4];
    r.bias_bound = d[5];
    r.iterate_norm = d[6];
    r.norm_bound = d[7];
    r.trailing_risk = d[8];
    r.trailing_error_pct = d[9];
    r.trailing_model_order = d[10];
    if (timing) r.elapsed_seconds = d[11];
    records.push_back(r);
  }
  return records;
}

}  // namespace polk
