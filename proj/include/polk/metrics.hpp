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

#ifndef POLK_METRICS_HPP
#define POLK_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polk/kernel.hpp"

namespace polk {

/// One checkpoint row of a training run.
struct MetricsRecord {
  std::int64_t t = 0;
  std::int64_t samples_seen = 0;
  double eta = 0.0;
  double epsilon = 0.0;
  Index model_order = 0;
  double empirical_risk = 0.0;
  double test_error_pct = 0.0;
  double bias = 0.0;
  double bias_bound = 0.0;
  double iterate_norm = 0.0;
  /// NaN when lambda = 0.
  double norm_bound = 0.0;
  double trailing_risk = 0.0;
  double trailing_error_pct = 0.0;
  double trailing_model_order = 0.0;
  std::optional<double> elapsed_seconds;
};

/// Column names in file order. elapsed_seconds is appended when `timing`.
std::vector<std::string> metrics_columns(bool timing);

/// Fills the trailing_* fields of records.back() from the checkpoints whose
/// samples_seen lies in the last 5% of records.back().samples_seen.
void update_trailing(std::vector<MetricsRecord>& records);

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records, bool timing);
void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records, bool timing);

/// Inverse of write_metrics_csv; throws ParseError on schema violations.
std::vector<MetricsRecord> parse_metrics_csv(std::istream& in, const std::string& source = "<stream>");

}  // namespace polk

#endif  // POLK_METRICS_HPP
