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

#ifndef POLK_DATASET_HPP
#define POLK_DATASET_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "polk/kernel.hpp"

namespace polk {

struct Sample {
  Vector x;
  int y = 0;
};

/// Labeled samples, one feature vector per row. Multi-class labels are
/// 1..C; binary data uses {0, 1} and has num_classes == 1.
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  int num_classes = 0;

  Index size() const noexcept { return features.rows(); }
  Index dim() const noexcept { return features.cols(); }
  Sample sample(Index n) const { return {features.row(n).transpose(), labels[static_cast<std::size_t>(n)]}; }
};

/// Planar Gaussian-mixture benchmark: C classes centred on the unit circle,
/// J modes per class whose means are scattered around the class centre.
struct MultidistSpec {
  int classes = 5;
  int modes_per_class = 3;
  double within_mode_var = 0.2;
  double mean_scatter_var = 1.0;
  Index n_train = 5000;
  Index n_test = 2500;
  std::uint64_t seed = 0;
};

struct DatasetSplit {
  Dataset train;
  Dataset test;
};

/// Draw order (mt19937_64 seeded with spec.seed): the mode means
/// mu_{y,j} for y = 1..C, j = 1..J (x then y coordinate), then each
/// training sample (label, mode, x, y), then each test sample likewise.
DatasetSplit gen_multidist(const MultidistSpec& spec);

/// Rows "label,v1,...,vp". '#' lines and blank lines are skipped; CRLF is
/// accepted. num_classes is the largest label seen.
Dataset parse_dense_csv(std::istream& in, const std::string& source = "<stream>");
Dataset load_dense_csv(const std::string& path);
void write_dense_csv(std::ostream& out, const Dataset& data);
void write_dense_csv(const std::string& path, const Dataset& data);

/// Rows "label idx:val ..." with 1-based, strictly increasing idx <= dim.
Dataset parse_sparse_text(std::istream& in, Index dim, const std::string& source = "<stream>");
Dataset load_sparse_text(const std::string& path, Index dim);
void write_sparse_text(std::ostream& out, const Dataset& data);

/// 17 significant digits, the precision every text format here uses.
std::string format_double(double value);

}  // namespace polk

#endif  // POLK_DATASET_HPP
