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

#ifndef POLK_MODEL_IO_HPP
#define POLK_MODEL_IO_HPP

#include <iosfwd>
#include <string>

#include "polk/kernel.hpp"
#include "polk/losses.hpp"

namespace polk {

struct Model {
  KernelExpansion f;
  LossKind loss;
  double lambda = 0.0;
};

/// Text format, version 1:
///   polk-model v1
///   kernel gaussian <bandwidth_sq> | kernel polynomial <offset> <degree>
///   dims <p> <M> <C>
///   lambda <lambda>
///   loss <multi_hinge|multi_logistic|binary_logistic>
/// followed by M rows of p values (dictionary atoms) and M rows of C values
/// (weights), space separated with 17 significant digits.
void save_model(std::ostream& out, const Model& model);
void save_model(const std::string& path, const Model& model);

Model load_model(std::istream& in, const std::string& source = "<stream>");
Model load_model(const std::string& path);

}  // namespace polk

#endif  // POLK_MODEL_IO_HPP
