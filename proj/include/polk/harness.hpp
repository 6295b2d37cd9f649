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

#ifndef POLK_HARNESS_HPP
#define POLK_HARNESS_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace polk {

/// Process exit codes of the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitCapacity = 3,
  kExitDiagnostic = 4,
};

/// Runs one `polk` invocation (subcommands gen, train, eval, diag).
/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polk

#endif  // POLK_HARNESS_HPP
