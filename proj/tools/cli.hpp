// Copyright 2026 The dppci Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "dppci/core.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dppci::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kInvalidKernel = 2,
  kAssertionFailed = 3,
};

/// 1 for I/O, parse and argument errors; 2 for kernels that fail
/// validation or cannot support the requested computation.
int exit_code_for(ErrorKind kind);

/// Runs the command line `args` (without the program name). JSON and
/// reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dppci::cli
