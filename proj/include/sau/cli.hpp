// Copyright 2026 The SAU Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SAU_CLI_HPP_
#define SAU_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace sau::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kValidationError = 1,  // bad usage, inconsistent inputs, invalid config
  kIoError = 2,          // missing/unreadable/unwritable files, malformed artifacts
  kAcceptanceFailed = 3, // eval: --expect-accuracy not met
};

inline constexpr const char* kDefaultConfigEnv = "SAU_DEFAULT_CONFIG";

/// Runs the `sau` command line. `args[0]` is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sau::cli

#endif  // SAU_CLI_HPP_
