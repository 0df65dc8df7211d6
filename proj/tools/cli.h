// Copyright 2026 The dpmi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command line front end: gen, run, sweep, account, report.

#ifndef DPMI_TOOLS_CLI_H_
#define DPMI_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"

namespace dpmi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;

// Exit code for a failed status: 2 for bad input (arguments, configuration,
// missing files, refused overwrite), 1 for everything else.
int ExitCode(const absl::Status& status);

// Runs the tool on `args` (args[0] is the program name).
int RunDpmi(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace dpmi::cli

#endif  // DPMI_TOOLS_CLI_H_
