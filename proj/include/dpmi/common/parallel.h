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

#ifndef DPMI_COMMON_PARALLEL_H_
#define DPMI_COMMON_PARALLEL_H_

#include <cstddef>
#include <functional>

#include "absl/status/status.h"

namespace dpmi {

// Runs fn(0) ... fn(n-1) on up to `jobs` threads (jobs <= 1 runs inline, in
// order). Tasks must not share mutable state. Returns the error of the
// lowest failing index, so the outcome does not depend on scheduling.
absl::Status ParallelFor(std::size_t n, std::size_t jobs,
                         const std::function<absl::Status(std::size_t)>& fn);

}  // namespace dpmi

#endif  // DPMI_COMMON_PARALLEL_H_
