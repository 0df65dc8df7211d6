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

#ifndef DPMI_COMMON_STATUS_MACROS_H_
#define DPMI_COMMON_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define DPMI_STATUS_CONCAT_INNER_(a, b) a##b
#define DPMI_STATUS_CONCAT_(a, b) DPMI_STATUS_CONCAT_INNER_(a, b)

#define DPMI_RETURN_IF_ERROR(expr)              \
  do {                                          \
    const ::absl::Status _dpmi_status = (expr); \
    if (!_dpmi_status.ok()) return _dpmi_status; \
  } while (0)

#define DPMI_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                \
  if (!tmp.ok()) return tmp.status();                \
  lhs = std::move(tmp).value()

// Evaluates `rexpr` (a StatusOr), returning its status on error and
// otherwise assigning the value to `lhs`.
#define DPMI_ASSIGN_OR_RETURN(lhs, rexpr) \
  DPMI_ASSIGN_OR_RETURN_IMPL_(            \
      DPMI_STATUS_CONCAT_(_dpmi_statusor_, __LINE__), lhs, rexpr)

#endif  // DPMI_COMMON_STATUS_MACROS_H_
