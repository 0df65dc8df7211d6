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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "dpmi/kernels/kernels.h"
#include "variants.h"

namespace dpmi::kernels {
namespace {

bool CpuHasAvx2() {
#if defined(DPMI_KERNELS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa BestIsa() {
  if (const char* env = std::getenv("DPMI_SIMD")) {
    const std::string_view choice(env);
    if (choice == "scalar") return Isa::kScalar;
    if (choice == "avx2" && IsaAvailable(Isa::kAvx2)) return Isa::kAvx2;
    if (choice == "neon" && IsaAvailable(Isa::kNeon)) return Isa::kNeon;
  }
  if (IsaAvailable(Isa::kAvx2)) return Isa::kAvx2;
  if (IsaAvailable(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

std::atomic<const KernelTable*>& ActiveSlot() {
  static std::atomic<const KernelTable*> slot{&KernelsFor(BestIsa())};
  return slot;
}

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool IsaAvailable(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2: {
      static const bool available = CpuHasAvx2();
      return available;
    }
    case Isa::kNeon:
#if defined(DPMI_KERNELS_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& KernelsFor(Isa isa) {
  switch (isa) {
#if defined(DPMI_KERNELS_HAVE_AVX2)
    case Isa::kAvx2:
      return internal::Avx2Kernels();
#endif
#if defined(DPMI_KERNELS_HAVE_NEON)
    case Isa::kNeon:
      return internal::NeonKernels();
#endif
    default:
      return ScalarKernels();
  }
}

const KernelTable& Active() {
  return *ActiveSlot().load(std::memory_order_acquire);
}

bool SetActiveIsa(Isa isa) {
  if (!IsaAvailable(isa)) return false;
  ActiveSlot().store(&KernelsFor(isa), std::memory_order_release);
  return true;
}

}  // namespace dpmi::kernels
