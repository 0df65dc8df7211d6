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

#ifndef DPMI_SRC_KERNELS_VARIANTS_H_
#define DPMI_SRC_KERNELS_VARIANTS_H_

#include "dpmi/kernels/kernels.h"

namespace dpmi::kernels::internal {

#if defined(__x86_64__) || defined(_M_X64)
#define DPMI_KERNELS_HAVE_AVX2 1
const KernelTable& Avx2Kernels();
#endif

#if defined(__aarch64__)
#define DPMI_KERNELS_HAVE_NEON 1
const KernelTable& NeonKernels();
#endif

}  // namespace dpmi::kernels::internal

#endif  // DPMI_SRC_KERNELS_VARIANTS_H_
