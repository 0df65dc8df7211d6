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

// Arithmetic inner loops used by training and privacy code. Each kernel has a
// scalar reference implementation plus ISA-specific variants; the variant is
// chosen once at startup from CPUID (or the DPMI_SIMD environment variable:
// "scalar", "avx2", "neon") and can be overridden in tests.
//
// Vector variants reorder floating-point reductions and may fuse
// multiply-adds, so results agree with the scalar reference to within a few
// ulps per accumulated term rather than bitwise. Within one process all
// callers see the same table, which keeps training runs reproducible.

#ifndef DPMI_KERNELS_KERNELS_H_
#define DPMI_KERNELS_KERNELS_H_

#include <cstddef>
#include <span>
#include <string_view>

namespace dpmi::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view IsaName(Isa isa);

struct AdamCoefficients {
  double learning_rate;
  double beta1;
  double beta2;
  double epsilon;
  // 1 - beta^t for the current step t.
  double bias_correction1;
  double bias_correction2;
};

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  // out[r] = bias[r] + dot(w[r, :], x) for a rows x cols row-major w.
  void (*affine)(const double* w, const double* bias, const double* x,
                 double* out, std::size_t rows, std::size_t cols);
  // out[c] += sum_r w[r, c] * v[r]
  void (*affine_transpose_acc)(const double* w, const double* v, double* out,
                               std::size_t rows, std::size_t cols);
  // In-place moment-corrected Adam update of theta with gradient g.
  void (*adam_update)(double* theta, double* m, double* v, const double* g,
                      std::size_t n, const AdamCoefficients& coeffs);
};

// Variant tables. Calling a table whose ISA is not available on the running
// CPU is undefined; check IsaAvailable first.
const KernelTable& ScalarKernels();
bool IsaAvailable(Isa isa);
const KernelTable& KernelsFor(Isa isa);

// Table used by the library. Thread-safe to read.
const KernelTable& Active();
// Switches the active table. Not thread-safe; intended for tests and
// start-up configuration. Returns false (and leaves the table unchanged) when
// the ISA is unavailable.
bool SetActiveIsa(Isa isa);

// Span conveniences over the active table.
inline double Dot(std::span<const double> a, std::span<const double> b) {
  return Active().dot(a.data(), b.data(), a.size());
}
inline void Axpy(double alpha, std::span<const double> x,
                 std::span<double> y) {
  Active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void Scale(double alpha, std::span<double> x) {
  Active().scale(alpha, x.data(), x.size());
}
inline double SumSquares(std::span<const double> x) {
  return Active().sum_squares(x.data(), x.size());
}

}  // namespace dpmi::kernels

#endif  // DPMI_KERNELS_KERNELS_H_
