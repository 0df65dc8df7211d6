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

// Local randomizers and noise calibration.
//
// Randomized response here is the generalized coin: keep the true bit with
// probability rho, otherwise report a uniformly random bit. The per-bit
// budget is eps_i = ln((rho + (1 - rho)/2) / ((1 - rho)/2))
//                 = ln((1 + rho) / (1 - rho)),
// so rho = 0.5 (two fair coins) gives ln 3. A record of d bits randomized
// independently is (d * eps_i)-local by sequential composition.

#ifndef DPMI_DP_MECHANISMS_H_
#define DPMI_DP_MECHANISMS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/common/matrix.h"
#include "dpmi/common/rng.h"

namespace dpmi::dp {

// Randomized-response parameters; always constructed through one of the
// factories so that retention and budget stay consistent.
class RrParams {
 public:
  static absl::StatusOr<RrParams> FromRetention(double rho);
  static absl::StatusOr<RrParams> FromBudget(double epsilon_i);

  double retention() const { return rho_; }
  double budget() const { return epsilon_i_; }

 private:
  RrParams(double rho, double epsilon_i) : rho_(rho), epsilon_i_(epsilon_i) {}
  double rho_;
  double epsilon_i_;
};

// eps_i for retention probability rho in [0, 1).
absl::StatusOr<double> RrBudget(double rho);
// rho = (e^eps - 1)/(e^eps + 1) for eps_i >= 0 (finite).
absl::StatusOr<double> RrRetention(double epsilon_i);

// Returns `bit` with probability rho, otherwise a uniform bit.
absl::StatusOr<int> RrPerturbBit(int bit, double rho, Rng& rng);

struct PerturbedRecord {
  std::vector<double> bits;
  double epsilon = 0.0;  // composed budget d * eps_i
};

// Randomizes every bit of a binary record independently.
absl::StatusOr<PerturbedRecord> LdpPerturbRecord(std::span<const double> bits,
                                                 double rho, Rng& rng);

// Sequential composition of local budgets: the sum.
absl::StatusOr<double> ComposeLocalBudget(std::span<const double> budgets);

struct PixelationParams {
  // Neighborhood size m, in pixels.
  double neighborhood = 1.0;
  // Grid-cell width b; 1 disables coarsening.
  std::size_t cell_width = 1;
  // Per-pixel budget.
  double epsilon_i = 1.0;

  // Laplace scale 255 * m / (b^2 * eps_i).
  double LaplaceScale() const;
  absl::Status Validate() const;
};

// Laplace pixelation of a grayscale image (values in [0,255]). For b > 1 the
// image is first averaged over b x b cells (edge cells may be partial); one
// Laplace draw is added per cell and the result is clamped to [0,255].
absl::StatusOr<Matrix> PixelateImage(const Matrix& image,
                                     const PixelationParams& params, Rng& rng);

// Square 0/1 adjacency matrix.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(std::size_t nodes)
      : nodes_(nodes), cells_(nodes * nodes, 0) {}
  // Validates squareness and 0/1 entries.
  static absl::StatusOr<Adjacency> FromMatrix(const Matrix& m);

  std::size_t nodes() const { return nodes_; }
  std::uint8_t operator()(std::size_t r, std::size_t c) const {
    return cells_[r * nodes_ + c];
  }
  std::uint8_t& operator()(std::size_t r, std::size_t c) {
    return cells_[r * nodes_ + c];
  }
  std::size_t Degree(std::size_t node) const;
  bool IsSymmetric() const;

  friend bool operator==(const Adjacency&, const Adjacency&) = default;

 private:
  std::size_t nodes_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Edge-local randomized response: every upper-triangle entry goes through
// RrPerturbBit and is mirrored, the diagonal is cleared, and every node left
// without an edge is joined to a uniformly chosen partner.
absl::StatusOr<Adjacency> EdgeRrAdjacency(const Adjacency& adj, double rho,
                                          Rng& rng);

struct NoiseCalibration {
  double epsilon = 0.0;
  double delta = 0.0;
  double sensitivity = 0.0;
  double scale = 0.0;  // sigma (Gaussian) or lambda (Laplace)
};

// Smallest sigma = sqrt(2 ln(1.25/delta)) * sensitivity / epsilon for which
// the classical Gaussian mechanism bound holds; requires epsilon in (0,1).
absl::StatusOr<double> GaussianSigmaFor(double epsilon, double delta,
                                        double sensitivity);
absl::StatusOr<NoiseCalibration> CalibrateGaussian(double epsilon, double delta,
                                                   double sensitivity);
// lambda = sensitivity / epsilon.
absl::StatusOr<double> LaplaceScaleFor(double epsilon, double sensitivity);

}  // namespace dpmi::dp

#endif  // DPMI_DP_MECHANISMS_H_
