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

#include "dpmi/dp/mechanisms.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace dpmi::dp {
namespace {

absl::Status CheckRetention(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("retention probability must lie in [0, 1), got ", rho));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> RrBudget(double rho) {
  if (absl::Status s = CheckRetention(rho); !s.ok()) return s;
  // ln((1 + rho) / (1 - rho)); log1p keeps precision near both ends.
  return std::log1p(rho) - std::log1p(-rho);
}

absl::StatusOr<double> RrRetention(double epsilon_i) {
  if (!(epsilon_i >= 0.0) || !std::isfinite(epsilon_i)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "per-invocation budget must be finite and non-negative, got ",
        epsilon_i));
  }
  return std::tanh(epsilon_i / 2.0);
}

absl::StatusOr<RrParams> RrParams::FromRetention(double rho) {
  auto eps = RrBudget(rho);
  if (!eps.ok()) return eps.status();
  return RrParams(rho, *eps);
}

absl::StatusOr<RrParams> RrParams::FromBudget(double epsilon_i) {
  auto rho = RrRetention(epsilon_i);
  if (!rho.ok()) return rho.status();
  if (*rho >= 1.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("budget ", epsilon_i, " rounds to certain retention"));
  }
  return RrParams(*rho, epsilon_i);
}

absl::StatusOr<int> RrPerturbBit(int bit, double rho, Rng& rng) {
  if (bit != 0 && bit != 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("randomized response needs a bit, got ", bit));
  }
  if (absl::Status s = CheckRetention(rho); !s.ok()) return s;
  if (rng.Uniform() < rho) return bit;
  return rng.Uniform() < 0.5 ? 0 : 1;
}

absl::StatusOr<PerturbedRecord> LdpPerturbRecord(std::span<const double> bits,
                                                 double rho, Rng& rng) {
  if (absl::Status s = CheckRetention(rho); !s.ok()) return s;
  auto eps_i = RrBudget(rho);
  PerturbedRecord out;
  out.bits.reserve(bits.size());
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] != 0.0 && bits[j] != 1.0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "feature ", j, " is not binary (value ", bits[j], ")"));
    }
    auto perturbed = RrPerturbBit(static_cast<int>(bits[j]), rho, rng);
    out.bits.push_back(static_cast<double>(*perturbed));
  }
  out.epsilon = static_cast<double>(bits.size()) * *eps_i;
  return out;
}

absl::StatusOr<double> ComposeLocalBudget(std::span<const double> budgets) {
  // Neumaier summation, so d equal budgets add up to d * eps_i.
  double total = 0.0;
  double carry = 0.0;
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    const double b = budgets[i];
    if (!(b >= 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("budget ", i, " is negative (", b, ")"));
    }
    const double t = total + b;
    carry += std::abs(total) >= b ? (total - t) + b : (b - t) + total;
    total = t;
  }
  return total + carry;
}

double PixelationParams::LaplaceScale() const {
  const double b = static_cast<double>(cell_width);
  return 255.0 * neighborhood / (b * b * epsilon_i);
}

absl::Status PixelationParams::Validate() const {
  if (!(neighborhood > 0.0)) {
    return absl::InvalidArgumentError("neighborhood m must be positive");
  }
  if (cell_width < 1) {
    return absl::InvalidArgumentError("cell width b must be at least 1");
  }
  if (!(epsilon_i > 0.0)) {
    return absl::InvalidArgumentError("per-pixel budget must be positive");
  }
  return absl::OkStatus();
}

absl::StatusOr<Matrix> PixelateImage(const Matrix& image,
                                     const PixelationParams& params, Rng& rng) {
  if (absl::Status s = params.Validate(); !s.ok()) return s;
  if (image.empty()) return absl::InvalidArgumentError("image is empty");
  for (double v : image.values()) {
    if (!(v >= 0.0 && v <= 255.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("not a grayscale image: pixel value ", v));
    }
  }
  const std::size_t b = params.cell_width;
  if (b > image.rows() || b > image.cols()) {
    return absl::InvalidArgumentError(
        absl::StrCat("cell width ", b, " exceeds image size ", image.rows(),
                     "x", image.cols()));
  }
  const double scale = params.LaplaceScale();
  Matrix out(image.rows(), image.cols());
  for (std::size_t r0 = 0; r0 < image.rows(); r0 += b) {
    for (std::size_t c0 = 0; c0 < image.cols(); c0 += b) {
      const std::size_t r1 = std::min(image.rows(), r0 + b);
      const std::size_t c1 = std::min(image.cols(), c0 + b);
      double mean = 0.0;
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) mean += image(r, c);
      }
      mean /= static_cast<double>((r1 - r0) * (c1 - c0));
      const double noisy = std::clamp(mean + rng.Laplace(scale), 0.0, 255.0);
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) out(r, c) = noisy;
      }
    }
  }
  return out;
}

absl::StatusOr<Adjacency> Adjacency::FromMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "adjacency must be square, got ", m.rows(), "x", m.cols()));
  }
  Adjacency adj(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 0.0 && m(r, c) != 1.0) {
        return absl::InvalidArgumentError(absl::StrCat(
            "adjacency entry (", r, ",", c, ") is not binary"));
      }
      adj(r, c) = static_cast<std::uint8_t>(m(r, c));
    }
  }
  return adj;
}

std::size_t Adjacency::Degree(std::size_t node) const {
  std::size_t degree = 0;
  for (std::size_t c = 0; c < nodes_; ++c) degree += (*this)(node, c);
  return degree;
}

bool Adjacency::IsSymmetric() const {
  for (std::size_t r = 0; r < nodes_; ++r) {
    for (std::size_t c = r + 1; c < nodes_; ++c) {
      if ((*this)(r, c) != (*this)(c, r)) return false;
    }
  }
  return true;
}

absl::StatusOr<Adjacency> EdgeRrAdjacency(const Adjacency& adj, double rho,
                                          Rng& rng) {
  if (absl::Status s = CheckRetention(rho); !s.ok()) return s;
  const std::size_t n = adj.nodes();
  Adjacency out(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r + 1; c < n; ++c) {
      auto bit = RrPerturbBit(adj(r, c), rho, rng);
      if (!bit.ok()) return bit.status();
      out(r, c) = out(c, r) = static_cast<std::uint8_t>(*bit);
    }
  }
  if (n < 2) return out;
  for (std::size_t node = 0; node < n; ++node) {
    if (out.Degree(node) > 0) continue;
    std::size_t partner = rng.UniformIndex(n - 1);
    if (partner >= node) ++partner;
    out(node, partner) = out(partner, node) = 1;
  }
  return out;
}

absl::StatusOr<double> GaussianSigmaFor(double epsilon, double delta,
                                        double sensitivity) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "the classical Gaussian mechanism bound needs epsilon in (0,1), got ",
        epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0,1), got ", delta));
  }
  if (!(sensitivity > 0.0)) {
    return absl::InvalidArgumentError("sensitivity must be positive");
  }
  return std::sqrt(2.0 * std::log(1.25 / delta)) * sensitivity / epsilon;
}

absl::StatusOr<NoiseCalibration> CalibrateGaussian(double epsilon, double delta,
                                                   double sensitivity) {
  auto sigma = GaussianSigmaFor(epsilon, delta, sensitivity);
  if (!sigma.ok()) return sigma.status();
  return NoiseCalibration{epsilon, delta, sensitivity, *sigma};
}

absl::StatusOr<double> LaplaceScaleFor(double epsilon, double sensitivity) {
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  if (!(sensitivity > 0.0)) {
    return absl::InvalidArgumentError("sensitivity must be positive");
  }
  return sensitivity / epsilon;
}

}  // namespace dpmi::dp
