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

#ifndef DPMI_NN_BACKPROP_H_
#define DPMI_NN_BACKPROP_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/common/matrix.h"
#include "dpmi/nn/network.h"

namespace dpmi::nn {

// Probabilities are clamped to this floor before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

// Cross-entropy of a softmax row at the true label.
double CrossEntropy(std::span<const double> softmax, int label);

// Index of the largest entry; ties go to the lowest index.
std::size_t Argmax(std::span<const double> values);

struct ForwardResult {
  Matrix logits;
  Matrix softmax;
};

absl::StatusOr<ForwardResult> Forward(const Network& net, const Matrix& inputs);

struct PerExampleGradients {
  std::vector<double> losses;
  // One row per example, laid out like Network::params().
  Matrix grads;
};

absl::StatusOr<PerExampleGradients> ComputePerExampleGradients(
    const Network& net, const Matrix& inputs, std::span<const int> labels);

// Scratch buffers for single-example passes; reuse across calls to avoid
// allocation in training loops.
class ExampleWorkspace {
 public:
  explicit ExampleWorkspace(const Network& net);

  // Forward pass of one example. After the call, activations(k) holds the
  // input to layer k (activations(0) is x) and softmax() the output.
  void Forward(const Network& net, std::span<const double> x);

  // Forward + backward of one example. The gradient of the cross-entropy
  // loss w.r.t. every parameter is written into `grad` (overwritten, size
  // num_params). Returns the loss.
  double Backprop(const Network& net, std::span<const double> x, int label,
                  std::span<double> grad);

  std::span<const double> activations(std::size_t k) const {
    return activations_[k];
  }
  std::span<const double> logits() const { return pre_.back(); }
  std::span<const double> softmax() const { return activations_.back(); }

 private:
  // activations_[k] is the input of layer k; activations_.back() is the
  // softmax output.
  std::vector<std::vector<double>> activations_;
  std::vector<std::vector<double>> pre_;
  std::vector<double> delta_;
  std::vector<double> delta_prev_;
};

absl::Status CheckInputs(const Network& net, const Matrix& inputs);
absl::Status CheckBatch(const Network& net, const Matrix& inputs,
                        std::span<const int> labels);

}  // namespace dpmi::nn

#endif  // DPMI_NN_BACKPROP_H_
