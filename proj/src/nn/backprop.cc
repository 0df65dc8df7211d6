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

#include "dpmi/nn/backprop.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "dpmi/kernels/kernels.h"

namespace dpmi::nn {
namespace {

void SoftmaxInPlace(std::span<const double> logits, std::span<double> out) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max_logit);
    total += out[i];
  }
  for (double& p : out) p /= total;
}

}  // namespace

double CrossEntropy(std::span<const double> softmax, int label) {
  return -std::log(
      std::max(softmax[static_cast<std::size_t>(label)], kProbabilityFloor));
}

std::size_t Argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

absl::Status CheckInputs(const Network& net, const Matrix& inputs) {
  if (net.num_layers() == 0) {
    return absl::FailedPreconditionError("network has no layers");
  }
  if (inputs.cols() != net.input_size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("shape mismatch: inputs have ", inputs.cols(),
                     " features, network expects ", net.input_size()));
  }
  return absl::OkStatus();
}

absl::Status CheckBatch(const Network& net, const Matrix& inputs,
                        std::span<const int> labels) {
  if (absl::Status s = CheckInputs(net, inputs); !s.ok()) return s;
  if (labels.size() != inputs.rows()) {
    return absl::InvalidArgumentError(
        absl::StrCat("shape mismatch: ", inputs.rows(), " inputs but ",
                     labels.size(), " labels"));
  }
  const int classes = static_cast<int>(net.num_classes());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes) {
      return absl::InvalidArgumentError(absl::StrCat(
          "label ", labels[i], " of example ", i, " outside [0, ", classes,
          ")"));
    }
  }
  return absl::OkStatus();
}

ExampleWorkspace::ExampleWorkspace(const Network& net) {
  activations_.resize(net.num_layers() + 1);
  pre_.resize(net.num_layers());
  activations_[0].resize(net.input_size());
  std::size_t widest = net.input_size();
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    activations_[k + 1].resize(net.layer(k).out);
    pre_[k].resize(net.layer(k).out);
    widest = std::max(widest, net.layer(k).out);
  }
  delta_.resize(widest);
  delta_prev_.resize(widest);
}

void ExampleWorkspace::Forward(const Network& net, std::span<const double> x) {
  const kernels::KernelTable& kt = kernels::Active();
  std::copy(x.begin(), x.end(), activations_[0].begin());
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    const LayerShape& s = net.layer(k);
    kt.affine(net.weights(k).data(), net.biases(k).data(),
              activations_[k].data(), pre_[k].data(), s.out, s.in);
    if (net.activation(k) == Activation::kRelu) {
      for (std::size_t j = 0; j < s.out; ++j) {
        activations_[k + 1][j] = pre_[k][j] > 0.0 ? pre_[k][j] : 0.0;
      }
    } else {
      SoftmaxInPlace(pre_[k], activations_[k + 1]);
    }
  }
}

double ExampleWorkspace::Backprop(const Network& net, std::span<const double> x,
                                  int label, std::span<double> grad) {
  const kernels::KernelTable& kt = kernels::Active();
  Forward(net, x);
  std::fill(grad.begin(), grad.end(), 0.0);

  const std::size_t last = net.num_layers() - 1;
  const auto probs = activations_.back();
  const std::size_t classes = net.num_classes();
  for (std::size_t j = 0; j < classes; ++j) delta_[j] = probs[j];
  delta_[static_cast<std::size_t>(label)] -= 1.0;
  const double loss = CrossEntropy(probs, label);

  for (std::size_t k = last + 1; k-- > 0;) {
    const LayerShape& s = net.layer(k);
    double* gw = grad.data() + net.weight_offset(k);
    double* gb = grad.data() + net.bias_offset(k);
    const double* input = activations_[k].data();
    for (std::size_t r = 0; r < s.out; ++r) {
      gb[r] = delta_[r];
      if (delta_[r] != 0.0) kt.axpy(delta_[r], input, gw + r * s.in, s.in);
    }
    if (k == 0) break;
    std::fill(delta_prev_.begin(), delta_prev_.begin() + s.in, 0.0);
    kt.affine_transpose_acc(net.weights(k).data(), delta_.data(),
                            delta_prev_.data(), s.out, s.in);
    // relu'(z) of the previous layer's pre-activation.
    for (std::size_t j = 0; j < s.in; ++j) {
      delta_[j] = pre_[k - 1][j] > 0.0 ? delta_prev_[j] : 0.0;
    }
  }
  return loss;
}

absl::StatusOr<ForwardResult> Forward(const Network& net, const Matrix& inputs) {
  if (absl::Status s = CheckInputs(net, inputs); !s.ok()) return s;
  ForwardResult result{Matrix(inputs.rows(), net.num_classes()),
                       Matrix(inputs.rows(), net.num_classes())};
  ExampleWorkspace ws(net);
  for (std::size_t i = 0; i < inputs.rows(); ++i) {
    ws.Forward(net, inputs.row(i));
    std::copy(ws.logits().begin(), ws.logits().end(),
              result.logits.row(i).begin());
    std::copy(ws.softmax().begin(), ws.softmax().end(),
              result.softmax.row(i).begin());
  }
  return result;
}

absl::StatusOr<PerExampleGradients> ComputePerExampleGradients(
    const Network& net, const Matrix& inputs, std::span<const int> labels) {
  if (absl::Status s = CheckBatch(net, inputs, labels); !s.ok()) return s;
  PerExampleGradients out{std::vector<double>(inputs.rows()),
                          Matrix(inputs.rows(), net.num_params())};
  ExampleWorkspace ws(net);
  for (std::size_t i = 0; i < inputs.rows(); ++i) {
    out.losses[i] = ws.Backprop(net, inputs.row(i), labels[i], out.grads.row(i));
  }
  return out;
}

}  // namespace dpmi::nn
