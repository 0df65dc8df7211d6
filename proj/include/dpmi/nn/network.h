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

#ifndef DPMI_NN_NETWORK_H_
#define DPMI_NN_NETWORK_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmi/common/matrix.h"
#include "dpmi/common/rng.h"

namespace dpmi::nn {

enum class Activation { kRelu, kSoftmaxOutput };

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

// Feed-forward stack of dense layers: relu on every hidden layer, softmax on
// the output layer. All parameters live in one flat buffer so that
// optimizers, clipping and noise operate on a single contiguous vector.
// Layer k occupies [weights (out x in, row-major) | biases (out)].
class Network {
 public:
  Network() = default;

  // `layer_sizes` = {inputs, hidden..., classes}; needs at least two entries
  // and every size positive. Weights are drawn uniformly from [-s, s] with
  // s = sqrt(6 / (fan_in + fan_out)); biases start at zero.
  static absl::StatusOr<Network> Create(std::span<const std::size_t> layer_sizes,
                                        Rng& rng);
  // Same topology with every parameter zero.
  static absl::StatusOr<Network> Zeros(std::span<const std::size_t> layer_sizes);

  std::size_t num_layers() const { return shapes_.size(); }
  std::size_t input_size() const { return shapes_.front().in; }
  std::size_t num_classes() const { return shapes_.back().out; }
  std::size_t num_params() const { return params_.size(); }
  const LayerShape& layer(std::size_t k) const { return shapes_[k]; }
  Activation activation(std::size_t k) const {
    return k + 1 == shapes_.size() ? Activation::kSoftmaxOutput
                                   : Activation::kRelu;
  }
  std::vector<std::size_t> layer_sizes() const;

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  std::size_t weight_offset(std::size_t k) const { return offsets_[k]; }
  std::size_t bias_offset(std::size_t k) const {
    return offsets_[k] + shapes_[k].in * shapes_[k].out;
  }
  std::span<double> weights(std::size_t k) {
    return {params_.data() + weight_offset(k), shapes_[k].in * shapes_[k].out};
  }
  std::span<const double> weights(std::size_t k) const {
    return {params_.data() + weight_offset(k), shapes_[k].in * shapes_[k].out};
  }
  std::span<double> biases(std::size_t k) {
    return {params_.data() + bias_offset(k), shapes_[k].out};
  }
  std::span<const double> biases(std::size_t k) const {
    return {params_.data() + bias_offset(k), shapes_[k].out};
  }

  bool AllFinite() const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  explicit Network(std::vector<LayerShape> shapes);

  std::vector<LayerShape> shapes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

}  // namespace dpmi::nn

#endif  // DPMI_NN_NETWORK_H_
