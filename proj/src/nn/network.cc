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

#include "dpmi/nn/network.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace dpmi::nn {
namespace {

absl::StatusOr<std::vector<LayerShape>> ShapesFor(
    std::span<const std::size_t> layer_sizes) {
  if (layer_sizes.size() < 2) {
    return absl::InvalidArgumentError(
        "a network needs an input size and at least one layer");
  }
  std::vector<LayerShape> shapes;
  for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
    if (layer_sizes[k] == 0 || layer_sizes[k + 1] == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("layer size ", k, " is zero"));
    }
    shapes.push_back({layer_sizes[k], layer_sizes[k + 1]});
  }
  return shapes;
}

}  // namespace

Network::Network(std::vector<LayerShape> shapes) : shapes_(std::move(shapes)) {
  std::size_t total = 0;
  for (const LayerShape& s : shapes_) {
    offsets_.push_back(total);
    total += s.in * s.out + s.out;
  }
  params_.assign(total, 0.0);
}

absl::StatusOr<Network> Network::Zeros(
    std::span<const std::size_t> layer_sizes) {
  auto shapes = ShapesFor(layer_sizes);
  if (!shapes.ok()) return shapes.status();
  return Network(*std::move(shapes));
}

absl::StatusOr<Network> Network::Create(
    std::span<const std::size_t> layer_sizes, Rng& rng) {
  auto net = Zeros(layer_sizes);
  if (!net.ok()) return net.status();
  for (std::size_t k = 0; k < net->num_layers(); ++k) {
    const LayerShape& s = net->layer(k);
    const double limit = std::sqrt(6.0 / static_cast<double>(s.in + s.out));
    for (double& w : net->weights(k)) w = (2.0 * rng.Uniform() - 1.0) * limit;
  }
  return net;
}

std::vector<std::size_t> Network::layer_sizes() const {
  std::vector<std::size_t> sizes;
  if (shapes_.empty()) return sizes;
  sizes.push_back(shapes_.front().in);
  for (const LayerShape& s : shapes_) sizes.push_back(s.out);
  return sizes;
}

bool Network::AllFinite() const {
  for (double p : params_) {
    if (!std::isfinite(p)) return false;
  }
  return true;
}

}  // namespace dpmi::nn
