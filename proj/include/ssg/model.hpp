// Copyright 2026 The SSG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssg/tensor.hpp"

namespace ssg::nn {

/// Shape of the conditional x0-predicting denoiser. Every conv keeps H x W.
///
/// input  = [x_t, condition, (theta, range coordinate planes), 2 timestep planes]
/// stem   = conv3x3 -> stem_channels, SiLU
/// blocks = residual conv pairs at `width` channels, timestep bias after the first conv
/// head   = conv3x3 -> head_channels, SiLU, conv3x3 -> 1
struct Architecture {
  int embedding_dim = 16;
  int stem_channels = 16;
  int width = 32;
  int head_channels = 16;
  bool coordinate_channels = true;
  /// One entry per residual block.
  std::vector<int> dilations{1, 2};

  int input_channels() const { return 2 + (coordinate_channels ? 2 : 0) + 2; }
  void validate() const;
  bool operator==(const Architecture&) const = default;
};

struct LayerSpec {
  std::string name;
  std::string type;  // conv2d | dense
  int in = 0;
  int out = 0;
  int kernel = 1;
  int dilation = 1;
};

/// Ordered layer list implied by an architecture.
std::vector<LayerSpec> layer_list(const Architecture& arch);

/// Structured-text descriptor: architecture fields, layers and parameter shapes in blob order.
nlohmann::json architecture_descriptor(const Architecture& arch);
/// Rejects unknown keys and descriptors whose layer list disagrees with the fields.
Architecture architecture_from_descriptor(const nlohmann::json& j);

/// He-uniform weights, zero biases; deterministic in `seed`.
template <typename T>
ParamStore<T> init_params(const Architecture& arch, std::uint64_t seed);

/// Sinusoidal embedding of integer timesteps, shape [B, dim].
template <typename T>
Tensor<T> timestep_embedding(std::span<const int> steps, int dim);

/// Binds parameters onto a tape: as leaves when training, constants otherwise.
template <typename T>
std::map<std::string, Var> bind_params(Tape<T>& tape, const ParamStore<T>& params, bool trainable);

/// Forward pass. noisy and condition are [B,1,H,W]; returns predicted clean spectra [B,1,H,W].
template <typename T>
Var denoiser_forward(Tape<T>& tape, const Architecture& arch, const std::map<std::string, Var>& p,
                     Var noisy, Var condition, std::span<const int> steps);

/// Convenience inference call without gradients.
template <typename T>
Tensor<T> denoise(const Architecture& arch, const ParamStore<T>& params, const Tensor<T>& noisy,
                  const Tensor<T>& condition, std::span<const int> steps);

/// Flat little-endian f32 values in descriptor order.
std::string param_blob(const ParamStore<float>& params);
/// Rebuilds the store for `arch`; the blob length must match exactly.
ParamStore<float> params_from_blob(const Architecture& arch, std::string_view blob,
                                   const std::string& path);

}  // namespace ssg::nn
