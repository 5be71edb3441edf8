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

#include "ssg/model.hpp"

#include <cmath>
#include <cstring>
#include <random>

#include "ssg/error.hpp"
#include "ssg/io.hpp"
#include "ssg/json_util.hpp"

namespace ssg::nn {

using nlohmann::json;

void Architecture::validate() const {
  require(embedding_dim >= 2 && embedding_dim % 2 == 0, "embedding_dim must be even and >= 2");
  require(stem_channels >= 1 && width >= 1 && head_channels >= 1, "channel counts must be >= 1");
  require(!dilations.empty(), "at least one residual block is required");
  for (int d : dilations) require(d >= 1, "dilations must be >= 1");
}

std::vector<LayerSpec> layer_list(const Architecture& a) {
  std::vector<LayerSpec> layers;
  layers.push_back({"time_in", "dense", a.embedding_dim, 2, 1, 1});
  layers.push_back({"stem", "conv2d", a.input_channels(), a.stem_channels, 3, 1});
  int channels = a.stem_channels;
  for (std::size_t b = 0; b < a.dilations.size(); ++b) {
    const std::string prefix = "block" + std::to_string(b) + ".";
    const int d = a.dilations[b];
    layers.push_back({prefix + "conv1", "conv2d", channels, a.width, 3, d});
    layers.push_back({prefix + "time", "dense", a.embedding_dim, a.width, 1, 1});
    layers.push_back({prefix + "conv2", "conv2d", a.width, a.width, 3, d});
    if (channels != a.width) layers.push_back({prefix + "skip", "conv2d", channels, a.width, 1, 1});
    channels = a.width;
  }
  layers.push_back({"head1", "conv2d", channels, a.head_channels, 3, 1});
  layers.push_back({"head2", "conv2d", a.head_channels, 1, 3, 1});
  return layers;
}

namespace {

std::vector<std::pair<std::string, std::vector<int>>> param_shapes(const Architecture& a) {
  std::vector<std::pair<std::string, std::vector<int>>> shapes;
  for (const auto& l : layer_list(a)) {
    if (l.type == "conv2d")
      shapes.push_back({l.name + ".weight", {l.out, l.in, l.kernel, l.kernel}});
    else
      shapes.push_back({l.name + ".weight", {l.out, l.in}});
    shapes.push_back({l.name + ".bias", {l.out}});
  }
  return shapes;
}

}  // namespace

json architecture_descriptor(const Architecture& a) {
  json layers = json::array();
  for (const auto& l : layer_list(a))
    layers.push_back({{"name", l.name},
                      {"type", l.type},
                      {"in", l.in},
                      {"out", l.out},
                      {"kernel", l.kernel},
                      {"dilation", l.dilation}});
  json params = json::array();
  for (const auto& [name, shape] : param_shapes(a)) params.push_back({{"name", name}, {"shape", shape}});
  return {
      {"type", "ssg-denoiser"},
      {"version", 1},
      {"embedding_dim", a.embedding_dim},
      {"stem_channels", a.stem_channels},
      {"width", a.width},
      {"head_channels", a.head_channels},
      {"coordinate_channels", a.coordinate_channels},
      {"dilations", a.dilations},
      {"input_channels", a.input_channels()},
      {"output", "x0"},
      {"activation", "silu"},
      {"layers", layers},
      {"params", params},
  };
}

Architecture architecture_from_descriptor(const json& j) {
  Architecture a;
  json layers, params;
  json_util::visit_object(j, "architecture", [&](const std::string& k, const json& v) {
    if (k == "type") {
      if (v.get<std::string>() != "ssg-denoiser") fail(ErrorCode::format, "not an ssg-denoiser descriptor");
    } else if (k == "version") {
      if (v.get<int>() != 1) fail(ErrorCode::format, "unsupported architecture version");
    } else if (k == "embedding_dim") a.embedding_dim = v.get<int>();
    else if (k == "stem_channels") a.stem_channels = v.get<int>();
    else if (k == "width") a.width = v.get<int>();
    else if (k == "head_channels") a.head_channels = v.get<int>();
    else if (k == "coordinate_channels") a.coordinate_channels = v.get<bool>();
    else if (k == "dilations") a.dilations = v.get<std::vector<int>>();
    else if (k == "layers") layers = v;
    else if (k == "params") params = v;
    else if (k == "input_channels" || k == "output" || k == "activation") {
    } else return false;
    return true;
  });
  a.validate();
  const json expected = architecture_descriptor(a);
  if ((!layers.is_null() && layers != expected["layers"]) ||
      (!params.is_null() && params != expected["params"]))
    fail(ErrorCode::format, "architecture descriptor layers disagree with its fields");
  return a;
}

template <typename T>
ParamStore<T> init_params(const Architecture& arch, std::uint64_t seed) {
  arch.validate();
  std::mt19937_64 rng(seed);
  ParamStore<T> store;
  for (const auto& [name, shape] : param_shapes(arch)) {
    Tensor<T> t(shape);
    if (shape.size() > 1) {
      std::size_t fan_in = 1;
      for (std::size_t i = 1; i < shape.size(); ++i) fan_in *= static_cast<std::size_t>(shape[i]);
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(u(rng));
    }
    store.add(name, std::move(t));
  }
  return store;
}

template <typename T>
Tensor<T> timestep_embedding(std::span<const int> steps, int dim) {
  const int half = dim / 2;
  Tensor<T> out({static_cast<int>(steps.size()), dim});
  for (std::size_t n = 0; n < steps.size(); ++n) {
    for (int i = 0; i < half; ++i) {
      const double freq = std::exp(-std::log(10000.0) * i / half);
      const double arg = steps[n] * freq;
      out[n * dim + i] = static_cast<T>(std::sin(arg));
      out[n * dim + half + i] = static_cast<T>(std::cos(arg));
    }
  }
  return out;
}

template <typename T>
std::map<std::string, Var> bind_params(Tape<T>& tape, const ParamStore<T>& params, bool trainable) {
  std::map<std::string, Var> out;
  for (const auto& e : params.entries())
    out[e.name] = trainable ? tape.leaf(e.value) : tape.constant(e.value);
  return out;
}

template <typename T>
Var denoiser_forward(Tape<T>& tape, const Architecture& arch, const std::map<std::string, Var>& p,
                     Var noisy, Var condition, std::span<const int> steps) {
  const auto& shape = tape.value(noisy).shape();
  if (shape.size() != 4 || shape[1] != 1 || tape.value(condition).shape() != shape)
    fail(ErrorCode::shape_mismatch, "denoiser expects matching [B,1,H,W] noisy and condition inputs");
  const int batch = shape[0], height = shape[2], width = shape[3];
  if (static_cast<int>(steps.size()) != batch)
    fail(ErrorCode::shape_mismatch, "one timestep per batch item is required");

  auto w = [&](const std::string& layer) { return p.at(layer + ".weight"); };
  auto b = [&](const std::string& layer) { return p.at(layer + ".bias"); };

  const Var emb = tape.constant(timestep_embedding<T>(steps, arch.embedding_dim));
  std::vector<Var> inputs{noisy, condition};
  if (arch.coordinate_channels) {
    Tensor<T> coords({batch, 2, height, width});
    for (int n = 0; n < batch; ++n)
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
          coords.at(n, 0, y, x) = static_cast<T>(height > 1 ? 2.0 * y / (height - 1) - 1.0 : 0.0);
          coords.at(n, 1, y, x) = static_cast<T>(width > 1 ? 2.0 * x / (width - 1) - 1.0 : 0.0);
        }
    inputs.push_back(tape.constant(std::move(coords)));
  }
  inputs.push_back(tape.broadcast_planes(tape.dense(emb, w("time_in"), b("time_in")), height, width));

  Var h = tape.silu(tape.conv2d(tape.concat_channels(inputs), w("stem"), b("stem")));
  int channels = arch.stem_channels;
  for (std::size_t i = 0; i < arch.dilations.size(); ++i) {
    const std::string prefix = "block" + std::to_string(i) + ".";
    const int d = arch.dilations[i];
    Var a = tape.conv2d(h, w(prefix + "conv1"), b(prefix + "conv1"), d);
    a = tape.silu(tape.add_channel_bias(a, tape.dense(emb, w(prefix + "time"), b(prefix + "time"))));
    a = tape.conv2d(a, w(prefix + "conv2"), b(prefix + "conv2"), d);
    const Var skip = channels == arch.width ? h : tape.conv2d(h, w(prefix + "skip"), b(prefix + "skip"));
    h = tape.silu(tape.add(skip, a));
    channels = arch.width;
  }
  h = tape.silu(tape.conv2d(h, w("head1"), b("head1")));
  return tape.conv2d(h, w("head2"), b("head2"));
}

template <typename T>
Tensor<T> denoise(const Architecture& arch, const ParamStore<T>& params, const Tensor<T>& noisy,
                  const Tensor<T>& condition, std::span<const int> steps) {
  Tape<T> tape;
  const auto p = bind_params(tape, params, false);
  const Var out = denoiser_forward(tape, arch, p, tape.constant(noisy), tape.constant(condition), steps);
  return tape.value(out);
}

std::string param_blob(const ParamStore<float>& params) {
  const auto flat = params.flatten();
  std::string out(flat.size() * sizeof(float), '\0');
  std::memcpy(out.data(), flat.data(), out.size());
  return out;
}

ParamStore<float> params_from_blob(const Architecture& arch, std::string_view blob,
                                   const std::string& path) {
  ParamStore<float> store = init_params<float>(arch, 0);
  const std::size_t expected = store.parameter_count() * sizeof(float);
  if (blob.size() != expected)
    fail(ErrorCode::format,
         "parameter blob is " + std::to_string(blob.size()) + " bytes, architecture needs " +
             std::to_string(expected),
         path);
  std::vector<float> flat(store.parameter_count());
  std::memcpy(flat.data(), blob.data(), blob.size());
  store.unflatten(flat);
  for (const auto& e : store.entries())
    if (!e.value.all_finite()) fail(ErrorCode::numeric, "non-finite parameter in '" + e.name + "'", path);
  return store;
}

template ParamStore<float> init_params<float>(const Architecture&, std::uint64_t);
template ParamStore<double> init_params<double>(const Architecture&, std::uint64_t);
template Tensor<float> timestep_embedding<float>(std::span<const int>, int);
template Tensor<double> timestep_embedding<double>(std::span<const int>, int);
template std::map<std::string, Var> bind_params<float>(Tape<float>&, const ParamStore<float>&, bool);
template std::map<std::string, Var> bind_params<double>(Tape<double>&, const ParamStore<double>&, bool);
template Var denoiser_forward<float>(Tape<float>&, const Architecture&, const std::map<std::string, Var>&,
                                     Var, Var, std::span<const int>);
template Var denoiser_forward<double>(Tape<double>&, const Architecture&, const std::map<std::string, Var>&,
                                      Var, Var, std::span<const int>);
template Tensor<float> denoise<float>(const Architecture&, const ParamStore<float>&, const Tensor<float>&,
                                      const Tensor<float>&, std::span<const int>);
template Tensor<double> denoise<double>(const Architecture&, const ParamStore<double>&, const Tensor<double>&,
                                        const Tensor<double>&, std::span<const int>);

}  // namespace ssg::nn
