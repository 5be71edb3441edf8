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

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "doctest.h"
#include "ssg/error.hpp"
#include "ssg/model.hpp"

using namespace ssg;
using namespace ssg::nn;

namespace {

Architecture tiny() {
  Architecture a;
  a.embedding_dim = 4;
  a.stem_channels = 3;
  a.width = 4;
  a.head_channels = 3;
  a.dilations = {1, 2};
  return a;
}

template <typename T>
Tensor<T> uniform(std::vector<int> shape, std::mt19937_64& rng) {
  Tensor<T> t(std::move(shape));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(u(rng));
  return t;
}

}  // namespace

TEST_CASE("baseline layer list") {
  Architecture a;
  a.coordinate_channels = false;
  a.dilations = {1, 1};
  CHECK(a.input_channels() == 4);
  const auto layers = layer_list(a);
  REQUIRE(layers.size() == 11);
  CHECK(layers[1].name == "stem");
  CHECK(layers[1].in == 4);
  CHECK(layers[1].out == 16);
  CHECK(layers[1].kernel == 3);
  CHECK(layers[2].name == "block0.conv1");
  CHECK(layers[2].out == 32);
  CHECK(layers[5].name == "block0.skip");
  CHECK(layers[5].kernel == 1);
  CHECK(layers[8].name == "block1.conv2");  // no skip once the width matches
  CHECK(layers[9].out == 16);
  CHECK(layers[10].out == 1);
  CHECK(Architecture{}.input_channels() == 6);
}

TEST_CASE("architecture descriptor") {
  const Architecture a = tiny();
  const auto j = architecture_descriptor(a);
  CHECK(j["type"] == "ssg-denoiser");
  CHECK(architecture_from_descriptor(j) == a);

  auto tampered = j;
  tampered["layers"][1]["out"] = 99;
  CHECK_THROWS_AS(architecture_from_descriptor(tampered), Error);
  auto unknown = j;
  unknown["depth"] = 3;
  CHECK_THROWS_AS(architecture_from_descriptor(unknown), Error);
  auto wrong_type = j;
  wrong_type["type"] = "unet";
  CHECK_THROWS_AS(architecture_from_descriptor(wrong_type), Error);

  Architecture bad = tiny();
  bad.embedding_dim = 3;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = tiny();
  bad.dilations.clear();
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("parameter initialization") {
  const Architecture a = tiny();
  const auto p = init_params<float>(a, 3);
  CHECK(p.flatten() == init_params<float>(a, 3).flatten());
  CHECK(p.flatten() != init_params<float>(a, 4).flatten());
  std::size_t expected = 0;
  for (const auto& l : layer_list(a))
    expected += static_cast<std::size_t>(l.out) * l.in * (l.type == "conv2d" ? l.kernel * l.kernel : 1) + l.out;
  CHECK(p.parameter_count() == expected);
  const auto& w = p.get("stem.weight");
  const float bound = std::sqrt(6.0f / (a.input_channels() * 9));
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(w[i]) <= bound);
  for (float b : p.get("head2.bias").values()) CHECK(b == 0.0f);
}

TEST_CASE("timestep embedding") {
  const std::vector<int> steps{0, 3};
  const auto e = timestep_embedding<double>(steps, 6);
  CHECK(e.shape() == std::vector<int>{2, 6});
  for (int i = 0; i < 3; ++i) {
    CHECK(e[static_cast<std::size_t>(i)] == 0.0);
    CHECK(e[static_cast<std::size_t>(3 + i)] == 1.0);
  }
  CHECK(e[6] == doctest::Approx(std::sin(3.0)));
  CHECK(e[7] == doctest::Approx(std::sin(3.0 * std::pow(10000.0, -1.0 / 3.0))));
}

TEST_CASE("forward pass shapes and determinism") {
  std::mt19937_64 rng(8);
  const Architecture a = tiny();
  const auto p = init_params<float>(a, 1);
  const auto x = uniform<float>({2, 1, 7, 5}, rng);
  const auto c = uniform<float>({2, 1, 7, 5}, rng);
  const std::vector<int> steps{1, 10};
  const auto y = denoise(a, p, x, c, steps);
  CHECK(y.shape() == x.shape());
  CHECK(y.values() == denoise(a, p, x, c, steps).values());
  CHECK(y.all_finite());

  // Batch items are independent of each other.
  Tensor<float> x0({1, 1, 7, 5}), c0({1, 1, 7, 5});
  std::copy(x.data(), x.data() + 35, x0.data());
  std::copy(c.data(), c.data() + 35, c0.data());
  const std::vector<int> first{1};
  const auto y0 = denoise(a, p, x0, c0, first);
  for (std::size_t i = 0; i < 35; ++i) CHECK(y0[i] == doctest::Approx(y[i]).epsilon(1e-5));

  // The timestep and the condition both reach the output.
  const std::vector<int> other{5, 10};
  CHECK(denoise(a, p, x, c, other).values() != y.values());
  CHECK(denoise(a, p, x, x, steps).values() != y.values());

  CHECK_THROWS_AS(denoise(a, p, x, uniform<float>({2, 1, 7, 4}, rng), steps), Error);
  CHECK_THROWS_AS(denoise(a, p, x, c, std::vector<int>{1}), Error);
}

TEST_CASE("float and double forward passes agree") {
  std::mt19937_64 rng(9);
  const Architecture a = tiny();
  const auto pf = init_params<float>(a, 2);
  const auto pd = pf.cast<double>();
  const auto x = uniform<float>({1, 1, 6, 6}, rng);
  const auto c = uniform<float>({1, 1, 6, 6}, rng);
  const std::vector<int> steps{4};
  const auto yf = denoise(a, pf, x, c, steps);
  const auto yd = denoise(a, pd, x.cast<double>(), c.cast<double>(), steps);
  for (std::size_t i = 0; i < yf.size(); ++i) CHECK(yf[i] == doctest::Approx(yd[i]).epsilon(1e-4));
}

TEST_CASE("denoiser gradients against finite differences") {
  std::mt19937_64 rng(10);
  const Architecture a = tiny();
  auto params = init_params<double>(a, 5);
  // Non-zero biases so their gradients are exercised away from the init point.
  for (auto& e : params.entries())
    for (std::size_t i = 0; i < e.value.size(); ++i)
      if (e.value.rank() == 1) e.value[i] = 0.1 * std::sin(static_cast<double>(i) + 1.0);
  const auto x = uniform<double>({2, 1, 5, 4}, rng);
  const auto c = uniform<double>({2, 1, 5, 4}, rng);
  const auto target = uniform<double>({2, 1, 5, 4}, rng);
  const std::vector<int> steps{2, 9};

  auto loss_of = [&](const ParamStore<double>& p, std::map<std::string, Var>* bound, Tape<double>& tape) {
    auto vars = bind_params(tape, p, bound != nullptr);
    if (bound) *bound = vars;
    const Var y = denoiser_forward(tape, a, vars, tape.constant(x), tape.constant(c), steps);
    return tape.mse_loss(y, tape.constant(target));
  };

  Tape<double> tape;
  std::map<std::string, Var> vars;
  tape.backward(loss_of(params, &vars, tape));

  const double h = 1e-5;
  for (const char* name : {"time_in.weight", "stem.weight", "block0.conv1.weight", "block0.time.bias",
                           "block1.conv2.weight", "block0.skip.bias", "head2.weight", "head2.bias"}) {
    const Tensor<double> analytic = tape.grad(vars.at(name));
    double diff = 0.0, scale = 1e-8;
    auto& value = params.get(name);
    for (std::size_t i = 0; i < value.size(); i += 1 + value.size() / 12) {
      const double keep = value[i];
      value[i] = keep + h;
      Tape<double> up_tape;
      const double up = up_tape.value(loss_of(params, nullptr, up_tape))[0];
      value[i] = keep - h;
      Tape<double> down_tape;
      const double down = down_tape.value(loss_of(params, nullptr, down_tape))[0];
      value[i] = keep;
      const double numeric = (up - down) / (2.0 * h);
      diff = std::max(diff, std::abs(numeric - analytic[i]));
      scale = std::max(scale, std::abs(numeric));
    }
    CHECK_MESSAGE(diff / scale <= 1e-4, name);
  }
}

TEST_CASE("parameter blob") {
  const Architecture a = tiny();
  const auto p = init_params<float>(a, 6);
  const std::string blob = param_blob(p);
  CHECK(blob.size() == p.parameter_count() * sizeof(float));
  const auto back = params_from_blob(a, blob, "blob");
  CHECK(back.flatten() == p.flatten());
  CHECK(param_blob(back) == blob);

  try {
    params_from_blob(a, blob.substr(0, blob.size() - 4), "short.bin");
    FAIL("expected a length error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::format);
    CHECK(e.path() == "short.bin");
  }
  std::string poisoned = blob;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(poisoned.data() + 8, &nan, sizeof(float));
  CHECK_THROWS_AS(params_from_blob(a, poisoned, "nan.bin"), Error);
}
