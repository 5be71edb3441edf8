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
#include <functional>
#include <string>
#include <vector>

#include "ssg/dataset.hpp"
#include "ssg/model.hpp"
#include "ssg/spectrum.hpp"
#include "ssg/tensor.hpp"

namespace ssg {

/// Linear beta schedule. Arrays are indexed by t - 1 for t = 1..steps.
struct NoiseSchedule {
  int steps = 0;
  double beta_min = 0.0;
  double beta_max = 0.0;
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;

  /// Cumulative product up to t; alpha_bar(0) = 1.
  double alpha_bar_at(int t) const { return t == 0 ? 1.0 : alpha_bar.at(static_cast<std::size_t>(t - 1)); }
  double beta_at(int t) const { return beta.at(static_cast<std::size_t>(t - 1)); }
  double alpha_at(int t) const { return alpha.at(static_cast<std::size_t>(t - 1)); }
  bool operator==(const NoiseSchedule&) const = default;
};

NoiseSchedule make_schedule(int steps, double beta_min, double beta_max,
                            const std::string& shape = "linear");

/// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.
template <typename T>
nn::Tensor<T> q_sample(const nn::Tensor<T>& x0, int t, const nn::Tensor<T>& eps,
                       const NoiseSchedule& sched);

/// Same as q_sample with an explicit abar (used for the abar = 0 / 1 limits).
template <typename T>
nn::Tensor<T> q_sample_abar(const nn::Tensor<T>& x0, double alpha_bar, const nn::Tensor<T>& eps);

struct DiffusionHyper {
  int epochs = 200;
  int batch = 16;
  double lr = 1e-3;
  /// Learning rate decays along a half cosine to lr * lr_floor over the run.
  double lr_floor = 0.05;
  int steps = 10;
  double beta_min = 0.05;
  double beta_max = 0.45;
  std::uint64_t seed = 1;
  /// Held-out test pairs scored for the per-epoch reward.
  std::size_t reward_subset = 32;
  /// Exponential moving average of weights used for evaluation and export; 0 disables.
  double ema_decay = 0.999;
  nn::Architecture arch;

  void validate() const;
  bool operator==(const DiffusionHyper&) const = default;
};

struct DenoiserModel {
  nn::Architecture arch;
  nn::ParamStore<float> params;
  NoiseSchedule schedule;
  SpectrumGrid grid;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double test_reward = 0.0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  DiffusionHyper hyper;
};

struct TrainResult {
  DenoiserModel model;
  TrainReport report;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Denoising-diffusion training on (ambiguous -> clear) pairs with x0 prediction.
/// Deterministic given hyper.seed.
TrainResult train(const std::vector<PairRecord>& train_set, const std::vector<PairRecord>& test_set,
                  const DiffusionHyper& hyper, const EpochCallback& on_epoch = {});

/// x0 prediction for a batch of noisy inputs at step t, shapes [B,1,H,W].
using DenoiseFn = std::function<nn::Tensor<float>(const nn::Tensor<float>& noisy, int t)>;

/// Reverse process from x_T ~ N(0, I). Each batch item draws noise from its own seed,
/// so results do not depend on batching. `trajectory`, when given, receives
/// x_T, ..., x_0 for every item (outer index = item).
std::vector<SpectrumMatrix> run_sampler(const DenoiseFn& denoise_fn, const SpectrumGrid& grid,
                                        const NoiseSchedule& sched,
                                        const std::vector<std::uint64_t>& seeds,
                                        std::vector<std::vector<SpectrumMatrix>>* trajectory = nullptr);

std::vector<SpectrumMatrix> sample_batch(const DenoiserModel& model,
                                         const std::vector<const SpectrumMatrix*>& conditions,
                                         const std::vector<std::uint64_t>& seeds,
                                         std::vector<std::vector<SpectrumMatrix>>* trajectory = nullptr);

SpectrumMatrix sample(const DenoiserModel& model, const SpectrumMatrix& condition, std::uint64_t seed,
                      std::vector<SpectrumMatrix>* trajectory = nullptr);

/// -100 x mean squared difference.
double reward(const SpectrumMatrix& generated, const SpectrumMatrix& expert);

/// Seed used for sample `index` of an evaluation or reward pass.
std::uint64_t sample_seed(std::uint64_t seed, std::size_t index);

void save_model(const DenoiserModel& model, const std::filesystem::path& path);
DenoiserModel load_model(const std::filesystem::path& path);
std::string serialize_model(const DenoiserModel& model);
DenoiserModel deserialize_model(std::string_view bytes, const std::string& path);

/// epoch,train_loss,test_reward
std::string report_csv(const TrainReport& report);

nlohmann::json to_json(const DiffusionHyper& hyper);
DiffusionHyper diffusion_hyper_from_json(const nlohmann::json& j, DiffusionHyper base = {});

}  // namespace ssg
