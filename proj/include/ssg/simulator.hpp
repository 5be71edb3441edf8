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
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ssg/geometry.hpp"

namespace ssg {

using Rng = std::mt19937_64;

/// Independent stream seed for item `index` under `master` (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Sources plus per-element SNR (dB, per source) and the stream seed for this scene.
struct Scene {
  std::vector<SourceParam> sources;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr double kNoiselessSnr = std::numeric_limits<double>::infinity();

/// Narrowband snapshots: rows are selected elements, columns are time samples.
struct SnapshotBlock {
  Eigen::MatrixXcd data;
  Scene scene;
};

/// x(t) = sum_k a_k s_k(t) + n(t), unit-power circular Gaussian sources and
/// noise power 10^(-snr_db/10) per element. snr_db = +inf gives a noiseless block.
SnapshotBlock generate_snapshots(const ArrayConfig& cfg, const SubarraySelector& sel,
                                 const std::vector<SourceParam>& sources, double snr_db,
                                 int snapshot_count, std::uint64_t seed,
                                 PhaseModel model = PhaseModel::exact);

/// R = X X^H / T_s, Hermitian by construction.
Eigen::MatrixXcd sample_covariance(const SnapshotBlock& block);
Eigen::MatrixXcd sample_covariance(const Eigen::MatrixXcd& data);

/// Infinite-snapshot covariance sum_k a_k a_k^H + noise_power I.
Eigen::MatrixXcd exact_covariance(const ArrayConfig& cfg, const SubarraySelector& sel,
                                  const std::vector<SourceParam>& sources,
                                  double noise_power = 0.0,
                                  PhaseModel model = PhaseModel::exact);

/// Principal submatrix for the rows/cols picked by `sel` from a full-array covariance.
Eigen::MatrixXcd select_covariance(const Eigen::MatrixXcd& full, const SubarraySelector& sel);

}  // namespace ssg
