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

#include "ssg/simulator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ssg/error.hpp"

namespace ssg {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

// Circular complex Gaussian with E|z|^2 = power.
std::complex<double> complex_gaussian(Rng& rng, std::normal_distribution<double>& normal,
                                      double power) {
  const double s = std::sqrt(power / 2.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {s * re, s * im};
}

}  // namespace

SnapshotBlock generate_snapshots(const ArrayConfig& cfg, const SubarraySelector& sel,
                                 const std::vector<SourceParam>& sources, double snr_db,
                                 int snapshot_count, std::uint64_t seed, PhaseModel model) {
  cfg.validate();
  sel.validate(cfg);
  require(!sources.empty(), "at least one source is required");
  require(sources.size() < sel.size(),
          "source count " + std::to_string(sources.size()) +
              " must be smaller than the subarray size " + std::to_string(sel.size()));
  require(snapshot_count >= static_cast<int>(sel.size()),
          "snapshot count must be at least the number of elements");
  require(!std::isnan(snr_db) && snr_db != -std::numeric_limits<double>::infinity(),
          "snr must be finite or +inf");
  for (const auto& s : sources) s.validate();

  const auto positions = element_positions(cfg, sel);
  const auto m = static_cast<Eigen::Index>(sel.size());
  const auto k = static_cast<Eigen::Index>(sources.size());

  Eigen::MatrixXcd steering(m, k);
  for (Eigen::Index j = 0; j < k; ++j) steering.col(j) = steering_vector(positions, sources[j], model);

  const double noise_power = std::isinf(snr_db) ? 0.0 : std::pow(10.0, -snr_db / 10.0);

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXcd signals(k, snapshot_count);
  for (Eigen::Index t = 0; t < snapshot_count; ++t)
    for (Eigen::Index j = 0; j < k; ++j) signals(j, t) = complex_gaussian(rng, normal, 1.0);

  SnapshotBlock block;
  block.data = steering * signals;
  if (noise_power > 0.0) {
    for (Eigen::Index t = 0; t < snapshot_count; ++t)
      for (Eigen::Index i = 0; i < m; ++i)
        block.data(i, t) += complex_gaussian(rng, normal, noise_power);
  }
  block.scene = Scene{sources, snr_db, seed};
  return block;
}

Eigen::MatrixXcd sample_covariance(const Eigen::MatrixXcd& data) {
  require(data.cols() > 0, "snapshot block has no columns");
  Eigen::MatrixXcd r = data * data.adjoint() / static_cast<double>(data.cols());
  // Symmetrize so the Hermitian property is exact rather than round-off limited.
  Eigen::MatrixXcd h = 0.5 * (r + r.adjoint());
  return h;
}

Eigen::MatrixXcd sample_covariance(const SnapshotBlock& block) {
  return sample_covariance(block.data);
}

Eigen::MatrixXcd exact_covariance(const ArrayConfig& cfg, const SubarraySelector& sel,
                                  const std::vector<SourceParam>& sources, double noise_power,
                                  PhaseModel model) {
  const auto positions = element_positions(cfg, sel);
  const auto m = static_cast<Eigen::Index>(sel.size());
  Eigen::MatrixXcd r = noise_power * Eigen::MatrixXcd::Identity(m, m);
  for (const auto& s : sources) {
    const Eigen::VectorXcd a = steering_vector(positions, s, model);
    r += a * a.adjoint();
  }
  return r;
}

Eigen::MatrixXcd select_covariance(const Eigen::MatrixXcd& full, const SubarraySelector& sel) {
  const auto rows = sel.rows();
  require(!rows.empty() && rows.back() < full.rows(), "selector exceeds covariance size");
  return full(rows, rows);
}

}  // namespace ssg
