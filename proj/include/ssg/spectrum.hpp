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

#include <cstddef>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "ssg/geometry.hpp"
#include "ssg/simulator.hpp"

namespace ssg {

/// Uniform ascending axis: value(i) = start + i * step.
struct Axis {
  double start = 0.0;
  double step = 1.0;
  std::size_t count = 0;

  double value(std::size_t i) const { return start + static_cast<double>(i) * step; }
  double back() const { return value(count - 1); }
  bool operator==(const Axis&) const = default;
};

/// Angle rows (degrees) by range columns (wavelengths).
struct SpectrumGrid {
  Axis theta;
  Axis range;

  std::size_t rows() const { return theta.count; }
  std::size_t cols() const { return range.count; }
  std::size_t size() const { return rows() * cols(); }
  void validate() const;
  bool operator==(const SpectrumGrid&) const = default;

  /// 1..179 deg step 2 (90 rows) by 0.5..6.25 wavelengths step 0.25 (24 cols).
  static SpectrumGrid desk();
  /// 0.5..179.5 deg step 1 (180 rows), same range axis.
  static SpectrumGrid full();
};

/// Normalized pseudo-spectrum, row-major [theta][range], values in [0, 1] with max 1.
struct SpectrumMatrix {
  SpectrumGrid grid;
  std::vector<float> values;

  SpectrumMatrix() = default;
  explicit SpectrumMatrix(SpectrumGrid g) : grid(g), values(g.size(), 0.0f) {}

  float& at(std::size_t row, std::size_t col) { return values[row * grid.cols() + col]; }
  float at(std::size_t row, std::size_t col) const { return values[row * grid.cols() + col]; }

  /// Throws unless dims match, values lie in [0, 1] and the maximum is exactly 1.
  void validate() const;
  bool operator==(const SpectrumMatrix&) const = default;
};

struct SpectrumPair {
  SpectrumMatrix ambiguous;
  SpectrumMatrix clear;
  Scene scene;
};

/// Dynamic range kept by the log compression, in decades (30 dB).
inline constexpr double kSpectrumDecades = 3.0;

/// Eigenvectors of the `cov.rows() - source_count` smallest eigenvalues.
Eigen::MatrixXcd noise_subspace(const Eigen::MatrixXcd& cov, int source_count);

/// Unnormalized pseudo-spectrum 1 / |E_n^H a|^2 on the grid (row-major).
std::vector<double> music_raw(const Eigen::MatrixXcd& noise_basis,
                              const std::vector<double>& positions, const SpectrumGrid& grid,
                              PhaseModel model = PhaseModel::exact);

/// Log-compress to [-3, 0] decades relative to the maximum, then map to [0, 1].
SpectrumMatrix normalize_spectrum(const std::vector<double>& raw, const SpectrumGrid& grid);

SpectrumMatrix music_spectrum(const Eigen::MatrixXcd& cov, const ArrayConfig& cfg,
                              const SubarraySelector& sel, int source_count,
                              const SpectrumGrid& grid, PhaseModel model = PhaseModel::exact);

/// Subarray whose spacing is 2d (elements 1, 3, ..., 2N+1).
SubarraySelector ambiguous_selector(const ArrayConfig& cfg);
/// Central contiguous subarray with as many elements as the ambiguous one (3..7 for N=4).
SubarraySelector clear_selector(const ArrayConfig& cfg);

/// One capture on the full array; ambiguous and clear spectra come from slices of it.
SpectrumPair make_pair(const Scene& scene, const ArrayConfig& cfg, const SpectrumGrid& grid,
                       int snapshot_count, PhaseModel model = PhaseModel::exact);

/// Binary P5 graymap, 8-bit, one row per theta, one column per range.
void write_pgm(const SpectrumMatrix& spec, const std::filesystem::path& path);
/// First header cell is "theta_deg", then range values; each row starts with theta.
void write_csv(const SpectrumMatrix& spec, const std::filesystem::path& path);
/// Parses the CSV written above; axes are rebuilt from the header and first column.
SpectrumMatrix read_csv(const std::filesystem::path& path);

}  // namespace ssg
