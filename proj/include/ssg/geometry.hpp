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

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ssg {

/// All lengths are in wavelengths; angles are measured from the positive
/// array axis, so a source sits at (r cos(theta), r sin(theta)).
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMinRange = 0.5;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// How the per-element path difference r_i - r is modelled.
/// `exact` uses the spherical distance; `fresnel` keeps terms up to second order,
/// -x cos(theta) + x^2 sin^2(theta) / (2 r), under which integer-wavelength spacings alias exactly.
enum class PhaseModel { exact, fresnel };

const char* to_string(PhaseModel model);
PhaseModel phase_model_from_string(const std::string& name);

/// Symmetric uniform linear array with 2N+1 elements; element N+1 sits at the origin.
struct ArrayConfig {
  int half_count = 4;
  double spacing = 0.5;

  std::size_t element_count() const { return static_cast<std::size_t>(2 * half_count + 1); }
  void validate() const;
  bool operator==(const ArrayConfig&) const = default;
};

struct SourceParam {
  double theta_deg = 90.0;
  double range = 1.0;

  void validate() const;
};

/// Ordered, strictly increasing list of 1-based element indices.
class SubarraySelector {
 public:
  SubarraySelector() = default;
  explicit SubarraySelector(std::vector<int> indices);

  static SubarraySelector full(const ArrayConfig& cfg);
  /// Elements 1, 3, 5, ... : doubles the effective spacing.
  static SubarraySelector odd(const ArrayConfig& cfg);
  /// Contiguous run first..last (inclusive, 1-based).
  static SubarraySelector contiguous(int first, int last);

  const std::vector<int>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }

  /// Throws unless every index lies in 1..2N+1.
  void validate(const ArrayConfig& cfg) const;

  /// Rows of the full-array data that this selector keeps (0-based).
  std::vector<Eigen::Index> rows() const;

 private:
  std::vector<int> indices_;
};

/// x_i = (i - (N+1)) d for i = 1..2N+1.
std::vector<double> element_positions(const ArrayConfig& cfg);
std::vector<double> element_positions(const ArrayConfig& cfg, const SubarraySelector& sel);

/// Exact spherical-wavefront distance from the source to an element at (x, 0).
double propagation_distance(const SourceParam& src, double x);

/// r_i - r for an element at x under the chosen model.
double path_difference(const SourceParam& src, double x, PhaseModel model = PhaseModel::exact);

/// Entry i is exp(-j 2 pi (r_i - r)); the origin element maps to 1.
Eigen::VectorXcd steering_vector(const ArrayConfig& cfg, const SubarraySelector& sel,
                                 const SourceParam& src, PhaseModel model = PhaseModel::exact);
Eigen::VectorXcd steering_vector(const std::vector<double>& positions, const SourceParam& src,
                                 PhaseModel model = PhaseModel::exact);

}  // namespace ssg
