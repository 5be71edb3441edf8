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

#include "ssg/geometry.hpp"

#include <cmath>
#include <string>

#include "ssg/error.hpp"

namespace ssg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::shape_mismatch: return "shape_mismatch";
    case ErrorCode::io: return "io";
    case ErrorCode::format: return "format";
    case ErrorCode::checksum: return "checksum";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

void ArrayConfig::validate() const {
  require(half_count >= 0, "array half_count must be >= 0");
  require(spacing > 0.0 && std::isfinite(spacing), "array spacing must be positive");
}

void SourceParam::validate() const {
  require(theta_deg > 0.0 && theta_deg < 180.0,
          "source theta must lie in (0, 180) degrees, got " + std::to_string(theta_deg));
  require(range >= kMinRange && std::isfinite(range),
          "source range must be >= 0.5 wavelengths, got " + std::to_string(range));
}

SubarraySelector::SubarraySelector(std::vector<int> indices) : indices_(std::move(indices)) {
  require(!indices_.empty(), "subarray selector is empty");
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    require(indices_[i] >= 1, "subarray indices are 1-based");
    if (i > 0) require(indices_[i] > indices_[i - 1], "subarray indices must be strictly increasing");
  }
}

SubarraySelector SubarraySelector::full(const ArrayConfig& cfg) {
  return contiguous(1, static_cast<int>(cfg.element_count()));
}

SubarraySelector SubarraySelector::odd(const ArrayConfig& cfg) {
  std::vector<int> idx;
  for (int i = 1; i <= static_cast<int>(cfg.element_count()); i += 2) idx.push_back(i);
  return SubarraySelector(std::move(idx));
}

SubarraySelector SubarraySelector::contiguous(int first, int last) {
  require(first >= 1 && last >= first, "invalid contiguous subarray bounds");
  std::vector<int> idx;
  for (int i = first; i <= last; ++i) idx.push_back(i);
  return SubarraySelector(std::move(idx));
}

void SubarraySelector::validate(const ArrayConfig& cfg) const {
  require(!indices_.empty(), "subarray selector is empty");
  require(indices_.back() <= static_cast<int>(cfg.element_count()),
          "subarray index " + std::to_string(indices_.back()) + " exceeds element count " +
              std::to_string(cfg.element_count()));
}

std::vector<Eigen::Index> SubarraySelector::rows() const {
  std::vector<Eigen::Index> out;
  out.reserve(indices_.size());
  for (int i : indices_) out.push_back(i - 1);
  return out;
}

std::vector<double> element_positions(const ArrayConfig& cfg) {
  cfg.validate();
  std::vector<double> x(cfg.element_count());
  for (int i = 1; i <= static_cast<int>(x.size()); ++i)
    x[i - 1] = (i - (cfg.half_count + 1)) * cfg.spacing;
  return x;
}

std::vector<double> element_positions(const ArrayConfig& cfg, const SubarraySelector& sel) {
  sel.validate(cfg);
  const auto all = element_positions(cfg);
  std::vector<double> x;
  x.reserve(sel.size());
  for (int i : sel.indices()) x.push_back(all[i - 1]);
  return x;
}

double propagation_distance(const SourceParam& src, double x) {
  const double c = std::cos(deg_to_rad(src.theta_deg));
  const double r = src.range;
  // (r - |x|)^2 <= argument, so clamping only absorbs round-off.
  return std::sqrt(std::max(0.0, r * r + x * x - 2.0 * r * x * c));
}

const char* to_string(PhaseModel model) {
  return model == PhaseModel::exact ? "exact" : "fresnel";
}

PhaseModel phase_model_from_string(const std::string& name) {
  if (name == "exact") return PhaseModel::exact;
  if (name == "fresnel") return PhaseModel::fresnel;
  fail(ErrorCode::invalid_argument, "unknown phase model '" + name + "' (expected exact|fresnel)");
}

double path_difference(const SourceParam& src, double x, PhaseModel model) {
  if (model == PhaseModel::exact) return propagation_distance(src, x) - src.range;
  const double theta = deg_to_rad(src.theta_deg);
  const double s = std::sin(theta);
  return -x * std::cos(theta) + x * x * s * s / (2.0 * src.range);
}

Eigen::VectorXcd steering_vector(const std::vector<double>& positions, const SourceParam& src,
                                 PhaseModel model) {
  Eigen::VectorXcd a(static_cast<Eigen::Index>(positions.size()));
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double phase = -2.0 * kPi * path_difference(src, positions[i], model);
    a[static_cast<Eigen::Index>(i)] = {std::cos(phase), std::sin(phase)};
  }
  return a;
}

Eigen::VectorXcd steering_vector(const ArrayConfig& cfg, const SubarraySelector& sel,
                                 const SourceParam& src, PhaseModel model) {
  return steering_vector(element_positions(cfg, sel), src, model);
}

}  // namespace ssg
