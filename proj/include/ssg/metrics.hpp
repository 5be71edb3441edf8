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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ssg/dataset.hpp"
#include "ssg/spectrum.hpp"

namespace ssg {

struct Peak {
  double theta_deg = 0.0;
  double range = 0.0;
  float amplitude = 0.0f;
  std::size_t row = 0;
  std::size_t col = 0;
  /// True when the slot was filled from the best unsuppressed cell rather than a local maximum.
  bool filled = false;
};

using PeakList = std::vector<Peak>;

/// Two peaks conflict when they are closer than both radii at once.
struct SuppressionRadius {
  double theta_deg = 6.0;
  double range = 0.75;
};

/// Strict 8-neighbourhood maxima (plateaus go to the lowest index), taken greedily by
/// amplitude with non-max suppression. Missing slots are filled and flagged.
PeakList find_peaks(const SpectrumMatrix& spec, std::size_t k = 3,
                    SuppressionRadius radius = {});

struct DoaError {
  double mse_deg2 = 0.0;
  double rmse_deg = 0.0;
  /// est[i] is matched to truth[assignment[i]].
  std::vector<std::size_t> assignment;
};

/// Minimum mean squared angular error over all pairings (k <= 6, brute force).
DoaError doa_error(const std::vector<double>& est_deg, const std::vector<double>& truth_deg);

struct SourceFix {
  double theta_true_deg = 0.0;
  double theta_est_deg = 0.0;
  double range = 0.0;
  double x = 0.0;
  double y = 0.0;
  double error = 0.0;
};

struct Localization {
  /// One entry per truth source, in truth order.
  std::vector<SourceFix> fixes;
  double mean_error = 0.0;
  bool used_filled_peak = false;
};

/// Pairs estimated DoAs with truth sources by minimum total |dtheta| and places each
/// at the true range along the estimated bearing.
Localization localize(const PeakList& peaks, const std::vector<SourceParam>& truth);

struct ArmResult {
  double doa_mse_deg2 = 0.0;
  double doa_rmse_deg = 0.0;
  double median_localization = 0.0;
  /// Mean localization error of each evaluated sample, in sample order.
  std::vector<double> localization;
  std::size_t filled_samples = 0;
};

struct EvalFailure {
  std::size_t index = 0;
  std::string message;
};

struct EvalReport {
  std::size_t sample_count = 0;
  /// Scene index of every evaluated sample (shared by all arms).
  std::vector<std::uint32_t> scene_indices;
  /// Peaks of the ambiguous spectrum.
  ArmResult without_ssg;
  /// Peaks of the generated spectrum; empty when no generator was supplied.
  ArmResult with_ssg;
  /// Peaks of the stored clear spectrum, for reference.
  ArmResult clear_reference;
  bool has_ssg = false;
  std::vector<EvalFailure> failures;
};

/// Produces a spectrum for test sample `index`; must be safe to call concurrently.
using SpectrumGenerator = std::function<SpectrumMatrix(const SpectrumPair& pair, std::size_t index)>;

/// Generator may be empty, in which case only the reference arms are filled.
EvalReport evaluate(const std::vector<PairRecord>& samples, const SpectrumGenerator& generator,
                    std::size_t k = 3, int threads = 1);

double median(std::vector<double> values);

/// Key/value summary text.
std::string format_report(const EvalReport& report);
/// Per-sample CSV: sample, scene_index, loc_without, loc_with, loc_clear.
std::string format_report_csv(const EvalReport& report);

}  // namespace ssg
