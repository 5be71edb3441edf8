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

#include "ssg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>

#include "ssg/error.hpp"
#include "ssg/parallel.hpp"

namespace ssg {

namespace {

bool conflicts(const Peak& a, const Peak& b, const SuppressionRadius& radius) {
  return std::abs(a.theta_deg - b.theta_deg) < radius.theta_deg &&
         std::abs(a.range - b.range) < radius.range;
}

Peak make_peak(const SpectrumMatrix& spec, std::size_t row, std::size_t col, bool filled) {
  return {spec.grid.theta.value(row), spec.grid.range.value(col), spec.at(row, col), row, col, filled};
}

}  // namespace

PeakList find_peaks(const SpectrumMatrix& spec, std::size_t k, SuppressionRadius radius) {
  const std::size_t rows = spec.grid.rows();
  const std::size_t cols = spec.grid.cols();
  require(spec.values.size() == rows * cols, "spectrum does not match its grid");

  // Flat indices ordered by amplitude, ties broken by the lower index.
  std::vector<std::size_t> order(spec.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spec.values[a] > spec.values[b];
  });

  auto is_local_max = [&](std::size_t idx) {
    const std::size_t r = idx / cols;
    const std::size_t c = idx % cols;
    const float v = spec.values[idx];
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const auto nr = static_cast<std::ptrdiff_t>(r) + dr;
        const auto nc = static_cast<std::ptrdiff_t>(c) + dc;
        if (nr < 0 || nc < 0 || nr >= static_cast<std::ptrdiff_t>(rows) ||
            nc >= static_cast<std::ptrdiff_t>(cols))
          continue;
        const std::size_t nidx = static_cast<std::size_t>(nr) * cols + static_cast<std::size_t>(nc);
        const float w = spec.values[nidx];
        if (w > v || (w == v && nidx < idx)) return false;
      }
    }
    return true;
  };

  PeakList peaks;
  auto try_take = [&](std::size_t idx, bool filled) {
    const Peak p = make_peak(spec, idx / cols, idx % cols, filled);
    for (const auto& q : peaks)
      if ((q.row == p.row && q.col == p.col) || conflicts(p, q, radius)) return;
    peaks.push_back(p);
  };

  for (std::size_t idx : order) {
    if (peaks.size() >= k) break;
    if (is_local_max(idx)) try_take(idx, false);
  }
  for (std::size_t idx : order) {
    if (peaks.size() >= k) break;
    try_take(idx, true);
  }
  return peaks;
}

DoaError doa_error(const std::vector<double>& est, const std::vector<double>& truth) {
  if (est.size() != truth.size())
    fail(ErrorCode::shape_mismatch, "estimate and truth counts differ");
  require(!est.empty() && est.size() <= 6, "doa_error supports 1..6 sources");

  std::vector<std::size_t> perm(est.size());
  std::iota(perm.begin(), perm.end(), 0);
  DoaError best;
  double best_sum = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
      const double d = est[i] - truth[perm[i]];
      sum += d * d;
    }
    if (sum < best_sum) {
      best_sum = sum;
      best.assignment = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  best.mse_deg2 = best_sum / static_cast<double>(est.size());
  best.rmse_deg = std::sqrt(best.mse_deg2);
  return best;
}

Localization localize(const PeakList& peaks, const std::vector<SourceParam>& truth) {
  require(!truth.empty() && truth.size() <= 6, "localize supports 1..6 sources");
  if (peaks.size() < truth.size())
    fail(ErrorCode::invalid_argument, "fewer peaks than truth sources");

  // perm[j] = peak assigned to truth source j.
  std::vector<std::size_t> perm(peaks.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best;
  double best_sum = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (std::size_t j = 0; j < truth.size(); ++j)
      sum += std::abs(peaks[perm[j]].theta_deg - truth[j].theta_deg);
    if (sum < best_sum) {
      best_sum = sum;
      best.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(truth.size()));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  Localization out;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const Peak& p = peaks[best[j]];
    const double r = truth[j].range;
    const double est = deg_to_rad(p.theta_deg);
    const double tru = deg_to_rad(truth[j].theta_deg);
    SourceFix fix;
    fix.theta_true_deg = truth[j].theta_deg;
    fix.theta_est_deg = p.theta_deg;
    fix.range = r;
    fix.x = r * std::cos(est);
    fix.y = r * std::sin(est);
    fix.error = std::hypot(fix.x - r * std::cos(tru), fix.y - r * std::sin(tru));
    out.fixes.push_back(fix);
    out.mean_error += fix.error;
    out.used_filled_peak = out.used_filled_peak || p.filled;
  }
  out.mean_error /= static_cast<double>(truth.size());
  return out;
}

double median(std::vector<double> values) {
  require(!values.empty(), "median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

struct ArmSample {
  double squared_error_sum = 0.0;
  double localization = 0.0;
  bool filled = false;
};

ArmSample score(const SpectrumMatrix& spec, const Scene& scene, std::size_t k) {
  const PeakList peaks = find_peaks(spec, k);
  if (peaks.size() < scene.sources.size())
    fail(ErrorCode::numeric, "grid too small to hold the requested peaks");
  std::vector<double> est;
  std::vector<double> truth;
  for (std::size_t i = 0; i < scene.sources.size(); ++i) {
    est.push_back(peaks[i].theta_deg);
    truth.push_back(scene.sources[i].theta_deg);
  }
  const DoaError doa = doa_error(est, truth);
  const Localization loc = localize(peaks, scene.sources);
  return {doa.mse_deg2 * static_cast<double>(est.size()), loc.mean_error, loc.used_filled_peak};
}

void finish_arm(ArmResult& arm, const std::vector<ArmSample>& samples, std::size_t sources) {
  double sq = 0.0;
  arm.localization.clear();
  arm.filled_samples = 0;
  for (const auto& s : samples) {
    sq += s.squared_error_sum;
    arm.localization.push_back(s.localization);
    if (s.filled) ++arm.filled_samples;
  }
  arm.doa_mse_deg2 = sq / static_cast<double>(samples.size() * sources);
  arm.doa_rmse_deg = std::sqrt(arm.doa_mse_deg2);
  arm.median_localization = median(arm.localization);
}

}  // namespace

EvalReport evaluate(const std::vector<PairRecord>& samples, const SpectrumGenerator& generator,
                    std::size_t k, int threads) {
  if (samples.empty()) fail(ErrorCode::invalid_argument, "evaluation split is empty");

  struct Slot {
    ArmSample without, with, clear;
    std::optional<std::string> error;
  };
  std::vector<Slot> slots(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    const auto& pair = samples[i].pair;
    try {
      slots[i].without = score(pair.ambiguous, pair.scene, k);
      slots[i].clear = score(pair.clear, pair.scene, k);
      if (generator) {
        const SpectrumMatrix generated = generator(pair, i);
        if (!(generated.grid == pair.clear.grid))
          fail(ErrorCode::shape_mismatch, "generated spectrum grid differs from the test grid");
        slots[i].with = score(generated, pair.scene, k);
      }
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  });

  EvalReport report;
  report.has_ssg = static_cast<bool>(generator);
  std::vector<ArmSample> without, with, clear;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].error) {
      report.failures.push_back({i, *slots[i].error});
      continue;
    }
    report.scene_indices.push_back(samples[i].scene_index);
    without.push_back(slots[i].without);
    with.push_back(slots[i].with);
    clear.push_back(slots[i].clear);
  }
  report.sample_count = without.size();
  if (report.sample_count == 0) fail(ErrorCode::numeric, "every evaluation sample failed");

  const std::size_t sources = samples.front().pair.scene.sources.size();
  finish_arm(report.without_ssg, without, sources);
  finish_arm(report.clear_reference, clear, sources);
  if (report.has_ssg) finish_arm(report.with_ssg, with, sources);
  return report;
}

namespace {

void append_arm(std::string& out, const std::string& prefix, const ArmResult& arm) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%s.doa_mse_deg2 = %.6f\n%s.doa_rmse_deg = %.6f\n%s.median_localization_lambda = "
                "%.6f\n%s.filled_samples = %zu\n",
                prefix.c_str(), arm.doa_mse_deg2, prefix.c_str(), arm.doa_rmse_deg, prefix.c_str(),
                arm.median_localization, prefix.c_str(), arm.filled_samples);
  out += buf;
}

}  // namespace

std::string format_report(const EvalReport& report) {
  std::string out;
  out += "sample_count = " + std::to_string(report.sample_count) + "\n";
  out += "failure_count = " + std::to_string(report.failures.size()) + "\n";
  append_arm(out, "without_ssg", report.without_ssg);
  if (report.has_ssg) append_arm(out, "with_ssg", report.with_ssg);
  append_arm(out, "clear_reference", report.clear_reference);
  for (const auto& f : report.failures)
    out += "failure." + std::to_string(f.index) + " = " + f.message + "\n";
  return out;
}

std::string format_report_csv(const EvalReport& report) {
  std::string out = "sample,scene_index,loc_without_ssg,loc_with_ssg,loc_clear\n";
  char buf[160];
  for (std::size_t i = 0; i < report.sample_count; ++i) {
    const double with = report.has_ssg ? report.with_ssg.localization[i]
                                       : std::numeric_limits<double>::quiet_NaN();
    std::snprintf(buf, sizeof(buf), "%zu,%u,%.6f,%.6f,%.6f\n", i, report.scene_indices[i],
                  report.without_ssg.localization[i], with, report.clear_reference.localization[i]);
    out += buf;
  }
  return out;
}

}  // namespace ssg
