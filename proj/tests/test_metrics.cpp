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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ssg/dataset.hpp"
#include "ssg/error.hpp"
#include "ssg/metrics.hpp"

using namespace ssg;

namespace {

const SpectrumGrid kGrid{{1.0, 2.0, 90}, {0.5, 0.25, 24}};

SpectrumMatrix blank() { return SpectrumMatrix(kGrid); }

// Broad bump centred on a cell; wide enough that no background plateau remains.
void add_bump(SpectrumMatrix& m, std::size_t row, std::size_t col, float height) {
  for (std::size_t r = 0; r < m.grid.rows(); ++r)
    for (std::size_t c = 0; c < m.grid.cols(); ++c) {
      const double d2 = std::pow(double(r) - double(row), 2) + std::pow(double(c) - double(col), 2);
      m.at(r, c) = std::max(m.at(r, c), static_cast<float>(height * std::exp(-d2 / 400.0)));
    }
}

double chord(double r, double dtheta_deg) {
  return 2.0 * r * std::abs(std::sin(dtheta_deg * std::numbers::pi / 360.0));
}

}  // namespace

TEST_CASE("find_peaks") {
  SUBCASE("single sharp peak") {
    auto m = blank();
    m.at(40, 7) = 1.0f;
    const auto p = find_peaks(m, 1);
    REQUIRE(p.size() == 1);
    CHECK(p[0].row == 40);
    CHECK(p[0].col == 7);
    CHECK(p[0].theta_deg == 81.0);
    CHECK(p[0].range == 2.25);
    CHECK_FALSE(p[0].filled);
  }
  SUBCASE("equal peaks come back in index order") {
    auto m = blank();
    m.at(70, 3) = 0.9f;
    m.at(10, 20) = 0.9f;
    const auto p = find_peaks(m, 2);
    REQUIRE(p.size() == 2);
    CHECK(p[0].row == 10);
    CHECK(p[1].row == 70);
  }
  SUBCASE("plateau yields one candidate at its lowest index") {
    auto m = blank();
    m.at(30, 5) = m.at(30, 6) = m.at(31, 5) = 0.7f;
    const auto p = find_peaks(m, 1);
    CHECK(p[0].row == 30);
    CHECK(p[0].col == 5);
    CHECK_FALSE(p[0].filled);
  }
  SUBCASE("suppression and flagged fills") {
    auto m = blank();
    add_bump(m, 45, 10, 1.0f);
    m.at(47, 12) = 0.999f;  // local max inside the radius of the first
    CHECK(find_peaks(m, 2, {0.0, 0.0})[1].row == 47);
    const auto p = find_peaks(m, 3);
    REQUIRE(p.size() == 3);
    CHECK(p[0].row == 45);
    CHECK_FALSE(p[0].filled);
    CHECK(p[1].filled);
    CHECK(p[2].filled);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i > 0) CHECK(p[i].amplitude <= p[i - 1].amplitude);
      for (std::size_t j = 0; j < i; ++j) {
        const bool close = std::abs(p[i].theta_deg - p[j].theta_deg) < 6.0 &&
                           std::abs(p[i].range - p[j].range) < 0.75;
        CHECK_FALSE(close);
      }
    }
  }
  SUBCASE("random spectra respect the radius and are deterministic") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (int trial = 0; trial < 50; ++trial) {
      auto m = blank();
      for (float& v : m.values) v = u(rng);
      const auto p = find_peaks(m, 3);
      const auto again = find_peaks(m, 3);
      REQUIRE(p.size() == 3);
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(p[i].row == again[i].row);
        CHECK(p[i].col == again[i].col);
        for (std::size_t j = 0; j < i; ++j)
          CHECK_FALSE((std::abs(p[i].theta_deg - p[j].theta_deg) < 6.0 &&
                       std::abs(p[i].range - p[j].range) < 0.75));
      }
    }
  }
}

TEST_CASE("three on-grid noiseless sources are found exactly") {
  auto spec = DatasetSpec::desk();
  spec.seed = 77;
  const auto sel = clear_selector(spec.array);
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto scene = sample_scene(spec, s);
    for (auto& src : scene.sources) {
      src.theta_deg = kGrid.theta.value(static_cast<std::size_t>(std::lround((src.theta_deg - 1.0) / 2.0)));
      src.range = kGrid.range.value(static_cast<std::size_t>(std::lround((src.range - 0.5) / 0.25)));
    }
    const auto cov = exact_covariance(spec.array, sel, scene.sources, 0.0, spec.phase_model);
    const auto peaks = find_peaks(music_spectrum(cov, spec.array, sel, 3, kGrid, spec.phase_model), 3);
    int hits = 0;
    for (const auto& src : scene.sources)
      for (const auto& p : peaks)
        if (std::abs(p.theta_deg - src.theta_deg) < 1e-9 && std::abs(p.range - src.range) < 1e-9) ++hits;
    CHECK_MESSAGE(hits == 3, "scene " << s);
  }
}

TEST_CASE("doa_error") {
  const auto e = doa_error({31, 99, 146}, {30, 99, 146});
  CHECK(e.mse_deg2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(e.rmse_deg == doctest::Approx(0.5773502692).epsilon(1e-9));
  CHECK(e.assignment == std::vector<std::size_t>{0, 1, 2});

  CHECK(doa_error({30, 99, 146}, {30, 99, 146}).mse_deg2 == 0.0);
  const auto rev = doa_error({146, 99, 31}, {30, 99, 146});
  CHECK(rev.mse_deg2 == doctest::Approx(e.mse_deg2));
  CHECK(rev.assignment == std::vector<std::size_t>{2, 1, 0});
  CHECK(doa_error({30, 99, 146}, {31, 99, 146}).mse_deg2 == doctest::Approx(e.mse_deg2));

  // Brute-force oracle over every pairing, with random inputs.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 180.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(4), b(4);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    std::vector<int> idx{0, 1, 2, 3};
    double best = 1e300;
    do {
      double s = 0.0;
      for (int i = 0; i < 4; ++i) s += (a[i] - b[idx[i]]) * (a[i] - b[idx[i]]);
      best = std::min(best, s / 4.0);
    } while (std::next_permutation(idx.begin(), idx.end()));
    CHECK(doa_error(a, b).mse_deg2 == doctest::Approx(best).epsilon(1e-12));
    CHECK(doa_error(b, a).mse_deg2 == doctest::Approx(best).epsilon(1e-12));
    auto perturbed = a;
    perturbed[trial % 4] += 0.5;
    CHECK(doa_error(perturbed, a).mse_deg2 > 0.0);
  }

  CHECK_THROWS_AS(doa_error({1, 2}, {1, 2, 3}), Error);
  CHECK_THROWS_AS(doa_error({}, {}), Error);
  CHECK_THROWS_AS(doa_error(std::vector<double>(7, 1.0), std::vector<double>(7, 1.0)), Error);
}

TEST_CASE("localize") {
  auto peak = [](double theta) {
    Peak p;
    p.theta_deg = theta;
    return p;
  };
  SUBCASE("chord examples") {
    const std::vector<SourceParam> truth{{30.0, 3.0}, {90.0, 1.0}, {150.0, 2.0}};
    const auto exact = localize({peak(150), peak(30), peak(90)}, truth);
    CHECK(exact.mean_error == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(exact.fixes[0].theta_est_deg == 30.0);
    CHECK(exact.fixes[2].theta_est_deg == 150.0);

    const auto off = localize({peak(32)}, {{30.0, 3.0}});
    CHECK(off.fixes[0].error == doctest::Approx(0.1047144).epsilon(1e-6));
    const auto flip = localize({peak(180)}, {{0.0, 1.0}});
    CHECK(flip.fixes[0].error == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("chord formula against two-point distance") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> th(0.0, 180.0), rr(0.5, 6.0);
    for (int trial = 0; trial < 1000; ++trial) {
      const SourceParam src{th(rng), rr(rng)};
      const auto fix = localize({peak(th(rng))}, {src}).fixes[0];
      CHECK(fix.error == doctest::Approx(chord(src.range, fix.theta_est_deg - src.theta_deg)).epsilon(1e-9));
      CHECK(std::hypot(fix.x, fix.y) == doctest::Approx(src.range).epsilon(1e-12));
    }
  }
  SUBCASE("pairing minimizes total absolute angle error") {
    const std::vector<SourceParam> truth{{20.0, 1.0}, {60.0, 1.0}, {100.0, 1.0}};
    const auto loc = localize({peak(95), peak(25), peak(65)}, truth);
    CHECK(loc.fixes[0].theta_est_deg == 25.0);
    CHECK(loc.fixes[1].theta_est_deg == 65.0);
    CHECK(loc.fixes[2].theta_est_deg == 95.0);
    CHECK(loc.mean_error == doctest::Approx(chord(1.0, 5.0)).epsilon(1e-12));
  }
  SUBCASE("filled peaks are reported and short lists fail") {
    Peak filled = peak(40);
    filled.filled = true;
    CHECK(localize({peak(10), filled}, {{10.0, 1.0}, {40.0, 1.0}}).used_filled_peak);
    CHECK_THROWS_AS(localize({peak(10)}, {{10.0, 1.0}, {40.0, 1.0}}), Error);
  }
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS_AS(median({}), Error);
}

TEST_CASE("evaluate") {
  DatasetSpec spec = DatasetSpec::desk();
  spec.seed = 5;
  std::vector<PairRecord> samples;
  for (std::uint32_t i = 0; i < 12; ++i) samples.push_back(make_record(spec, i));

  const auto oracle = [](const SpectrumPair& pair, std::size_t) { return pair.clear; };
  const auto report = evaluate(samples, oracle);
  CHECK(report.sample_count == 12);
  CHECK(report.has_ssg);
  CHECK(report.failures.empty());
  CHECK(report.with_ssg.localization == report.clear_reference.localization);
  CHECK(report.with_ssg.doa_mse_deg2 == report.clear_reference.doa_mse_deg2);
  CHECK(report.with_ssg.median_localization == median(report.clear_reference.localization));
  CHECK(report.scene_indices.size() == 12);

  // The arm aggregates agree with per-sample recomputation.
  double sq = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& pair = samples[i].pair;
    const auto peaks = find_peaks(pair.ambiguous, 3);
    std::vector<double> est, truth;
    for (std::size_t s = 0; s < 3; ++s) {
      est.push_back(peaks[s].theta_deg);
      truth.push_back(pair.scene.sources[s].theta_deg);
    }
    sq += doa_error(est, truth).mse_deg2 * 3.0;
    CHECK(report.without_ssg.localization[i] ==
          doctest::Approx(localize(peaks, pair.scene.sources).mean_error).epsilon(1e-12));
  }
  CHECK(report.without_ssg.doa_mse_deg2 == doctest::Approx(sq / 36.0).epsilon(1e-12));
  CHECK(report.without_ssg.doa_rmse_deg == doctest::Approx(std::sqrt(sq / 36.0)).epsilon(1e-12));

  const auto threaded = evaluate(samples, oracle, 3, 3);
  CHECK(threaded.without_ssg.localization == report.without_ssg.localization);
  CHECK(format_report(threaded) == format_report(report));

  const auto reference = evaluate(samples, {});
  CHECK_FALSE(reference.has_ssg);
  CHECK(reference.clear_reference.localization == report.clear_reference.localization);
  CHECK(format_report(reference).find("with_ssg") == std::string::npos);

  const auto csv = format_report_csv(report);
  CHECK(csv.rfind("sample,scene_index,loc_without_ssg,loc_with_ssg,loc_clear\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);

  // A failing generator is reported per sample, not fatal.
  const auto flaky = [](const SpectrumPair& pair, std::size_t i) {
    if (i == 4) throw Error(ErrorCode::numeric, "sampler blew up");
    return pair.clear;
  };
  const auto partial = evaluate(samples, flaky);
  CHECK(partial.sample_count == 11);
  REQUIRE(partial.failures.size() == 1);
  CHECK(partial.failures[0].index == 4);

  CHECK_THROWS_AS(evaluate({}, oracle), Error);
}
