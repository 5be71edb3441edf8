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
#include <random>

#include "doctest.h"
#include "ssg/error.hpp"
#include "ssg/geometry.hpp"

using namespace ssg;

namespace {

// Planar distance computed from Cartesian coordinates, independent of the law-of-cosines form.
double planar_distance(double theta_deg, double r, double x) {
  const double t = theta_deg * std::acos(-1.0) / 180.0;
  return std::hypot(r * std::cos(t) - x, r * std::sin(t));
}

}  // namespace

TEST_CASE("element positions") {
  const auto p = element_positions(ArrayConfig{4, 0.5});
  const std::vector<double> expect{-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
  CHECK(p == expect);
  CHECK(element_positions(ArrayConfig{0, 1.0}) == std::vector<double>{0.0});

  const ArrayConfig cfg{4, 0.5};
  CHECK(element_positions(cfg, SubarraySelector::odd(cfg)) == std::vector<double>{-2, -1, 0, 1, 2});
  CHECK(element_positions(cfg, SubarraySelector::contiguous(3, 7)) == std::vector<double>{-1, -0.5, 0, 0.5, 1});
}

TEST_CASE("selectors reject bad indices") {
  const ArrayConfig cfg{4, 0.5};
  CHECK_THROWS_AS(SubarraySelector({3, 2}), Error);
  CHECK_THROWS_AS(SubarraySelector({0, 1}), Error);
  CHECK_THROWS_AS(SubarraySelector({1, 10}).validate(cfg), Error);
  CHECK_THROWS_AS((ArrayConfig{-1, 0.5}.validate()), Error);
  CHECK_THROWS_AS((ArrayConfig{4, 0.0}.validate()), Error);
}

TEST_CASE("propagation distance") {
  CHECK(propagation_distance({90.0, 3.0}, 4.0) == 5.0);
  CHECK(propagation_distance({0.0, 5.0}, 2.0) == 3.0);
  CHECK(propagation_distance({60.0, 2.0}, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> th(0.0, 180.0), rr(0.5, 50.0), xx(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double t = th(rng), r = rr(rng), x = xx(rng);
    worst = std::max(worst, std::abs(propagation_distance({t, r}, x) - planar_distance(t, r, x)));
  }
  CHECK(worst <= 1e-12);
  CHECK_THROWS_AS(SourceParam({90.0, 0.1}).validate(), Error);
  CHECK_THROWS_AS(SourceParam({181.0, 1.0}).validate(), Error);
}

TEST_CASE("steering vector") {
  const ArrayConfig cfg{4, 0.5};
  const auto full = SubarraySelector::full(cfg);

  SUBCASE("origin entry and unit modulus") {
    const auto a = steering_vector(cfg, full, {37.0, 1.3});
    CHECK(a(4).real() == 1.0);
    CHECK(a(4).imag() == 0.0);
    for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(std::abs(std::abs(a(i)) - 1.0) <= 1e-12);
  }
  SUBCASE("broadside symmetry") {
    const auto a = steering_vector(cfg, full, {90.0, 2.0});
    for (int i = 0; i < 4; ++i) CHECK(std::abs(a(i) - a(8 - i)) <= 1e-12);
  }
  SUBCASE("mirror symmetry") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> th(1.0, 179.0), rr(0.5, 6.0);
    for (int k = 0; k < 200; ++k) {
      const double t = th(rng), r = rr(rng);
      const auto a = steering_vector(cfg, full, {t, r});
      const auto b = steering_vector(cfg, full, {180.0 - t, r});
      for (int i = 0; i < 9; ++i) CHECK(std::abs(a(i) - b(8 - i)) <= 1e-12);
    }
  }
  SUBCASE("phase at theta 60, r 2, x 1") {
    const auto a = steering_vector(std::vector<double>{1.0}, {60.0, 2.0});
    const double expect = std::remainder(-2.0 * std::acos(-1.0) * (std::sqrt(3.0) - 2.0), 2.0 * std::acos(-1.0));
    CHECK(std::arg(a(0)) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(1.6836).epsilon(1e-4));
  }
  SUBCASE("far-field limit") {
    const double pi = std::acos(-1.0);
    for (double r : {100.0, 250.0, 1000.0})
      for (double t = 5.0; t < 180.0; t += 17.0)
        for (double x : {-2.0, -1.0, 0.5, 2.0}) {
          const double exact = 2.0 * pi * path_difference({t, r}, x);
          const double first = -2.0 * pi * x * std::cos(t * pi / 180.0);
          CHECK(std::abs(exact - first) <= pi * x * x / r);
        }
  }
  SUBCASE("fresnel model keeps the second-order expansion") {
    const double pi = std::acos(-1.0);
    for (double t = 10.0; t < 180.0; t += 20.0)
      for (double x : {-2.0, -0.5, 1.0}) {
        const SourceParam s{t, 3.0};
        const double st = std::sin(t * pi / 180.0);
        const double expect = -x * std::cos(t * pi / 180.0) + x * x * st * st / 6.0;
        CHECK(path_difference(s, x, PhaseModel::fresnel) == doctest::Approx(expect).epsilon(1e-13));
      }
  }
}

TEST_CASE("phase model names") {
  CHECK(phase_model_from_string("exact") == PhaseModel::exact);
  CHECK(phase_model_from_string(to_string(PhaseModel::fresnel)) == PhaseModel::fresnel);
  CHECK_THROWS_AS(phase_model_from_string("planar"), Error);
}
