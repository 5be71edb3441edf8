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
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "ssg/error.hpp"
#include "ssg/spectrum.hpp"

using namespace ssg;

namespace {

// Cyclic Jacobi on a real symmetric matrix; returns eigenvalues (unsorted) and vectors in columns.
void jacobi(Eigen::MatrixXd a, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  const Eigen::Index n = a.rows();
  vectors = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = vectors(k, p), vkq = vectors(k, q);
          vectors(k, p) = c * vkp - s * vkq;
          vectors(k, q) = s * vkp + c * vkq;
        }
      }
  }
  values = a.diagonal();
}

// [[Re, -Im], [Im, Re]]: each complex eigenpair appears twice in the real embedding.
Eigen::MatrixXd realify(const Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd r(2 * n, 2 * n);
  r << m.real(), -m.imag(), m.imag(), m.real();
  return r;
}

Eigen::MatrixXd oracle_noise_projector(const Eigen::MatrixXcd& cov, int k) {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  jacobi(realify(cov), values, vectors);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return values(x) < values(y); });
  const Eigen::Index keep = 2 * (cov.rows() - k);
  Eigen::MatrixXd v(values.size(), keep);
  for (Eigen::Index i = 0; i < keep; ++i) v.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
  return v * v.transpose();
}

std::size_t argmax(const SpectrumMatrix& s) {
  return static_cast<std::size_t>(std::max_element(s.values.begin(), s.values.end()) - s.values.begin());
}

// Strict local maxima over the 8-neighbourhood (edges compare against existing neighbours).
std::vector<std::pair<std::size_t, std::size_t>> local_maxima(const SpectrumMatrix& s) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto rows = static_cast<long>(s.grid.rows()), cols = static_cast<long>(s.grid.cols());
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) {
      bool top = true;
      for (long di = -1; di <= 1 && top; ++di)
        for (long dj = -1; dj <= 1; ++dj) {
          if ((di == 0 && dj == 0) || i + di < 0 || i + di >= rows || j + dj < 0 || j + dj >= cols) continue;
          if (s.at(static_cast<std::size_t>(i + di), static_cast<std::size_t>(j + dj)) >=
              s.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) {
            top = false;
            break;
          }
        }
      if (top) out.emplace_back(i, j);
    }
  return out;
}

const ArrayConfig kCfg{4, 0.5};

// Finite-snapshot covariance on a subarray: 10 dB, 256 snapshots.
Eigen::MatrixXcd captured(const SubarraySelector& sel, const SourceParam& src, std::uint64_t seed) {
  return sample_covariance(generate_snapshots(kCfg, sel, {src}, 10.0, 256, seed));
}

}  // namespace

TEST_CASE("noise subspace examples") {
  SUBCASE("diagonal") {
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(3, 3);
    r.diagonal() << 1.0, 1.0, 2.0;
    const auto en = noise_subspace(r, 1);
    REQUIRE(en.cols() == 2);
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(3, 3);
    expect(0, 0) = expect(1, 1) = 1.0;
    CHECK((en * en.adjoint() - expect).norm() <= 1e-12);
  }
  SUBCASE("rank one") {
    Eigen::VectorXcd a = steering_vector(kCfg, clear_selector(kCfg), {65.0, 2.0});
    a.normalize();
    const auto en = noise_subspace(a * a.adjoint(), 1);
    REQUIRE(en.cols() == 4);
    for (Eigen::Index c = 0; c < en.cols(); ++c) CHECK(std::abs(en.col(c).dot(a)) <= 1e-8);
    CHECK((en.adjoint() * en - Eigen::MatrixXcd::Identity(4, 4)).norm() <= 1e-8);
  }
  SUBCASE("projector matches an independent eigensolver") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXcd b(5, 5);
      for (Eigen::Index i = 0; i < 25; ++i) b(i) = {g(rng), g(rng)};
      const Eigen::MatrixXcd r = b * b.adjoint();
      const auto en = noise_subspace(r, 3);
      CHECK((realify(en * en.adjoint()) - oracle_noise_projector(r, 3)).norm() <= 1e-8);
    }
  }
  SUBCASE("preconditions") {
    const Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(4, 4);
    CHECK_THROWS_AS(noise_subspace(r, 0), Error);
    CHECK_THROWS_AS(noise_subspace(r, 4), Error);
    CHECK_THROWS_AS(noise_subspace(Eigen::MatrixXcd::Identity(4, 3), 1), Error);
  }
}

TEST_CASE("subarray recipes") {
  CHECK(element_positions(kCfg, ambiguous_selector(kCfg)) == std::vector<double>{-2, -1, 0, 1, 2});
  CHECK(element_positions(kCfg, clear_selector(kCfg)) == std::vector<double>{-1, -0.5, 0, 0.5, 1});
}

TEST_CASE("normalization contract") {
  const auto grid = SpectrumGrid::desk();
  std::vector<double> raw(grid.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = std::pow(10.0, -6.0 * static_cast<double>(i) / raw.size()) * 42.0;
  const auto s = normalize_spectrum(raw, grid);
  CHECK_NOTHROW(s.validate());
  CHECK(s.values[0] == 1.0f);
  CHECK(s.values.back() == 0.0f);
  // 1.5 decades below the peak maps to the middle of the range.
  const std::size_t mid = raw.size() / 4;
  CHECK(s.values[mid] == doctest::Approx((std::log10(raw[mid] / 42.0) + 3.0) / 3.0).epsilon(1e-6));

  SpectrumMatrix bad(grid);
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.values[3] = 1.0f;
  CHECK_NOTHROW(bad.validate());
  bad.values[4] = 1.5f;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("noiseless on-grid sources peak at the truth cell") {
  const auto grid = SpectrumGrid::desk();
  const auto sel = clear_selector(kCfg);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) {
      const std::size_t row = 4 + 9 * i, col = 1 + 2 * j;
      const SourceParam src{grid.theta.value(row), grid.range.value(col)};
      const auto r = exact_covariance(kCfg, sel, {src});
      const auto s = music_spectrum(r, kCfg, sel, 1, grid);
      CHECK(argmax(s) == row * grid.cols() + col);
      const auto en = noise_subspace(r, 1);
      CHECK((en.adjoint() * steering_vector(kCfg, sel, src)).norm() <= 1e-6);
    }
}

TEST_CASE("broadside source gives a spectrum symmetric about 90 degrees") {
  const auto grid = SpectrumGrid::desk();
  const auto sel = clear_selector(kCfg);
  const auto r = exact_covariance(kCfg, sel, {{90.0, 2.3}}, 0.05);
  const auto s = music_spectrum(r, kCfg, sel, 1, grid);
  for (std::size_t i = 0; i < grid.rows(); ++i)
    for (std::size_t j = 0; j < grid.cols(); ++j)
      CHECK(std::abs(s.at(i, j) - s.at(grid.rows() - 1 - i, j)) <= 1e-6);
}

TEST_CASE("lambda spacing aliases a far source") {
  // Far field: a single range column around r = 100 and a fine angle axis.
  const SpectrumGrid grid{{0.5, 0.5, 359}, {99.0, 1.0, 3}};
  const double theta = 60.0;
  const double alias_cos = std::cos(theta * kPi / 180.0) - 1.0;
  const SourceParam src{theta, 100.0};

  const auto amb_sel = ambiguous_selector(kCfg);
  const auto amb = music_spectrum(captured(amb_sel, src, 5), kCfg, amb_sel, 1, grid);
  bool aliased = false;
  for (auto [i, j] : local_maxima(amb))
    if (amb.at(i, j) >= 0.8f && std::abs(std::cos(grid.theta.value(i) * kPi / 180.0) - alias_cos) <= 0.02)
      aliased = true;
  CHECK(aliased);

  const auto clr_sel = clear_selector(kCfg);
  const auto clr = music_spectrum(captured(clr_sel, src, 5), kCfg, clr_sel, 1, grid);
  for (auto [i, j] : local_maxima(clr))
    if (clr.at(i, j) >= 0.8f) CHECK(std::abs(grid.theta.value(i) - theta) < 6.0);
}

TEST_CASE("ambiguity law over far-field angles") {
  // 0 dB and r = 100: wavefront curvature is small next to the noise floor, so the
  // alias at cos(theta) -/+ 1 stays within 0.6 decades of the true peak.
  const SpectrumGrid grid{{0.5, 0.5, 359}, {99.0, 1.0, 3}};
  const auto sel = ambiguous_selector(kCfg);
  for (double theta = 20.3; theta <= 160.0; theta += 7.0) {
    const double c = std::cos(theta * kPi / 180.0);
    const auto s = music_spectrum(
        sample_covariance(generate_snapshots(kCfg, sel, {{theta, 100.4}}, 0.0, 256, 9)), kCfg, sel, 1, grid);
    for (double alias : {c - 1.0, c + 1.0}) {
      if (alias <= -1.0 || alias >= 1.0) continue;
      float best = 0.0f;
      for (std::size_t i = 0; i < grid.rows(); ++i)
        if (std::abs(std::cos(grid.theta.value(i) * kPi / 180.0) - alias) <= 0.02)
          for (std::size_t j = 0; j < grid.cols(); ++j) best = std::max(best, s.at(i, j));
      CHECK_MESSAGE(best >= 0.8f, "theta = " << theta << ", alias cos = " << alias);
    }
  }
}

TEST_CASE("make_pair slices one capture") {
  Scene scene{{{40.0, 1.5}, {95.0, 3.0}, {150.0, 5.0}}, 3.0, 1234};
  const auto grid = SpectrumGrid::desk();
  const auto pair = make_pair(scene, kCfg, grid, 256, PhaseModel::fresnel);
  CHECK_NOTHROW(pair.ambiguous.validate());
  CHECK_NOTHROW(pair.clear.validate());
  CHECK(pair.ambiguous.grid == pair.clear.grid);

  const auto block = generate_snapshots(kCfg, SubarraySelector::full(kCfg), scene.sources, scene.snr_db, 256,
                                        scene.seed, PhaseModel::fresnel);
  const auto r = sample_covariance(block);
  const auto amb = music_spectrum(select_covariance(r, ambiguous_selector(kCfg)), kCfg, ambiguous_selector(kCfg), 3,
                                  grid, PhaseModel::fresnel);
  CHECK(amb == pair.ambiguous);
  const auto again = make_pair(scene, kCfg, grid, 256, PhaseModel::fresnel);
  CHECK(again.ambiguous == pair.ambiguous);
  CHECK(again.clear == pair.clear);
}

TEST_CASE("grid validation") {
  CHECK_NOTHROW(SpectrumGrid::desk().validate());
  CHECK_NOTHROW(SpectrumGrid::full().validate());
  CHECK(SpectrumGrid::desk().rows() == 90);
  CHECK(SpectrumGrid::desk().cols() == 24);
  CHECK(SpectrumGrid::full().rows() == 180);
  CHECK_THROWS_AS((SpectrumGrid{{0.0, 1.0, 10}, {0.5, 0.25, 4}}.validate()), Error);
  CHECK_THROWS_AS((SpectrumGrid{{1.0, 1.0, 10}, {0.25, 0.25, 4}}.validate()), Error);
  CHECK_THROWS_AS((SpectrumGrid{{1.0, 1.0, 1}, {0.5, 0.25, 4}}.validate()), Error);
}

TEST_CASE("graymap and CSV export") {
  const auto dir = std::filesystem::temp_directory_path() / "ssg_test_spectrum";
  std::filesystem::create_directories(dir);
  const auto grid = SpectrumGrid::desk();
  const auto s = music_spectrum(exact_covariance(kCfg, clear_selector(kCfg), {{33.0, 2.0}}, 0.2), kCfg,
                                clear_selector(kCfg), 1, grid);

  write_pgm(s, dir / "s.pgm");
  std::ifstream in(dir / "s.pgm", std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), {});
  const std::string header = "P5\n24 90\n255\n";
  REQUIRE(bytes.size() == header.size() + grid.size());
  CHECK(bytes.substr(0, header.size()) == header);
  const auto peak = argmax(s);
  CHECK(static_cast<unsigned char>(bytes[header.size() + peak]) == 255);

  write_csv(s, dir / "s.csv");
  const auto back = read_csv(dir / "s.csv");
  CHECK(back.grid.rows() == grid.rows());
  CHECK(back.grid.cols() == grid.cols());
  CHECK(back.grid.theta.start == grid.theta.start);
  CHECK(back.values == s.values);

  std::ofstream(dir / "bad.csv") << "theta_deg,0.5,0.75\n1,0.2\n";
  CHECK_THROWS_AS(read_csv(dir / "bad.csv"), Error);
  std::filesystem::remove_all(dir);
}
