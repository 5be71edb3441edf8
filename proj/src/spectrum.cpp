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

#include "ssg/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "ssg/error.hpp"
#include "ssg/io.hpp"

namespace ssg {

void SpectrumGrid::validate() const {
  require(theta.count >= 2 && range.count >= 2, "spectrum grid needs >= 2 points per axis");
  require(theta.step > 0.0 && range.step > 0.0, "spectrum grid axes must be ascending");
  require(theta.start > 0.0 && theta.back() < 180.0, "theta axis must lie in (0, 180)");
  require(range.start >= kMinRange, "range axis must start at >= 0.5 wavelengths");
}

SpectrumGrid SpectrumGrid::desk() { return {{1.0, 2.0, 90}, {0.5, 0.25, 24}}; }

SpectrumGrid SpectrumGrid::full() { return {{0.5, 1.0, 180}, {0.5, 0.25, 24}}; }

void SpectrumMatrix::validate() const {
  grid.validate();
  if (values.size() != grid.size())
    fail(ErrorCode::shape_mismatch, "spectrum has " + std::to_string(values.size()) +
                                        " values, grid expects " + std::to_string(grid.size()));
  float hi = 0.0f;
  for (float v : values) {
    if (!(v >= 0.0f && v <= 1.0f)) fail(ErrorCode::numeric, "spectrum value outside [0, 1]");
    hi = std::max(hi, v);
  }
  if (hi != 1.0f) fail(ErrorCode::numeric, "spectrum maximum is not 1");
}

Eigen::MatrixXcd noise_subspace(const Eigen::MatrixXcd& cov, int source_count) {
  const auto m = cov.rows();
  require(cov.cols() == m, "covariance must be square");
  require(source_count > 0 && source_count < m, "need 0 < source count < element count");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(cov);
  if (eig.info() != Eigen::Success)
    fail(ErrorCode::convergence, "Hermitian eigendecomposition did not converge");
  // Eigenvalues come back ascending.
  return eig.eigenvectors().leftCols(m - source_count);
}

std::vector<double> music_raw(const Eigen::MatrixXcd& noise_basis,
                              const std::vector<double>& positions, const SpectrumGrid& grid,
                              PhaseModel model) {
  require(static_cast<Eigen::Index>(positions.size()) == noise_basis.rows(),
          "noise basis rows must match the element count");
  std::vector<double> out(grid.size());
  const Eigen::MatrixXcd basis_h = noise_basis.adjoint();
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    for (std::size_t j = 0; j < grid.cols(); ++j) {
      const Eigen::VectorXcd a = steering_vector(positions, {grid.theta.value(i), grid.range.value(j)}, model);
      const double denom = (basis_h * a).squaredNorm();
      out[i * grid.cols() + j] = 1.0 / std::max(denom, 1e-300);
    }
  }
  return out;
}

SpectrumMatrix normalize_spectrum(const std::vector<double>& raw, const SpectrumGrid& grid) {
  require(raw.size() == grid.size(), "raw spectrum size does not match grid");
  const double peak = *std::max_element(raw.begin(), raw.end());
  require(std::isfinite(peak) && peak > 0.0, "raw spectrum must be positive and finite");
  SpectrumMatrix spec(grid);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double level = std::clamp(std::log10(raw[i] / peak), -kSpectrumDecades, 0.0);
    spec.values[i] = static_cast<float>((level + kSpectrumDecades) / kSpectrumDecades);
  }
  return spec;
}

SpectrumMatrix music_spectrum(const Eigen::MatrixXcd& cov, const ArrayConfig& cfg,
                              const SubarraySelector& sel, int source_count,
                              const SpectrumGrid& grid, PhaseModel model) {
  grid.validate();
  const auto positions = element_positions(cfg, sel);
  require(static_cast<Eigen::Index>(positions.size()) == cov.rows(),
          "covariance size does not match the subarray");
  const Eigen::MatrixXcd basis = noise_subspace(cov, source_count);
  return normalize_spectrum(music_raw(basis, positions, grid, model), grid);
}

SubarraySelector ambiguous_selector(const ArrayConfig& cfg) { return SubarraySelector::odd(cfg); }

SubarraySelector clear_selector(const ArrayConfig& cfg) {
  const int center = cfg.half_count + 1;
  const int half = cfg.half_count / 2;
  return SubarraySelector::contiguous(center - half, center + half);
}

SpectrumPair make_pair(const Scene& scene, const ArrayConfig& cfg, const SpectrumGrid& grid,
                       int snapshot_count, PhaseModel model) {
  require(cfg.half_count >= 2, "paired spectra need N >= 2");
  const int k = static_cast<int>(scene.sources.size());
  const auto full = SubarraySelector::full(cfg);
  const auto amb = ambiguous_selector(cfg);
  const auto clr = clear_selector(cfg);
  require(static_cast<std::size_t>(k) < std::min(amb.size(), clr.size()),
          "too many sources for the subarrays");

  const auto block =
      generate_snapshots(cfg, full, scene.sources, scene.snr_db, snapshot_count, scene.seed, model);
  const Eigen::MatrixXcd cov = sample_covariance(block);

  SpectrumPair pair;
  pair.ambiguous = music_spectrum(select_covariance(cov, amb), cfg, amb, k, grid, model);
  pair.clear = music_spectrum(select_covariance(cov, clr), cfg, clr, k, grid, model);
  pair.scene = scene;
  return pair;
}

void write_pgm(const SpectrumMatrix& spec, const std::filesystem::path& path) {
  std::string out = "P5\n" + std::to_string(spec.grid.cols()) + " " +
                    std::to_string(spec.grid.rows()) + "\n255\n";
  out.reserve(out.size() + spec.values.size());
  for (float v : spec.values) {
    const float c = std::clamp(v, 0.0f, 1.0f);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0f))));
  }
  io::write_file_atomic(path, out);
}

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& s, const std::string& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::format, "not a number: '" + s + "'", path);
  }
}

Axis axis_from_values(const std::vector<double>& v, const std::string& path) {
  if (v.size() < 2) fail(ErrorCode::format, "axis needs at least two values", path);
  const double step = (v.back() - v.front()) / static_cast<double>(v.size() - 1);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(v.front() + step * static_cast<double>(i) - v[i]) > 1e-6 * std::max(1.0, std::abs(step)))
      fail(ErrorCode::format, "axis is not uniformly spaced", path);
  return {v.front(), step, v.size()};
}

}  // namespace

void write_csv(const SpectrumMatrix& spec, const std::filesystem::path& path) {
  std::string out = "theta_deg";
  for (std::size_t j = 0; j < spec.grid.cols(); ++j) out += "," + format_number(spec.grid.range.value(j));
  out += "\n";
  for (std::size_t i = 0; i < spec.grid.rows(); ++i) {
    out += format_number(spec.grid.theta.value(i));
    for (std::size_t j = 0; j < spec.grid.cols(); ++j) out += "," + format_number(spec.at(i, j));
    out += "\n";
  }
  io::write_file_atomic(path, out);
}

SpectrumMatrix read_csv(const std::filesystem::path& path) {
  const std::string p = path.string();
  std::stringstream in(io::read_file(path));
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::format, "empty spectrum CSV", p);
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "theta_deg")
    fail(ErrorCode::format, "CSV header must start with theta_deg and list >= 2 ranges", p);

  std::vector<double> ranges;
  for (std::size_t j = 1; j < header.size(); ++j) ranges.push_back(parse_double(header[j], p));

  std::vector<double> thetas;
  std::vector<float> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) fail(ErrorCode::format, "ragged CSV row", p);
    thetas.push_back(parse_double(cells[0], p));
    for (std::size_t j = 1; j < cells.size(); ++j)
      values.push_back(static_cast<float>(parse_double(cells[j], p)));
  }
  SpectrumMatrix spec;
  spec.grid = {axis_from_values(thetas, p), axis_from_values(ranges, p)};
  spec.values = std::move(values);
  return spec;
}

}  // namespace ssg
