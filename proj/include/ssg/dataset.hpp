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
#include <string>
#include <vector>

#include "json.hpp"
#include "ssg/spectrum.hpp"

namespace ssg {

/// Recipe for the paired-spectrum corpus.
struct DatasetSpec {
  std::size_t count = 2000;
  double split = 0.8;
  int sources = 3;
  double theta_min = 1.0;
  double theta_max = 179.0;
  double range_min = 0.5;
  double range_max = 6.0;
  double snr_min = 0.0;
  double snr_max = 5.0;
  double min_separation = 10.0;
  int snapshots = 256;
  std::uint64_t seed = 1;
  PhaseModel phase_model = PhaseModel::fresnel;
  ArrayConfig array{4, 0.5};
  SpectrumGrid grid = SpectrumGrid::desk();

  void validate() const;
  std::size_t train_count() const;
  std::size_t test_count() const { return count - train_count(); }
  bool operator==(const DatasetSpec&) const = default;

  static DatasetSpec desk();
  static DatasetSpec full();
};

inline constexpr int kRejectionLimit = 10000;

/// Uniform DoAs with pairwise separation >= min_separation (rejection sampling),
/// uniform ranges and SNR. Deterministic in (spec.seed, index).
Scene sample_scene(const DatasetSpec& spec, std::uint64_t index);

struct PairRecord {
  std::uint32_t scene_index = 0;
  SpectrumPair pair;
};

/// Samples the scene, rounds its truth to the stored f32 precision, then simulates.
PairRecord make_record(const DatasetSpec& spec, std::uint32_t index);

struct ShardInfo {
  std::string file;
  std::uint64_t bytes = 0;
  std::uint32_t crc32 = 0;
};

struct DatasetManifest {
  int version = 1;
  DatasetSpec spec;
  std::size_t count_train = 0;
  std::size_t count_test = 0;
  std::size_t record_bytes = 0;
  ShardInfo train;
  ShardInfo test;
};

inline constexpr int kDatasetVersion = 1;

struct Dataset {
  DatasetManifest manifest;
  std::vector<PairRecord> train;
  std::vector<PairRecord> test;
};

/// Bytes per record: u32 index, f32 snr, k x (f32 theta, f32 r), two H x W f32 spectra.
std::size_t record_size(int sources, const SpectrumGrid& grid);

void append_record(std::string& out, const PairRecord& record);
std::vector<PairRecord> parse_shard(std::string_view bytes, const DatasetManifest& manifest,
                                    std::size_t expected_count, const std::string& path);

/// Writes train.bin, test.bin and manifest.json into `dir`. Nothing is left behind on failure.
DatasetManifest build_dataset(const DatasetSpec& spec, const std::filesystem::path& dir,
                              int threads = 1);
Dataset load_dataset(const std::filesystem::path& dir);

nlohmann::json to_json(const DatasetSpec& spec);
/// Strict: unknown keys are rejected, missing keys keep `base` values.
DatasetSpec dataset_spec_from_json(const nlohmann::json& j, DatasetSpec base = {});

nlohmann::json manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace ssg
