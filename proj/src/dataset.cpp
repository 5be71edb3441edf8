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

#include "ssg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ssg/error.hpp"
#include "ssg/io.hpp"
#include "ssg/json_util.hpp"
#include "ssg/parallel.hpp"

namespace ssg {

using nlohmann::json;

void DatasetSpec::validate() const {
  require(count >= 1, "dataset count must be >= 1");
  require(split > 0.0 && split < 1.0, "split fraction must lie in (0, 1)");
  require(sources >= 1, "dataset needs at least one source");
  require(theta_min > 0.0 && theta_max < 180.0 && theta_min < theta_max,
          "theta interval must be non-empty and inside (0, 180)");
  require(range_min >= kMinRange && range_min < range_max,
          "range interval must be non-empty and start at >= 0.5");
  require(snr_min <= snr_max && std::isfinite(snr_min) && std::isfinite(snr_max),
          "snr interval must be finite and non-empty");
  require(min_separation >= 0.0, "minimum separation must be >= 0");
  require(snapshots >= static_cast<int>(array.element_count()),
          "snapshot count must be >= array element count");
  array.validate();
  grid.validate();
}

std::size_t DatasetSpec::train_count() const {
  const auto n = static_cast<std::size_t>(std::ceil(static_cast<double>(count) * split - 1e-9));
  return std::min(n, count);
}

DatasetSpec DatasetSpec::desk() { return DatasetSpec{}; }

DatasetSpec DatasetSpec::full() {
  DatasetSpec s;
  s.count = 10000;
  s.grid = SpectrumGrid::full();
  return s;
}

Scene sample_scene(const DatasetSpec& spec, std::uint64_t index) {
  Rng rng(derive_seed(spec.seed, index));
  std::uniform_real_distribution<double> theta(spec.theta_min, spec.theta_max);
  std::uniform_real_distribution<double> range(spec.range_min, spec.range_max);
  std::uniform_real_distribution<double> snr(spec.snr_min, spec.snr_max);

  Scene scene;
  std::vector<double> angles;
  int attempts = 0;
  while (static_cast<int>(angles.size()) < spec.sources) {
    if (++attempts > kRejectionLimit)
      fail(ErrorCode::invalid_argument,
           "could not place sources with the requested minimum separation after 10000 attempts");
    const double candidate = theta(rng);
    const bool clear_of_others = std::all_of(angles.begin(), angles.end(), [&](double a) {
      return std::abs(a - candidate) >= spec.min_separation;
    });
    if (clear_of_others) angles.push_back(candidate);
  }
  for (double a : angles) scene.sources.push_back({a, range(rng)});
  scene.snr_db = snr(rng);
  scene.seed = rng();
  return scene;
}

PairRecord make_record(const DatasetSpec& spec, std::uint32_t index) {
  Scene scene = sample_scene(spec, index);
  for (auto& s : scene.sources) {
    s.theta_deg = static_cast<float>(s.theta_deg);
    s.range = static_cast<float>(s.range);
  }
  scene.snr_db = static_cast<float>(scene.snr_db);
  PairRecord rec;
  rec.scene_index = index;
  rec.pair = make_pair(scene, spec.array, spec.grid, spec.snapshots, spec.phase_model);
  return rec;
}

std::size_t record_size(int sources, const SpectrumGrid& grid) {
  return sizeof(std::uint32_t) + sizeof(float) + static_cast<std::size_t>(sources) * 2 * sizeof(float) +
         2 * grid.size() * sizeof(float);
}

void append_record(std::string& out, const PairRecord& record) {
  io::ByteWriter w;
  w.put<std::uint32_t>(record.scene_index);
  w.put<float>(static_cast<float>(record.pair.scene.snr_db));
  for (const auto& s : record.pair.scene.sources) {
    w.put<float>(static_cast<float>(s.theta_deg));
    w.put<float>(static_cast<float>(s.range));
  }
  const auto& a = record.pair.ambiguous.values;
  const auto& c = record.pair.clear.values;
  w.put_bytes(a.data(), a.size() * sizeof(float));
  w.put_bytes(c.data(), c.size() * sizeof(float));
  out += w.bytes();
}

std::vector<PairRecord> parse_shard(std::string_view bytes, const DatasetManifest& manifest,
                                    std::size_t expected_count, const std::string& path) {
  const auto& spec = manifest.spec;
  const std::size_t rec_bytes = record_size(spec.sources, spec.grid);
  if (bytes.size() != expected_count * rec_bytes)
    fail(ErrorCode::format,
         "truncated payload: manifest implies " + std::to_string(expected_count * rec_bytes) +
             " bytes, found " + std::to_string(bytes.size()),
         path);

  io::ByteReader r(bytes, path);
  std::vector<PairRecord> out(expected_count);
  for (auto& rec : out) {
    rec.scene_index = r.get<std::uint32_t>();
    rec.pair.scene.snr_db = r.get<float>();
    rec.pair.scene.sources.resize(static_cast<std::size_t>(spec.sources));
    for (auto& s : rec.pair.scene.sources) {
      s.theta_deg = r.get<float>();
      s.range = r.get<float>();
    }
    rec.pair.scene.seed = sample_scene(spec, rec.scene_index).seed;
    for (SpectrumMatrix* m : {&rec.pair.ambiguous, &rec.pair.clear}) {
      *m = SpectrumMatrix(spec.grid);
      r.read_into(m->values.data(), m->values.size() * sizeof(float));
      try {
        m->validate();
      } catch (const Error& e) {
        fail(ErrorCode::format,
             "record " + std::to_string(rec.scene_index) + ": " + e.what(), path);
      }
    }
  }
  return out;
}

DatasetManifest build_dataset(const DatasetSpec& spec, const std::filesystem::path& dir,
                              int threads) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory: " + ec.message(), dir.string());

  std::vector<PairRecord> records(spec.count);
  parallel_for(spec.count, threads, [&](std::size_t i) {
    records[i] = make_record(spec, static_cast<std::uint32_t>(i));
  });

  DatasetManifest m;
  m.version = kDatasetVersion;
  m.spec = spec;
  m.count_train = spec.train_count();
  m.count_test = spec.test_count();
  m.record_bytes = record_size(spec.sources, spec.grid);

  std::string train_bytes;
  std::string test_bytes;
  train_bytes.reserve(m.count_train * m.record_bytes);
  test_bytes.reserve(m.count_test * m.record_bytes);
  for (std::size_t i = 0; i < records.size(); ++i)
    append_record(i < m.count_train ? train_bytes : test_bytes, records[i]);

  m.train = {"train.bin", train_bytes.size(), io::crc32(train_bytes)};
  m.test = {"test.bin", test_bytes.size(), io::crc32(test_bytes)};

  const std::filesystem::path files[] = {dir / m.train.file, dir / m.test.file, dir / "manifest.json"};
  try {
    io::write_file_atomic(files[0], train_bytes);
    io::write_file_atomic(files[1], test_bytes);
    io::write_file_atomic(files[2], manifest_to_json(m).dump(2) + "\n");
  } catch (...) {
    for (const auto& f : files) std::filesystem::remove(f, ec);
    throw;
  }
  return m;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  json j;
  try {
    j = json::parse(io::read_file(manifest_path));
  } catch (const json::exception& e) {
    fail(ErrorCode::format, std::string("manifest is not valid JSON: ") + e.what(),
         manifest_path.string());
  }
  Dataset ds;
  ds.manifest = manifest_from_json(j, manifest_path.string());
  const auto& m = ds.manifest;

  auto load_split = [&](const ShardInfo& shard, std::size_t count) {
    const auto path = (dir / shard.file).string();
    const std::string bytes = io::read_file(path);
    if (bytes.size() != count * m.record_bytes || bytes.size() != shard.bytes)
      fail(ErrorCode::format,
           "truncated payload: manifest implies " + std::to_string(count * m.record_bytes) +
               " bytes, found " + std::to_string(bytes.size()),
           path);
    const auto crc = io::crc32(bytes);
    if (crc != shard.crc32)
      fail(ErrorCode::checksum,
           "checksum mismatch: manifest " + io::hex32(shard.crc32) + ", payload " + io::hex32(crc),
           path);
    return parse_shard(bytes, m, count, path);
  };
  ds.train = load_split(m.train, m.count_train);
  ds.test = load_split(m.test, m.count_test);
  return ds;
}

namespace {

json axis_json(const Axis& a) { return {{"start", a.start}, {"step", a.step}, {"count", a.count}}; }

Axis axis_from(const json& j, const std::string& ctx, Axis a) {
  json_util::visit_object(j, ctx, [&](const std::string& k, const json& v) {
    if (k == "start") a.start = v.get<double>();
    else if (k == "step") a.step = v.get<double>();
    else if (k == "count") a.count = v.get<std::size_t>();
    else return false;
    return true;
  });
  return a;
}

}  // namespace

json to_json(const DatasetSpec& s) {
  return {
      {"count", s.count},
      {"split", s.split},
      {"sources", s.sources},
      {"theta_min", s.theta_min},
      {"theta_max", s.theta_max},
      {"range_min", s.range_min},
      {"range_max", s.range_max},
      {"snr_min", s.snr_min},
      {"snr_max", s.snr_max},
      {"min_separation", s.min_separation},
      {"snapshots", s.snapshots},
      {"seed", s.seed},
      {"phase_model", to_string(s.phase_model)},
      {"array", {{"half_count", s.array.half_count}, {"spacing", s.array.spacing}}},
      {"grid", {{"theta", axis_json(s.grid.theta)}, {"range", axis_json(s.grid.range)}}},
  };
}

DatasetSpec dataset_spec_from_json(const json& j, DatasetSpec s) {
  json_util::visit_object(j, "dataset", [&](const std::string& k, const json& v) {
    if (k == "count") s.count = v.get<std::size_t>();
    else if (k == "split") s.split = v.get<double>();
    else if (k == "sources") s.sources = v.get<int>();
    else if (k == "theta_min") s.theta_min = v.get<double>();
    else if (k == "theta_max") s.theta_max = v.get<double>();
    else if (k == "range_min") s.range_min = v.get<double>();
    else if (k == "range_max") s.range_max = v.get<double>();
    else if (k == "snr_min") s.snr_min = v.get<double>();
    else if (k == "snr_max") s.snr_max = v.get<double>();
    else if (k == "min_separation") s.min_separation = v.get<double>();
    else if (k == "snapshots") s.snapshots = v.get<int>();
    else if (k == "seed") s.seed = v.get<std::uint64_t>();
    else if (k == "phase_model") s.phase_model = phase_model_from_string(v.get<std::string>());
    else if (k == "array") {
      json_util::visit_object(v, "dataset.array", [&](const std::string& ak, const json& av) {
        if (ak == "half_count") s.array.half_count = av.get<int>();
        else if (ak == "spacing") s.array.spacing = av.get<double>();
        else return false;
        return true;
      });
    } else if (k == "grid") {
      json_util::visit_object(v, "dataset.grid", [&](const std::string& gk, const json& gv) {
        if (gk == "theta") s.grid.theta = axis_from(gv, "dataset.grid.theta", s.grid.theta);
        else if (gk == "range") s.grid.range = axis_from(gv, "dataset.grid.range", s.grid.range);
        else return false;
        return true;
      });
    } else {
      return false;
    }
    return true;
  });
  return s;
}

json manifest_to_json(const DatasetManifest& m) {
  auto shard = [](const ShardInfo& s) {
    return json{{"file", s.file}, {"bytes", s.bytes}, {"crc32", io::hex32(s.crc32)}};
  };
  return {
      {"format", "ssg-paired-spectra"},
      {"version", m.version},
      {"grid_theta", axis_json(m.spec.grid.theta)},
      {"grid_range", axis_json(m.spec.grid.range)},
      {"count_train", m.count_train},
      {"count_test", m.count_test},
      {"record_bytes", m.record_bytes},
      {"spec", to_json(m.spec)},
      {"normalization",
       {{"kind", "log10_clip_minmax"},
        {"decades", kSpectrumDecades},
        {"description", "v = (clamp(log10(P / max P), -decades, 0) + decades) / decades"}}},
      {"shards", {{"train", shard(m.train)}, {"test", shard(m.test)}}},
      {"layout",
       "little-endian per record: u32 scene_index, f32 snr_db, sources x (f32 theta_deg, f32 "
       "range), HxW f32 ambiguous row-major, HxW f32 clear row-major"},
  };
}

DatasetManifest manifest_from_json(const json& j, const std::string& path) {
  DatasetManifest m;
  try {
    if (j.at("format").get<std::string>() != "ssg-paired-spectra")
      fail(ErrorCode::format, "not a paired-spectra manifest", path);
    m.version = j.at("version").get<int>();
    if (m.version != kDatasetVersion)
      fail(ErrorCode::format,
           "unsupported dataset version " + std::to_string(m.version) + " (expected " +
               std::to_string(kDatasetVersion) + ")",
           path);
    m.spec = dataset_spec_from_json(j.at("spec"));
    m.count_train = j.at("count_train").get<std::size_t>();
    m.count_test = j.at("count_test").get<std::size_t>();
    m.record_bytes = j.at("record_bytes").get<std::size_t>();
    auto shard = [&](const json& s) {
      ShardInfo info;
      info.file = s.at("file").get<std::string>();
      info.bytes = s.at("bytes").get<std::uint64_t>();
      info.crc32 = static_cast<std::uint32_t>(std::stoul(s.at("crc32").get<std::string>(), nullptr, 16));
      return info;
    };
    m.train = shard(j.at("shards").at("train"));
    m.test = shard(j.at("shards").at("test"));
    if (axis_from(j.at("grid_theta"), "grid_theta", {}) != m.spec.grid.theta ||
        axis_from(j.at("grid_range"), "grid_range", {}) != m.spec.grid.range)
      fail(ErrorCode::format, "grid axes disagree with the spec echo", path);
  } catch (const json::exception& e) {
    fail(ErrorCode::format, std::string("malformed manifest: ") + e.what(), path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::format) throw;
    fail(ErrorCode::format, std::string("malformed manifest: ") + e.what(), path);
  }
  if (m.record_bytes != record_size(m.spec.sources, m.spec.grid))
    fail(ErrorCode::format, "record size disagrees with spec and grid", path);
  if (m.count_train + m.count_test != m.spec.count)
    fail(ErrorCode::format, "split counts do not add up to the dataset count", path);
  return m;
}

}  // namespace ssg
