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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "ssg/dataset.hpp"
#include "ssg/diffusion.hpp"

namespace ssg {

struct RunPaths {
  std::string data_dir = "data";
  std::string model = "model.ssgm";
  std::string report_dir = "reports";
  bool operator==(const RunPaths&) const = default;
};

/// Resolved run configuration. `dataset` carries the array and grid settings.
struct RunConfig {
  std::string profile = "desk";
  std::uint64_t seed = 1;
  int threads = 1;
  DatasetSpec dataset;
  DiffusionHyper diffusion;
  RunPaths paths;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Command-line values that take precedence over the file.
struct ConfigOverrides {
  std::optional<std::string> profile;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

/// Profile preset ("desk" or "full") with every key populated.
RunConfig profile_preset(const std::string& name);

/// Applies `user` over the preset named by overrides.profile, user["profile"] or "desk".
/// Only keys present in `user` replace preset values; unknown keys are errors.
/// The top-level seed feeds dataset.seed and diffusion.seed unless those are set
/// explicitly; a seed override replaces all three.
RunConfig resolve_config(const nlohmann::json& user, const ConfigOverrides& overrides = {});

/// Reads a JSON file; an empty path means no file.
RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

/// Fully explicit form; resolve_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& config);

}  // namespace ssg
