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

#include "ssg/config.hpp"

#include "ssg/error.hpp"
#include "ssg/io.hpp"
#include "ssg/json_util.hpp"

namespace ssg {

using nlohmann::json;

void RunConfig::validate() const {
  if (profile != "desk" && profile != "full") fail(ErrorCode::config, "unknown profile '" + profile + "'");
  if (threads < 1) fail(ErrorCode::config, "threads must be >= 1");
  for (const auto* p : {&paths.data_dir, &paths.model, &paths.report_dir})
    if (p->empty()) fail(ErrorCode::config, "paths must be non-empty");
  try {
    dataset.validate();
    diffusion.validate();
  } catch (const Error& e) {
    fail(ErrorCode::config, e.what());
  }
}

RunConfig profile_preset(const std::string& name) {
  RunConfig c;
  c.profile = name;
  if (name == "desk") c.dataset = DatasetSpec::desk();
  else if (name == "full") c.dataset = DatasetSpec::full();
  else fail(ErrorCode::config, "unknown profile '" + name + "' (expected desk or full)");
  c.seed = c.dataset.seed;
  c.diffusion.seed = c.seed;
  return c;
}

RunConfig resolve_config(const json& user, const ConfigOverrides& overrides) {
  if (!user.is_null() && !user.is_object()) fail(ErrorCode::config, "configuration root must be an object");
  std::string profile = "desk";
  if (user.is_object() && user.contains("profile")) {
    if (!user["profile"].is_string()) fail(ErrorCode::config, "bad value for 'profile'");
    profile = user["profile"].get<std::string>();
  }
  if (overrides.profile) profile = *overrides.profile;

  RunConfig c = profile_preset(profile);
  bool dataset_seed = false;
  bool diffusion_seed = false;
  if (user.is_object()) {
    json_util::visit_object(user, "", [&](const std::string& k, const json& v) {
      if (k == "profile") return true;
      if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "threads") c.threads = v.get<int>();
      else if (k == "dataset") {
        c.dataset = dataset_spec_from_json(v, c.dataset);
        dataset_seed = v.contains("seed");
      } else if (k == "diffusion") {
        c.diffusion = diffusion_hyper_from_json(v, c.diffusion);
        diffusion_seed = v.contains("seed");
      } else if (k == "paths") {
        json_util::visit_object(v, "paths", [&](const std::string& pk, const json& pv) {
          if (pk == "data_dir") c.paths.data_dir = pv.get<std::string>();
          else if (pk == "model") c.paths.model = pv.get<std::string>();
          else if (pk == "report_dir") c.paths.report_dir = pv.get<std::string>();
          else return false;
          return true;
        });
      } else {
        return false;
      }
      return true;
    });
  }
  if (overrides.seed) {
    c.seed = *overrides.seed;
    dataset_seed = diffusion_seed = false;
  }
  if (overrides.threads) c.threads = *overrides.threads;
  if (!dataset_seed) c.dataset.seed = c.seed;
  if (!diffusion_seed) c.diffusion.seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  if (path.empty()) return resolve_config(json(), overrides);
  const std::string text = io::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::config, std::string("config is not valid JSON: ") + e.what(), path.string());
  }
  try {
    return resolve_config(j, overrides);
  } catch (const Error& e) {
    fail(e.code(), e.what(), path.string());
  }
}

json to_json(const RunConfig& c) {
  return {
      {"profile", c.profile},
      {"seed", c.seed},
      {"threads", c.threads},
      {"dataset", to_json(c.dataset)},
      {"diffusion", to_json(c.diffusion)},
      {"paths", {{"data_dir", c.paths.data_dir}, {"model", c.paths.model}, {"report_dir", c.paths.report_dir}}},
  };
}

}  // namespace ssg
