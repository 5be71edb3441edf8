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

#include <string>

#include "json.hpp"
#include "ssg/error.hpp"

namespace ssg::json_util {

using nlohmann::json;

/// Calls handler(key, value) for each member; a handler returning false marks the key unknown.
template <typename Handler>
void visit_object(const json& j, const std::string& context, Handler&& handler) {
  if (!j.is_object()) fail(ErrorCode::config, "expected an object for '" + context + "'");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string qualified = context.empty() ? it.key() : context + "." + it.key();
    bool known = false;
    try {
      known = handler(it.key(), it.value());
    } catch (const json::exception& e) {
      fail(ErrorCode::config, "bad value for '" + qualified + "': " + e.what());
    }
    if (!known) fail(ErrorCode::config, "unknown key '" + qualified + "'");
  }
}

template <typename T>
void get_to(const json& v, T& out) {
  out = v.get<T>();
}

}  // namespace ssg::json_util
