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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ssg::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats are written in native order and assume a little-endian host");

/// Append-only little-endian byte buffer.
class ByteWriter {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const char*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  const std::string& bytes() const { return bytes_; }
  std::string& bytes() { return bytes_; }

 private:
  std::string bytes_;
};

/// Bounds-checked little-endian reader over a borrowed buffer.
class ByteReader {
 public:
  ByteReader(std::string_view data, std::string path) : data_(data), path_(std::move(path)) {}

  template <typename T>
  T get() {
    T value;
    read_into(&value, sizeof(T));
    return value;
  }
  void read_into(void* out, std::size_t n);
  std::size_t remaining() const { return data_.size() - offset_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string_view data_;
  std::string path_;
  std::size_t offset_ = 0;
};

std::string read_file(const std::filesystem::path& path);

/// Writes to `path.tmp` then renames over `path`; the temp file is removed on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::uint32_t crc32(std::string_view bytes);

/// Hex rendering used in manifests ("%08x").
std::string hex32(std::uint32_t value);

}  // namespace ssg::io
