// Copyright 2026 The Scenofuzz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCENOFUZZ__COMMON__JSON_HPP_
#define SCENOFUZZ__COMMON__JSON_HPP_

#include <json.hpp>

#include <filesystem>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scenofuzz
{

using Json = nlohmann::json;

/// Canonical serialization: object keys sorted, no insignificant whitespace,
/// integers verbatim, floating point values with 17 significant digits.
/// Non-finite numbers are rejected.
std::string canonical_dump(const Json & doc);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Raised when a document does not match the expected schema. `path` is a
/// JSON pointer to the offending field ("" for the document root).
class SchemaError : public std::runtime_error
{
public:
  SchemaError(std::string path, const std::string & what)
  : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path))
  {
  }

  const std::string & path() const noexcept { return path_; }

private:
  std::string path_;
};

/// Cursor over a JSON value that tracks its JSON-pointer path so that schema
/// errors name the offending field.
class JsonReader
{
public:
  JsonReader(const Json & value, std::string path) : value_(&value), path_(std::move(path)) {}

  const std::string & path() const { return path_; }
  const Json & raw() const { return *value_; }

  JsonReader at(std::string_view key) const;
  JsonReader at(std::size_t index) const;
  bool has(std::string_view key) const;

  /// Fails unless the value is an object whose keys are all in `allowed`.
  void expect_keys(std::initializer_list<std::string_view> allowed) const;

  double number() const;
  std::int64_t integer() const;
  std::uint64_t unsigned_integer() const;
  std::string string() const;
  bool boolean() const;
  std::size_t array_size() const;
  bool is_null() const { return value_->is_null(); }

  [[noreturn]] void fail(const std::string & what) const;

private:
  const Json * value_;
  std::string path_;
};

/// Parses text, converting syntax errors into SchemaError at the root.
Json parse_json(std::string_view text);

std::string read_text_file(const std::filesystem::path & path);

/// Writes via a temporary file in the same directory and renames it into
/// place, so readers never observe a partially written file.
void write_text_file_atomic(const std::filesystem::path & path, std::string_view contents);

}  // namespace scenofuzz

#endif  // SCENOFUZZ__COMMON__JSON_HPP_
