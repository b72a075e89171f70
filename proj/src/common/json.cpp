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

#include "scenofuzz/common/json.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace scenofuzz
{
namespace
{

void dump_double(double value, std::string & out)
{
  if (!std::isfinite(value)) {
    throw std::invalid_argument("canonical JSON cannot encode non-finite number");
  }
  if (value == 0.0) {
    // Collapse -0 so that equal values serialize identically.
    out += '0';
    return;
  }
  std::array<char, 40> buf{};
  auto [end, ec] =
    std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  if (ec != std::errc{}) {
    throw std::runtime_error("failed to format double");
  }
  out.append(buf.data(), end);
}

void dump_value(const Json & value, std::string & out)
{
  switch (value.type()) {
    case Json::value_t::null:
      out += "null";
      break;
    case Json::value_t::boolean:
      out += value.get<bool>() ? "true" : "false";
      break;
    case Json::value_t::number_integer:
      out += std::to_string(value.get<std::int64_t>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(value.get<std::uint64_t>());
      break;
    case Json::value_t::number_float:
      dump_double(value.get<double>(), out);
      break;
    case Json::value_t::string:
      out += value.dump();
      break;
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto & item : value) {
        if (!first) out += ',';
        first = false;
        dump_value(item, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::object: {
      // nlohmann::json stores objects in a std::map, so iteration is already
      // in byte-wise key order.
      out += '{';
      bool first = true;
      for (const auto & [key, item] : value.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(key).dump();
        out += ':';
        dump_value(item, out);
      }
      out += '}';
      break;
    }
    default:
      throw std::invalid_argument("canonical JSON cannot encode binary or discarded values");
  }
}

std::string escape_pointer_token(std::string_view key)
{
  std::string token;
  for (char c : key) {
    if (c == '~') {
      token += "~0";
    } else if (c == '/') {
      token += "~1";
    } else {
      token += c;
    }
  }
  return token;
}

}  // namespace

std::string canonical_dump(const Json & doc)
{
  std::string out;
  dump_value(doc, out);
  return out;
}

std::string sha256_hex(std::string_view bytes)
{
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0x0f];
  }
  return hex;
}

JsonReader JsonReader::at(std::string_view key) const
{
  if (!value_->is_object()) {
    fail("expected an object");
  }
  const std::string child_path = path_ + "/" + escape_pointer_token(key);
  auto it = value_->find(std::string(key));
  if (it == value_->end()) {
    throw SchemaError(child_path, "required field is missing");
  }
  return JsonReader(*it, child_path);
}

JsonReader JsonReader::at(std::size_t index) const
{
  if (!value_->is_array()) {
    fail("expected an array");
  }
  const std::string child_path = path_ + "/" + std::to_string(index);
  if (index >= value_->size()) {
    throw SchemaError(child_path, "index out of range");
  }
  return JsonReader((*value_)[index], child_path);
}

bool JsonReader::has(std::string_view key) const
{
  return value_->is_object() && value_->contains(std::string(key));
}

void JsonReader::expect_keys(std::initializer_list<std::string_view> allowed) const
{
  if (!value_->is_object()) {
    fail("expected an object");
  }
  for (const auto & [key, item] : value_->items()) {
    bool known = false;
    for (auto name : allowed) {
      if (name == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw SchemaError(path_ + "/" + escape_pointer_token(key), "unknown field");
    }
  }
}

double JsonReader::number() const
{
  if (!value_->is_number()) {
    fail("expected a number");
  }
  const double value = value_->get<double>();
  if (!std::isfinite(value)) {
    fail("expected a finite number");
  }
  return value;
}

std::int64_t JsonReader::integer() const
{
  if (!value_->is_number_integer()) {
    fail("expected an integer");
  }
  return value_->get<std::int64_t>();
}

std::uint64_t JsonReader::unsigned_integer() const
{
  if (value_->is_number_unsigned()) {
    return value_->get<std::uint64_t>();
  }
  if (value_->is_number_integer() && value_->get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(value_->get<std::int64_t>());
  }
  fail("expected a non-negative integer");
}

std::string JsonReader::string() const
{
  if (!value_->is_string()) {
    fail("expected a string");
  }
  return value_->get<std::string>();
}

bool JsonReader::boolean() const
{
  if (!value_->is_boolean()) {
    fail("expected a boolean");
  }
  return value_->get<bool>();
}

std::size_t JsonReader::array_size() const
{
  if (!value_->is_array()) {
    fail("expected an array");
  }
  return value_->size();
}

void JsonReader::fail(const std::string & what) const { throw SchemaError(path_, what); }

Json parse_json(std::string_view text)
{
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error & e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file_atomic(const std::filesystem::path & path, std::string_view contents)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write file: " + tmp.string());
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      throw std::runtime_error("short write: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace scenofuzz
