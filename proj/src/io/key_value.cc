// Copyright 2026 The MOPP Authors
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

#include "mopp/io/key_value.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mopp/errors.h"

namespace mopp::io {
namespace {

std::string_view Trim(std::string_view s) {
  const char* ws = " \t\r\n";
  std::size_t begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  std::size_t end = s.find_last_not_of(ws);
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T ParseNumber(std::string_view token) {
  T value{};
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ConfigError("cannot parse number '" + std::string(token) + "'");
  }
  return value;
}

template <typename T>
std::vector<T> ParseList(std::string_view text) {
  std::vector<T> out;
  for (const std::string& token : SplitList(text)) {
    out.push_back(ParseNumber<T>(token));
  }
  return out;
}

}  // namespace

KeyValueFile KeyValueFile::Parse(std::string_view text,
                                 const std::string& source) {
  KeyValueFile file;
  file.source_ = source;
  std::string section;
  int line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;

    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;

    auto fail = [&](const std::string& message) {
      return ConfigError(source + ":" + std::to_string(line_number) + ": " +
                         message);
    };
    if (line.front() == '[') {
      if (line.back() != ']') throw fail("unterminated section header");
      section = std::string(Trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw fail("empty section name");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw fail("expected 'key = value'");
    std::string key(Trim(line.substr(0, eq)));
    std::string value(Trim(line.substr(eq + 1)));
    if (key.empty()) throw fail("empty key");
    if (file.Find(section, key) != nullptr) {
      throw fail("duplicate key '" + key + "'");
    }
    file.entries_.push_back({section, key, value, line_number});
  }
  return file;
}

KeyValueFile KeyValueFile::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PathError("cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str(), path);
}

void KeyValueFile::Set(const std::string& key, const std::string& value) {
  Set("", key, value);
}

void KeyValueFile::Set(const std::string& section, const std::string& key,
                       const std::string& value) {
  for (KeyValueEntry& entry : entries_) {
    if (entry.section == section && entry.key == key) {
      entry.value = value;
      return;
    }
  }
  entries_.push_back({section, key, value, 0});
}

const KeyValueEntry* KeyValueFile::Find(std::string_view section,
                                        std::string_view key) const {
  for (const KeyValueEntry& entry : entries_) {
    if (entry.section == section && entry.key == key) return &entry;
  }
  return nullptr;
}

const std::string& KeyValueFile::Require(std::string_view key) const {
  const KeyValueEntry* entry = Find("", key);
  if (entry == nullptr) {
    throw ConfigError(source_ + ": missing key '" + std::string(key) + "'");
  }
  return entry->value;
}

std::string KeyValueFile::Serialize() const {
  std::string out;
  std::string section;
  for (const KeyValueEntry& entry : entries_) {
    if (entry.section != section) {
      section = entry.section;
      out += "[" + section + "]\n";
    }
    out += entry.key + " = " + entry.value + "\n";
  }
  return out;
}

void KeyValueFile::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw PathError("cannot open file for writing: " + path);
  out << Serialize();
}

std::string FormatFloats(std::span<const float> values) {
  std::string out;
  char buffer[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), values[i]);
    if (i > 0) out += ' ';
    out.append(buffer, ptr);
  }
  return out;
}

std::string FormatDouble(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::string FormatInts(std::span<const int> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(values[i]);
  }
  return out;
}

std::vector<std::string> SplitList(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find_first_of(" ,\t", pos);
    if (end == std::string_view::npos) end = text.size();
    if (end > pos) out.emplace_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

std::vector<float> ParseFloats(std::string_view text) {
  return ParseList<float>(text);
}

std::vector<double> ParseDoubles(std::string_view text) {
  return ParseList<double>(text);
}

std::vector<int> ParseInts(std::string_view text) {
  return ParseList<int>(text);
}

}  // namespace mopp::io
