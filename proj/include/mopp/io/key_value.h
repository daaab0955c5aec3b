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

#ifndef MOPP_IO_KEY_VALUE_H_
#define MOPP_IO_KEY_VALUE_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mopp::io {

struct KeyValueEntry {
  std::string section;  // empty for keys before any [section] header
  std::string key;
  std::string value;
  int line = 0;
};

// Flat UTF-8 `key = value` text with `#` comments and optional `[section]`
// headers. Used both for model manifests and for run configuration files.
class KeyValueFile {
 public:
  // Throws ConfigError naming `source:line` on malformed lines or duplicate
  // keys within a section.
  static KeyValueFile Parse(std::string_view text, const std::string& source);
  static KeyValueFile Load(const std::string& path);

  void Set(const std::string& key, const std::string& value);
  void Set(const std::string& section, const std::string& key,
           const std::string& value);

  const KeyValueEntry* Find(std::string_view section,
                            std::string_view key) const;
  // Throws ConfigError if the key is absent.
  const std::string& Require(std::string_view key) const;

  const std::string& source() const { return source_; }
  const std::vector<KeyValueEntry>& entries() const { return entries_; }
  std::string Serialize() const;
  void Save(const std::string& path) const;

 private:
  std::string source_;
  std::vector<KeyValueEntry> entries_;
};

// Shortest round-trip decimal representation, space separated.
std::string FormatFloats(std::span<const float> values);
std::string FormatDouble(double value);
std::string FormatInts(std::span<const int> values);
std::vector<float> ParseFloats(std::string_view text);
std::vector<double> ParseDoubles(std::string_view text);
std::vector<int> ParseInts(std::string_view text);
std::vector<std::string> SplitList(std::string_view text);

}  // namespace mopp::io

#endif  // MOPP_IO_KEY_VALUE_H_
