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

#ifndef MOPP_IO_BINARY_H_
#define MOPP_IO_BINARY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mopp::io {

// Append-only little-endian byte buffer.
class ByteWriter {
 public:
  void PutBytes(std::string_view bytes);
  void PutU8(std::uint8_t value);
  void PutU32(std::uint32_t value);
  void PutF32(float value);
  void PutF32s(std::span<const float> values);

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

// Sequential little-endian reader. Every getter throws FormatError carrying
// the offset at which the read was attempted.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void ExpectBytes(std::string_view expected, const char* what);
  std::uint8_t GetU8();
  std::uint32_t GetU32();
  float GetF32();
  void GetF32s(std::span<float> out);

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return bytes_.size() - offset_; }

 private:
  void Require(std::size_t count, const char* what) const;

  std::span<const std::uint8_t> bytes_;
  std::size_t offset_ = 0;
};

std::vector<std::uint8_t> ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace mopp::io

#endif  // MOPP_IO_BINARY_H_
