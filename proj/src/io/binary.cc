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

#include "mopp/io/binary.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mopp/errors.h"

namespace mopp::io {

void ByteWriter::PutBytes(std::string_view bytes) {
  bytes_.insert(bytes_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::PutU8(std::uint8_t value) { bytes_.push_back(value); }

void ByteWriter::PutU32(std::uint32_t value) {
  for (int i = 0; i < 4; ++i) {
    bytes_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

void ByteWriter::PutF32(float value) { PutU32(std::bit_cast<std::uint32_t>(value)); }

void ByteWriter::PutF32s(std::span<const float> values) {
  bytes_.reserve(bytes_.size() + 4 * values.size());
  for (float v : values) PutF32(v);
}

void ByteReader::Require(std::size_t count, const char* what) const {
  if (remaining() < count) {
    throw FormatError(std::string("truncated file while reading ") + what,
                      offset_);
  }
}

void ByteReader::ExpectBytes(std::string_view expected, const char* what) {
  Require(expected.size(), what);
  if (std::memcmp(bytes_.data() + offset_, expected.data(), expected.size()) !=
      0) {
    throw FormatError(std::string("bad ") + what, offset_);
  }
  offset_ += expected.size();
}

std::uint8_t ByteReader::GetU8() {
  Require(1, "u8");
  return bytes_[offset_++];
}

std::uint32_t ByteReader::GetU32() {
  Require(4, "u32");
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) {
    value |= static_cast<std::uint32_t>(bytes_[offset_ + i]) << (8 * i);
  }
  offset_ += 4;
  return value;
}

float ByteReader::GetF32() {
  Require(4, "f32");
  return std::bit_cast<float>(GetU32());
}

void ByteReader::GetF32s(std::span<float> out) {
  Require(4 * out.size(), "f32 block");
  for (float& v : out) v = GetF32();
}

std::vector<std::uint8_t> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PathError("cannot open file for reading: " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void WriteFile(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PathError("cannot open file for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PathError("write failed: " + path);
}

}  // namespace mopp::io
