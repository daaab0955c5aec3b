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

#include "mopp/envs/dataset_io.h"

#include <string_view>

#include "mopp/errors.h"
#include "mopp/io/binary.h"

namespace mopp {
namespace {

constexpr std::string_view kMagic("MOPPDS1\0", 8);
constexpr std::uint32_t kMaxDim = 1u << 16;

}  // namespace

std::vector<std::uint8_t> SerializeDataset(const Dataset& dataset) {
  io::ByteWriter out;
  out.PutBytes(kMagic);
  out.PutU32(kDatasetFormatVersion);
  out.PutU32(static_cast<std::uint32_t>(dataset.state_dim()));
  out.PutU32(static_cast<std::uint32_t>(dataset.action_dim()));
  out.PutU32(static_cast<std::uint32_t>(dataset.size()));
  out.PutU32(static_cast<std::uint32_t>(dataset.num_episodes()));
  for (int i = 0; i < dataset.size(); ++i) {
    out.PutF32s(dataset.state(i));
    out.PutF32s(dataset.action(i));
    out.PutF32(dataset.reward(i));
    out.PutF32s(dataset.next_state(i));
    out.PutU8(dataset.done(i) ? 1 : 0);
    out.PutU32(dataset.episode(i));
  }
  return out.bytes();
}

Dataset DeserializeDataset(std::span<const std::uint8_t> bytes) {
  io::ByteReader in(bytes);
  in.ExpectBytes(kMagic, "magic (expected MOPPDS1)");
  std::size_t version_offset = in.offset();
  std::uint32_t version = in.GetU32();
  if (version != kDatasetFormatVersion) {
    throw FormatError("unsupported dataset version " + std::to_string(version),
                      version_offset);
  }
  std::size_t dims_offset = in.offset();
  std::uint32_t state_dim = in.GetU32();
  std::uint32_t action_dim = in.GetU32();
  if (state_dim > kMaxDim || action_dim > kMaxDim) {
    throw FormatError("implausible dataset dimensions", dims_offset);
  }
  std::uint32_t count = in.GetU32();
  std::size_t episodes_offset = in.offset();
  std::uint32_t episode_count = in.GetU32();

  const std::size_t record_bytes =
      4 * (2 * static_cast<std::size_t>(state_dim) + action_dim + 1) + 1 + 4;
  if (in.remaining() < record_bytes * count) {
    // report the offset of the first incomplete record
    std::size_t complete = in.remaining() / record_bytes;
    throw FormatError("truncated dataset: header declares " +
                          std::to_string(count) + " transitions",
                      in.offset() + complete * record_bytes);
  }

  Dataset dataset(static_cast<int>(state_dim), static_cast<int>(action_dim));
  std::vector<float> s(state_dim), a(action_dim), s_next(state_dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    in.GetF32s(s);
    in.GetF32s(a);
    float r = in.GetF32();
    in.GetF32s(s_next);
    std::size_t done_offset = in.offset();
    std::uint8_t done = in.GetU8();
    if (done > 1) throw FormatError("invalid done flag", done_offset);
    std::uint32_t episode = in.GetU32();
    dataset.Append(s, a, r, s_next, done != 0, episode);
  }
  if (in.remaining() != 0) {
    throw FormatError("trailing bytes after dataset", in.offset());
  }
  if (static_cast<std::uint32_t>(dataset.num_episodes()) != episode_count) {
    throw FormatError("episode count does not match the records",
                      episodes_offset);
  }
  return dataset;
}

void SaveDataset(const Dataset& dataset, const std::string& path) {
  io::WriteFile(path, SerializeDataset(dataset));
}

Dataset LoadDataset(const std::string& path) {
  return DeserializeDataset(io::ReadFile(path));
}

}  // namespace mopp
