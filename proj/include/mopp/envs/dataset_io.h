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

#ifndef MOPP_ENVS_DATASET_IO_H_
#define MOPP_ENVS_DATASET_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mopp/envs/dataset.h"

namespace mopp {

inline constexpr std::uint32_t kDatasetFormatVersion = 1;

// Layout: "MOPPDS1\0"; u32 version, state dim, action dim, transition count,
// episode count; then per transition f32 s, f32 a, f32 r, f32 s', u8 done,
// u32 episode id. Little-endian, no padding.
std::vector<std::uint8_t> SerializeDataset(const Dataset& dataset);
// Throws FormatError (with byte offset) on bad magic, unsupported version,
// inconsistent header, truncation or trailing bytes.
Dataset DeserializeDataset(std::span<const std::uint8_t> bytes);

void SaveDataset(const Dataset& dataset, const std::string& path);
Dataset LoadDataset(const std::string& path);

}  // namespace mopp

#endif  // MOPP_ENVS_DATASET_IO_H_
