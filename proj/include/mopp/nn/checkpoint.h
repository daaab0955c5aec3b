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

#ifndef MOPP_NN_CHECKPOINT_H_
#define MOPP_NN_CHECKPOINT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mopp/nn/dense_net.h"

namespace mopp::nn {

// "MOPPNN1\0", u32 layer-size count, u32 sizes, u8 activation tag, then for
// each layer the row-major (out x in) f32 weights followed by the f32 bias.
// All integers and floats little-endian.
std::vector<std::uint8_t> SerializeNet(const DenseNet& net);
// Throws FormatError on bad magic, invalid header values, truncation or
// trailing bytes.
DenseNet DeserializeNet(std::span<const std::uint8_t> bytes);

void SaveNet(const DenseNet& net, const std::string& path);
DenseNet LoadNet(const std::string& path);

}  // namespace mopp::nn

#endif  // MOPP_NN_CHECKPOINT_H_
