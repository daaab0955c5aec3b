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

#include "mopp/nn/checkpoint.h"

#include <string_view>

#include "mopp/errors.h"
#include "mopp/io/binary.h"

namespace mopp::nn {
namespace {

constexpr std::string_view kMagic("MOPPNN1\0", 8);

}  // namespace

std::vector<std::uint8_t> SerializeNet(const DenseNet& net) {
  io::ByteWriter out;
  out.PutBytes(kMagic);
  out.PutU32(static_cast<std::uint32_t>(net.layer_sizes().size()));
  for (int size : net.layer_sizes()) out.PutU32(static_cast<std::uint32_t>(size));
  out.PutU8(static_cast<std::uint8_t>(net.activation()));
  for (const DenseLayer<float>& layer : net.parameters()) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        out.PutF32(layer.weight(r, c));
      }
    }
    out.PutF32s(std::span<const float>(layer.bias.data(), layer.bias.size()));
  }
  return out.bytes();
}

DenseNet DeserializeNet(std::span<const std::uint8_t> bytes) {
  io::ByteReader in(bytes);
  in.ExpectBytes(kMagic, "magic (expected MOPPNN1)");
  std::size_t count_offset = in.offset();
  std::uint32_t count = in.GetU32();
  if (count < 2 || count > 1024) {
    throw FormatError("invalid layer count " + std::to_string(count),
                      count_offset);
  }
  std::vector<int> sizes(count);
  for (int& size : sizes) {
    std::size_t offset = in.offset();
    std::uint32_t value = in.GetU32();
    if (value == 0 || value > (1u << 24)) {
      throw FormatError("invalid layer size", offset);
    }
    size = static_cast<int>(value);
  }
  std::size_t tag_offset = in.offset();
  std::uint8_t tag = in.GetU8();
  if (tag > static_cast<std::uint8_t>(Activation::kTanh)) {
    throw FormatError("unknown activation tag", tag_offset);
  }
  DenseNet net(sizes, static_cast<Activation>(tag));
  for (DenseLayer<float>& layer : net.parameters()) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = in.GetF32();
      }
    }
    in.GetF32s(std::span<float>(layer.bias.data(), layer.bias.size()));
  }
  if (in.remaining() != 0) {
    throw FormatError("trailing bytes after network", in.offset());
  }
  return net;
}

void SaveNet(const DenseNet& net, const std::string& path) {
  io::WriteFile(path, SerializeNet(net));
}

DenseNet LoadNet(const std::string& path) {
  return DeserializeNet(io::ReadFile(path));
}

}  // namespace mopp::nn
