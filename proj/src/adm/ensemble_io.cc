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

#include "mopp/adm/ensemble_io.h"

#include <filesystem>
#include <string>
#include <vector>

#include "mopp/errors.h"
#include "mopp/io/key_value.h"
#include "mopp/nn/checkpoint.h"

namespace mopp::adm {
namespace {

namespace fs = std::filesystem;

std::string FormatVector(const Eigen::VectorXf& v) {
  return io::FormatFloats(std::span<const float>(v.data(), v.size()));
}

Eigen::VectorXf ParseVector(const std::string& text, int expected,
                            const std::string& key) {
  std::vector<float> values = io::ParseFloats(text);
  if (static_cast<int>(values.size()) != expected) {
    throw ConfigError("manifest key '" + key + "' has " +
                      std::to_string(values.size()) + " values, expected " +
                      std::to_string(expected));
  }
  return Eigen::Map<Eigen::VectorXf>(values.data(), expected);
}

int ParseInt(const std::string& text, const std::string& key) {
  std::vector<int> values = io::ParseInts(text);
  if (values.size() != 1) throw ConfigError("manifest key '" + key + "' must be an integer");
  return values[0];
}

}  // namespace

void SaveEnsemble(const AdmEnsemble& ensemble, const std::string& directory) {
  fs::create_directories(directory);
  io::KeyValueFile manifest;
  manifest.Set("format", "mopp-adm-ensemble-1");
  manifest.Set("role", std::string(RoleName(ensemble.role())));
  manifest.Set("members", std::to_string(ensemble.size()));
  manifest.Set("input_dim", std::to_string(ensemble.input_dim()));
  manifest.Set("output_dim", std::to_string(ensemble.output_dim()));
  const Normalization& n = ensemble.normalization();
  manifest.Set("input_mean", FormatVector(n.input_mean));
  manifest.Set("input_std", FormatVector(n.input_std));
  manifest.Set("output_mean", FormatVector(n.output_mean));
  manifest.Set("output_std", FormatVector(n.output_std));
  for (int k = 0; k < ensemble.size(); ++k) {
    const AdmModel& model = ensemble.member(k);
    const std::string prefix = "member." + std::to_string(k);
    manifest.Set(prefix + ".ordering", io::FormatInts(model.ordering()));
    std::string embedding_file = "member" + std::to_string(k) + "_embedding.mnn";
    manifest.Set(prefix + ".embedding", embedding_file);
    nn::SaveNet(model.embedding(), (fs::path(directory) / embedding_file).string());
    for (std::size_t j = 0; j < model.heads().size(); ++j) {
      std::string head_file = "member" + std::to_string(k) + "_head" +
                              std::to_string(j) + ".mnn";
      manifest.Set(prefix + ".head." + std::to_string(j), head_file);
      nn::SaveNet(model.heads()[j], (fs::path(directory) / head_file).string());
    }
  }
  manifest.Save((fs::path(directory) / "manifest.txt").string());
}

AdmEnsemble LoadEnsemble(const std::string& directory) {
  const fs::path manifest_path = fs::path(directory) / "manifest.txt";
  if (!fs::exists(manifest_path)) {
    throw PathError("no ensemble manifest at " + manifest_path.string() +
                    " (train the ensemble first)");
  }
  io::KeyValueFile manifest = io::KeyValueFile::Load(manifest_path.string());
  if (manifest.Require("format") != "mopp-adm-ensemble-1") {
    throw ConfigError(manifest_path.string() + ": unsupported ensemble format");
  }
  const AdmRole role = ParseRole(manifest.Require("role"));
  const int count = ParseInt(manifest.Require("members"), "members");
  const int input_dim = ParseInt(manifest.Require("input_dim"), "input_dim");
  const int output_dim = ParseInt(manifest.Require("output_dim"), "output_dim");
  if (count < 1 || input_dim < 1 || output_dim < 1) {
    throw ConfigError(manifest_path.string() + ": invalid ensemble dimensions");
  }
  Normalization n;
  n.input_mean = ParseVector(manifest.Require("input_mean"), input_dim, "input_mean");
  n.input_std = ParseVector(manifest.Require("input_std"), input_dim, "input_std");
  n.output_mean = ParseVector(manifest.Require("output_mean"), output_dim, "output_mean");
  n.output_std = ParseVector(manifest.Require("output_std"), output_dim, "output_std");

  auto load_net = [&](const std::string& key) {
    fs::path path = fs::path(directory) / manifest.Require(key);
    if (!fs::exists(path)) throw PathError("missing network file " + path.string());
    return nn::LoadNet(path.string());
  };

  std::vector<AdmModel> members;
  for (int k = 0; k < count; ++k) {
    const std::string prefix = "member." + std::to_string(k);
    std::vector<int> ordering = io::ParseInts(manifest.Require(prefix + ".ordering"));
    if (static_cast<int>(ordering.size()) != output_dim) {
      throw ConfigError(prefix + ".ordering has the wrong length");
    }
    nn::DenseNet embedding = load_net(prefix + ".embedding");
    std::vector<nn::DenseNet> heads;
    for (int j = 0; j < output_dim; ++j) {
      heads.push_back(load_net(prefix + ".head." + std::to_string(j)));
    }
    members.emplace_back(std::move(embedding), std::move(heads),
                         std::move(ordering), n);
  }
  AdmEnsemble ensemble(role, std::move(members));
  if (ensemble.input_dim() != input_dim) {
    throw ConfigError(manifest_path.string() + ": input_dim disagrees with networks");
  }
  return ensemble;
}

}  // namespace mopp::adm
