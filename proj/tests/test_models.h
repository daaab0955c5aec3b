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

#ifndef MOPP_TESTS_TEST_MODELS_H_
#define MOPP_TESTS_TEST_MODELS_H_

#include <algorithm>
#include <numeric>
#include <vector>

#include "mopp/adm/adm_ensemble.h"
#include "mopp/adm/adm_model.h"
#include "mopp/rng.h"

namespace mopp::testing {

inline adm::AdmArchitecture TinyArchitecture(int width = 16) {
  adm::AdmArchitecture arch;
  arch.embedding_size = width;
  arch.head_hidden = {width};
  return arch;
}

// Glorot-initialized model with a random ordering.
inline adm::AdmModel RandomModel(int in, int out, std::uint64_t seed,
                                 adm::AdmArchitecture arch = TinyArchitecture()) {
  Rng rng(seed);
  std::vector<int> ordering(out);
  std::iota(ordering.begin(), ordering.end(), 0);
  std::shuffle(ordering.begin(), ordering.end(), rng);
  adm::AdmModel model(in, out, ordering, arch);
  model.InitializeWeights(rng);
  return model;
}

inline adm::AdmEnsemble RandomEnsemble(adm::AdmRole role, int in, int out, int k,
                                       std::uint64_t seed) {
  std::vector<adm::AdmModel> members;
  for (int i = 0; i < k; ++i) members.push_back(RandomModel(in, out, seed + 101 * i));
  return adm::AdmEnsemble(role, std::move(members));
}

// Every output is `means[d]` with the std at its lower clamp, independent of
// the input.
inline adm::AdmModel ConstantModel(int in, const std::vector<float>& means) {
  const int out = static_cast<int>(means.size());
  std::vector<int> ordering(out);
  std::iota(ordering.begin(), ordering.end(), 0);
  adm::AdmModel model(in, out, ordering, TinyArchitecture(4));
  for (int j = 0; j < out; ++j) {
    auto& last = model.heads()[j].parameters().back();
    last.bias << means[ordering[j]], -60.0f;
  }
  return model;
}

}  // namespace mopp::testing

#endif  // MOPP_TESTS_TEST_MODELS_H_
