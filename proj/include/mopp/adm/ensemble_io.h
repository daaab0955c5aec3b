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

#ifndef MOPP_ADM_ENSEMBLE_IO_H_
#define MOPP_ADM_ENSEMBLE_IO_H_

#include <string>

#include "mopp/adm/adm_ensemble.h"

namespace mopp::adm {

// Writes `directory`/manifest.txt (key = value: role, member count,
// dimensions, normalization stats, per-member orderings and file names) and
// one MOPPNN1 file per embedding and head. Creates the directory if needed.
void SaveEnsemble(const AdmEnsemble& ensemble, const std::string& directory);

// Throws PathError when files are missing, ConfigError on manifest errors and
// FormatError on malformed network files.
AdmEnsemble LoadEnsemble(const std::string& directory);

}  // namespace mopp::adm

#endif  // MOPP_ADM_ENSEMBLE_IO_H_
