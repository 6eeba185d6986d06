// Copyright 2026 The segmark Authors
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

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "segmark/config/toml.h"
#include "segmark/model/train.h"

namespace segmark::cli {

// Entry point of the `segmark` tool. Returns the process exit code; output
// goes to `out`, diagnostics to `err`.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Applies the [model] and [train] tables of a config file. Unknown keys are
// rejected so typos do not silently fall back to defaults.
void apply_config(const config::Table& table, model::ModelConfig& model_cfg,
                  model::TrainConfig& train_cfg);

}  // namespace segmark::cli
