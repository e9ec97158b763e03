// Copyright 2026 The QBA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qba/model.hpp"
#include "qba/thresholds.hpp"

namespace qba {

// One experiment definition, read from a single JSON file so a run is
// reproducible from one artifact. Unknown keys are rejected.
//
// Schema (all top-level keys optional unless a command requires them):
//   instance    {"v0": number, "buyers": [{"kind": "uniform", "a": .., "b": ..}, ..]}
//   thresholds  [number, ..] or "optimize"
//   grid        {"step": number} or [{"start": .., "stop": .., "step": ..}, ..]
//   trials      integer >= 1          (simulate, compare)
//   draws       integer >= 1          (compare: random threshold draws)
//   grid_points integer >= 3          (verify: deviation scan density)
//   n_range     {"min": int, "max": int}   (compare)
//   seed        integer >= 0
//   out         output path (string); the --out flag overrides it
struct ExperimentConfig {
  std::optional<AuctionInstance> instance;
  std::optional<ThresholdVector> thresholds;  // explicit thresholds, if given
  bool optimize_thresholds = false;           // thresholds == "optimize"
  std::optional<double> grid_step;            // grid given as {"step": s}
  std::optional<std::vector<GridSpec>> grid;  // grid given per buyer
  std::uint64_t trials = 1'000'000;
  int threshold_draws = 200;
  int deviation_grid_points = 101;
  std::optional<std::pair<int, int>> n_range;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// Resolves the grid section against the instance: explicit per-buyer specs
// win, a shared step expands to full-support grids. Throws ValidationError
// when the section is missing.
std::vector<GridSpec> resolve_grids(const ExperimentConfig& config,
                                    const AuctionInstance& instance);

}  // namespace qba
