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

#include "qba/config.hpp"

#include <sstream>

#include "qba/serialize.hpp"

namespace qba {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw ValidationError(message); }

double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where + ": expected a number");
  return v.get<double>();
}

std::uint64_t count_at(const json& v, const std::string& where) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    fail(where + ": expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) fail("config: expected a JSON object");
  static constexpr const char* kKnown[] = {"instance", "thresholds", "grid",     "trials",
                                           "draws",    "grid_points", "n_range", "seed",
                                           "out"};
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : kKnown) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail("config: unknown key \"" + item.key() + "\"");
  }

  ExperimentConfig config;
  if (const auto it = j.find("instance"); it != j.end()) {
    config.instance = instance_from_json(*it);
  }
  if (const auto it = j.find("thresholds"); it != j.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "optimize") {
        fail("config.thresholds: expected an array of numbers or \"optimize\"");
      }
      config.optimize_thresholds = true;
    } else if (it->is_array()) {
      ThresholdVector eta;
      for (std::size_t i = 0; i < it->size(); ++i) {
        std::ostringstream where;
        where << "config.thresholds[" << i << "]";
        eta.values.push_back(number_at((*it)[i], where.str()));
      }
      config.thresholds = std::move(eta);
    } else {
      fail("config.thresholds: expected an array of numbers or \"optimize\"");
    }
  }
  if (const auto it = j.find("grid"); it != j.end()) {
    if (it->is_object()) {
      for (const auto& item : it->items()) {
        if (item.key() != "step") fail("config.grid: unknown key \"" + item.key() + "\"");
      }
      if (const auto step = it->find("step"); step != it->end()) {
        config.grid_step = number_at(*step, "config.grid.step");
      } else {
        fail("config.grid: missing \"step\"");
      }
    } else if (it->is_array()) {
      std::vector<GridSpec> grids;
      for (std::size_t i = 0; i < it->size(); ++i) {
        std::ostringstream where;
        where << "config.grid[" << i << "]";
        const json& g = (*it)[i];
        if (!g.is_object()) fail(where.str() + ": expected an object");
        for (const auto& item : g.items()) {
          if (item.key() != "start" && item.key() != "stop" && item.key() != "step") {
            fail(where.str() + ": unknown key \"" + item.key() + "\"");
          }
        }
        GridSpec spec;
        const auto start = g.find("start");
        const auto stop = g.find("stop");
        const auto step = g.find("step");
        if (start == g.end() || stop == g.end() || step == g.end()) {
          fail(where.str() + ": requires start, stop, and step");
        }
        spec.start = number_at(*start, where.str() + ".start");
        spec.stop = number_at(*stop, where.str() + ".stop");
        spec.step = number_at(*step, where.str() + ".step");
        grids.push_back(spec);
      }
      config.grid = std::move(grids);
    } else {
      fail("config.grid: expected {\"step\": s} or an array of per-buyer specs");
    }
  }
  if (const auto it = j.find("trials"); it != j.end()) {
    config.trials = count_at(*it, "config.trials");
    if (config.trials < 1) fail("config.trials: must be at least 1");
  }
  if (const auto it = j.find("draws"); it != j.end()) {
    const std::uint64_t draws = count_at(*it, "config.draws");
    if (draws < 1) fail("config.draws: must be at least 1");
    config.threshold_draws = static_cast<int>(draws);
  }
  if (const auto it = j.find("grid_points"); it != j.end()) {
    const std::uint64_t points = count_at(*it, "config.grid_points");
    if (points < 3) fail("config.grid_points: must be at least 3");
    config.deviation_grid_points = static_cast<int>(points);
  }
  if (const auto it = j.find("n_range"); it != j.end()) {
    if (!it->is_object()) fail("config.n_range: expected {\"min\": .., \"max\": ..}");
    for (const auto& item : it->items()) {
      if (item.key() != "min" && item.key() != "max") {
        fail("config.n_range: unknown key \"" + item.key() + "\"");
      }
    }
    const auto lo = it->find("min");
    const auto hi = it->find("max");
    if (lo == it->end() || hi == it->end()) fail("config.n_range: requires min and max");
    const int min_n = static_cast<int>(count_at(*lo, "config.n_range.min"));
    const int max_n = static_cast<int>(count_at(*hi, "config.n_range.max"));
    if (min_n < 1 || max_n < min_n) {
      fail("config.n_range: need 1 <= min <= max");
    }
    config.n_range = std::make_pair(min_n, max_n);
  }
  if (const auto it = j.find("seed"); it != j.end()) {
    config.seed = count_at(*it, "config.seed");
  }
  if (const auto it = j.find("out"); it != j.end()) {
    if (!it->is_string()) fail("config.out: expected a string path");
    config.out = it->get<std::string>();
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_json_file(path));
}

std::vector<GridSpec> resolve_grids(const ExperimentConfig& config,
                                    const AuctionInstance& instance) {
  if (config.grid) {
    return *config.grid;
  }
  if (config.grid_step) {
    return grids_from_step(instance, *config.grid_step);
  }
  throw ValidationError("config.grid: required for this command (give {\"step\": s} or "
                        "per-buyer {start, stop, step} specs)");
}

}  // namespace qba
