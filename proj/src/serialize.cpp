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

#include "qba/serialize.hpp"

#include <fstream>
#include <sstream>

namespace qba {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ValidationError(where + ": unknown key \"" + item.key() + "\"");
    }
  }
}

const json& require_field(const json& j, const std::string& where, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError(where + ": missing required key \"" + key + "\"");
  }
  return *it;
}

double number_field(const json& j, const std::string& where, const char* key) {
  const json& v = require_field(j, where, key);
  if (!v.is_number()) {
    throw ValidationError(where + "." + key + ": expected a number");
  }
  return v.get<double>();
}

}  // namespace

json instance_to_json(const AuctionInstance& instance) {
  json buyers = json::array();
  for (const auto& buyer : instance.buyers) {
    buyers.push_back({{"kind", "uniform"},
                      {"a", buyer.distribution.lower()},
                      {"b", buyer.distribution.upper()}});
  }
  return {{"v0", instance.seller_value}, {"buyers", buyers}};
}

AuctionInstance instance_from_json(const json& j) {
  if (!j.is_object()) {
    throw ValidationError("instance: expected an object");
  }
  require_keys(j, "instance", {"v0", "buyers"});
  AuctionInstance instance;
  instance.seller_value = number_field(j, "instance", "v0");
  const json& buyers = require_field(j, "instance", "buyers");
  if (!buyers.is_array() || buyers.empty()) {
    throw ValidationError("instance.buyers: expected a nonempty array");
  }
  for (std::size_t i = 0; i < buyers.size(); ++i) {
    std::ostringstream where;
    where << "instance.buyers[" << i << "]";
    const json& b = buyers[i];
    if (!b.is_object()) {
      throw ValidationError(where.str() + ": expected an object");
    }
    require_keys(b, where.str(), {"kind", "a", "b"});
    const json& kind = require_field(b, where.str(), "kind");
    if (!kind.is_string() || kind.get<std::string>() != "uniform") {
      throw ValidationError(where.str() + ".kind: only \"uniform\" is supported");
    }
    instance.buyers.push_back(BuyerSpec{ValueDistribution::uniform(
        number_field(b, where.str(), "a"), number_field(b, where.str(), "b"))});
  }
  instance.validate();
  return instance;
}

json table_to_json(const MechanismTable& table) {
  json outcomes = json::array();
  for (std::uint32_t code = 0; code < table.n_outcomes(); ++code) {
    const Outcome omega(code, table.n_buyers());
    json row = {{"omega", code}, {"bits", omega.bits()}};
    if (const auto w = table.winner(code)) {
      row["winner"] = *w;
      row["payment"] = table.winner_payment(code);
    } else {
      row["winner"] = nullptr;
      row["payment"] = nullptr;
    }
    outcomes.push_back(std::move(row));
  }
  return {{"type", "mechanism_table"},
          {"instance", instance_to_json(table.instance())},
          {"thresholds", table.thresholds().values},
          {"outcomes", outcomes}};
}

MechanismTable table_from_json(const json& j) {
  if (!j.is_object()) {
    throw ValidationError("mechanism table: expected an object");
  }
  require_keys(j, "mechanism table", {"type", "instance", "thresholds", "outcomes"});
  const json& type = require_field(j, "mechanism table", "type");
  if (!type.is_string() || type.get<std::string>() != "mechanism_table") {
    throw ValidationError("mechanism table: type must be \"mechanism_table\"");
  }
  AuctionInstance instance = instance_from_json(require_field(j, "mechanism table", "instance"));
  const json& eta = require_field(j, "mechanism table", "thresholds");
  if (!eta.is_array()) {
    throw ValidationError("mechanism table.thresholds: expected an array");
  }
  ThresholdVector thresholds;
  thresholds.values = eta.get<std::vector<double>>();

  const json& outcomes = require_field(j, "mechanism table", "outcomes");
  const std::size_t expected = std::size_t{1} << instance.n_buyers();
  if (!outcomes.is_array() || outcomes.size() != expected) {
    std::ostringstream os;
    os << "mechanism table.outcomes: expected " << expected << " rows";
    throw ValidationError(os.str());
  }
  std::vector<std::int32_t> winners(expected, -1);
  std::vector<double> payments(expected, 0.0);
  for (std::size_t idx = 0; idx < outcomes.size(); ++idx) {
    std::ostringstream where;
    where << "mechanism table.outcomes[" << idx << "]";
    const json& row = outcomes[idx];
    if (!row.is_object()) {
      throw ValidationError(where.str() + ": expected an object");
    }
    require_keys(row, where.str(), {"omega", "bits", "winner", "payment"});
    const std::uint64_t code = require_field(row, where.str(), "omega").get<std::uint64_t>();
    if (code != idx) {
      throw ValidationError(where.str() + ": omega codes must appear in order");
    }
    const json& bits = require_field(row, where.str(), "bits");
    const Outcome omega(static_cast<std::uint32_t>(code), instance.n_buyers());
    if (!bits.is_array() || bits.get<std::vector<int>>() != omega.bits()) {
      throw ValidationError(where.str() + ": bits do not match the omega code");
    }
    const json& winner = require_field(row, where.str(), "winner");
    const json& payment = require_field(row, where.str(), "payment");
    if (winner.is_null() != payment.is_null()) {
      throw ValidationError(where.str() + ": winner and payment must be null together");
    }
    if (!winner.is_null()) {
      winners[idx] = winner.get<std::int32_t>();
      payments[idx] = payment.get<double>();
    }
  }
  return MechanismTable(std::move(instance), std::move(thresholds), std::move(winners),
                        std::move(payments));
}

json report_to_json(const VerificationReport& report) {
  json checks = json::array();
  checks.push_back({{"name", "interim_payment_identity"},
                    {"metric", report.interim_max_violation},
                    {"tolerance", report.interim_tolerance},
                    {"passed", report.interim_passed}});
  checks.push_back({{"name", "ic_deviation"},
                    {"metric", report.ic_deviation_max},
                    {"tolerance", report.ic_tolerance},
                    {"passed", report.ic_passed}});
  checks.push_back({{"name", "ir_min_utility"},
                    {"metric", report.ir_min_utility},
                    {"tolerance", -report.ir_tolerance},
                    {"passed", report.ir_passed}});
  json oracle = {{"name", "allocation_oracle_gap"},
                 {"metric", report.oracle_gap},
                 {"tolerance", report.oracle_tolerance},
                 {"passed", report.oracle_passed}};
  if (!report.oracle_checked) oracle["skipped"] = true;
  checks.push_back(std::move(oracle));
  return {{"type", "verification_report"},
          {"interim_max_violation", report.interim_max_violation},
          {"ic_deviation_max", report.ic_deviation_max},
          {"ir_min_utility", report.ir_min_utility},
          {"oracle_gap", report.oracle_gap},
          {"checks", checks},
          {"passed", report.all_passed()}};
}

json summary_to_json(const SimulationSummary& summary) {
  json buyer_utilities = json::array();
  for (const auto& e : summary.buyer_utilities) {
    buyer_utilities.push_back({{"mean", e.mean}, {"std_error", e.std_error}});
  }
  return {{"type", "simulation_summary"},
          {"trials", summary.trials},
          {"seed", summary.seed},
          {"seller_utility", {{"mean", summary.seller_utility.mean},
                              {"std_error", summary.seller_utility.std_error}}},
          {"buyer_utilities", buyer_utilities},
          {"winner_frequencies", summary.winner_frequencies},
          {"no_sale_frequency", summary.no_sale_frequency}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read file: " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write file: " + path);
  }
  out << text;
  if (!out) {
    throw IoError("failed while writing file: " + path);
  }
}

}  // namespace qba
