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

#include <string>

#include "json.hpp"
#include "qba/mechanism.hpp"
#include "qba/model.hpp"
#include "qba/verify.hpp"

namespace qba {

// JSON text forms. Doubles round-trip exactly (shortest-representation
// printing), so a re-read table reproduces identical interim quantities.

nlohmann::json instance_to_json(const AuctionInstance& instance);
AuctionInstance instance_from_json(const nlohmann::json& j);

nlohmann::json table_to_json(const MechanismTable& table);
MechanismTable table_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const VerificationReport& report);
nlohmann::json summary_to_json(const SimulationSummary& summary);

// File helpers; throw IoError on unreadable/unwritable paths and
// ValidationError on malformed content.
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qba
