// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nomacomp/scenario.hpp"

namespace nomacomp {

/// Keys that must appear in every configuration file. All other
/// NetworkConfig fields fall back to their defaults.
inline constexpr const char* kRequiredKeys[] = {"num_cells",       "antennas_per_bs", "clusters_per_cell",
                                                "transmit_snr_db", "sinr_target",     "path_loss_exponent"};

struct ConfigParse {
  std::optional<NetworkConfig> config;
  std::vector<std::string> errors;  // every problem found, in key order
};

/// Parses a JSON object whose keys are NetworkConfig field names and checks
/// every invariant. Never throws.
ConfigParse validate_config(std::string_view text);

/// Same as validate_config but throws ConfigError on any problem.
NetworkConfig parse_config(std::string_view text);
NetworkConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const NetworkConfig& config);

}  // namespace nomacomp
