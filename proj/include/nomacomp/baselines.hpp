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

#include <optional>
#include <string_view>

#include "nomacomp/sca.hpp"

namespace nomacomp {

enum class Scheme { noma_comp, fixed_power, no_comp, oma_comp, brute_force };

const char* to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

inline constexpr double kFixedSplit = 0.4;

/// Joint design with every split frozen at kFixedSplit.
SolveResult run_fixed_power(const NetworkConfig& config, const ChannelSet& channels);

/// Each BS designs for its own cell as if alone; rates are then evaluated
/// under the true inter-cell interference. Cells without a feasible design
/// stay silent.
SolveResult run_no_comp(const NetworkConfig& config, const ChannelSet& channels);

/// SINR target for a rate of log2(1 + target) over half the resources.
double oma_sinr_target(double sinr_target);

/// Two equal time slots: Group 1 with the full power split and no SIC, then
/// Group 2 on its own ZF bases with the doubled-rate target at minimum
/// power. Rates are halved.
SolveResult run_oma_comp(const NetworkConfig& config, const ChannelSet& channels);

struct OracleGrid {
  int coarse_points = 51;
  int refine_points = 11;
};

/// Exhaustive search over (p1, p2, a1, a2) for two single-antenna cells
/// with one cluster each. Throws ConfigError for any other dimensions.
SolveResult brute_force_oracle(const NetworkConfig& config, const ChannelSet& channels,
                               const OracleGrid& grid = {});

/// Dispatches on the scheme.
SolveResult run_scheme(Scheme scheme, const NetworkConfig& config, const ChannelSet& channels);

}  // namespace nomacomp
