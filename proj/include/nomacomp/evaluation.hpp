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

#include <cstdint>
#include <span>
#include <vector>

#include "nomacomp/precoding.hpp"
#include "nomacomp/types.hpp"

namespace nomacomp {

// Absolute slack on rate constraints, in bits/s/Hz.
inline constexpr double kRateTolerance = 1e-4;

/// Achieved SINRs and rates (bits/s/Hz), one entry per cluster.
struct RateReport {
  std::vector<double> sinr_g1;   // Group-1 user after SIC
  std::vector<double> sinr_sic;  // Group-1 user decoding the Group-2 message
  std::vector<double> sinr_g2;   // Group-2 user
  std::vector<double> rate_g1;
  std::vector<double> rate_sic;
  std::vector<double> rate_g2;
  std::vector<bool> qos_ok;
  double sum_rate_group1 = 0.0;

  int num_clusters() const { return static_cast<int>(sinr_g1.size()); }
  int qos_violations() const;
};

/// SINRs of every user for beamformers q (coordinates in the ZF bases) and
/// power splits a, with full inter-cell and intra-cell interference.
RateReport achieved_sinrs(const EffectiveChannels& eff, std::span<const CVector> q, std::span<const double> a,
                          double sinr_target);
RateReport achieved_sinrs(const ChannelSet& channels, const PrecoderBasis& bases, std::span<const CVector> q,
                          std::span<const double> a, double sinr_target);

/// Fills rate_* and qos_ok from the stored SINRs.
void finalize_rates(RateReport& report, double sinr_target);

struct FeasibilityRecord {
  bool sic_ok = true;
  bool qos_ok = true;
  bool power_ok = true;

  bool all() const { return sic_ok && qos_ok && power_ok; }
};

/// SIC and QoS rates against log2(1 + target) with kRateTolerance; per-BS
/// power against the budget with 1e-6 relative slack.
FeasibilityRecord check_constraints(const RateReport& report, std::span<const CVector> q, int clusters_per_cell,
                                    double power, double sinr_target);

/// Per-BS transmit power sum_k ||q_k||^2.
std::vector<double> cell_powers(std::span<const CVector> q, int clusters_per_cell);

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  double sum_rate_group1 = 0.0;
  bool feasible = false;
  int qos_violations = 0;
  int iterations = 0;
  std::vector<double> rank_ratios;
  double wall_time_ms = 0.0;

  double min_rank_ratio() const;
};

struct Summary {
  int trials = 0;
  double mean_sum_rate = 0.0;
  double min_sum_rate = 0.0;
  double max_sum_rate = 0.0;
  double feasible_fraction = 0.0;
  int qos_violations = 0;
  double mean_iterations = 0.0;
  // Over every rank ratio of every feasible trial; +inf entries are
  // excluded from the average and reported through max.
  double rank_ratio_average = 0.0;
  double rank_ratio_maximum = 0.0;
  double rank_ratio_minimum = 0.0;
};

/// Throws std::invalid_argument on empty input.
Summary aggregate(std::span<const TrialRecord> trials);

}  // namespace nomacomp
