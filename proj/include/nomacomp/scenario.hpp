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
#include <random>
#include <string>
#include <vector>

#include "nomacomp/types.hpp"

namespace nomacomp {

/// Scenario and solver parameters for one multi-cell network.
///
/// Distances are in meters. The transmit power budget per BS follows from
/// the average transmit SNR: P = noise_power * 10^(transmit_snr_db / 10).
struct NetworkConfig {
  int num_cells = 2;
  int antennas_per_bs = 6;
  int clusters_per_cell = 4;
  double transmit_snr_db = 30.0;
  double noise_power = 1.0;
  double sinr_target = 0.2;
  double path_loss_exponent = 3.0;
  double cell_radius = 500.0;
  double inter_bs_distance = 1000.0;
  // Distances are divided by this before the power law is applied.
  double path_loss_reference_distance = 1000.0;
  int max_iterations = 20;
  double rel_tolerance = 1e-3;
  std::uint64_t master_seed = 1;
  int init_restarts = 3;

  double transmit_power() const;
  int null_dim() const { return antennas_per_bs - clusters_per_cell + 1; }
  int num_clusters() const { return num_cells * clusters_per_cell; }
  double target_rate() const;

  /// Every violated invariant, empty when the configuration is usable.
  std::vector<std::string> validation_errors() const;
  /// Throws ConfigError listing all problems.
  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct Geometry {
  std::vector<Point> bs_positions;
  // Indexed by flat cluster id.
  std::vector<Point> group1_users;
  std::vector<Point> group2_users;
};

/// Channel vectors from every BS to every user.
///
/// g(i, c) is the channel from BS i to the Group-1 user of cluster c,
/// h(i, c) the channel to the Group-2 user of the same cluster.
struct ChannelSet {
  int num_cells = 0;
  int antennas = 0;
  int clusters_per_cell = 0;
  std::vector<CVector> g_links;  // [i * NK + c]
  std::vector<CVector> h_links;
  std::vector<double> noise_g;  // per cluster
  std::vector<double> noise_h;

  int num_clusters() const { return num_cells * clusters_per_cell; }
  const CVector& g(int bs, int cluster) const { return g_links[bs * num_clusters() + cluster]; }
  const CVector& h(int bs, int cluster) const { return h_links[bs * num_clusters() + cluster]; }
  CVector& g(int bs, int cluster) { return g_links[bs * num_clusters() + cluster]; }
  CVector& h(int bs, int cluster) { return h_links[bs * num_clusters() + cluster]; }

  /// Channels restricted to one cell, as an isolated single-cell network.
  ChannelSet single_cell(int cell) const;
};

using Rng = std::mt19937_64;

/// Per-trial seed derived from (master_seed, trial_index).
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);
/// Deterministic, independent stream for one Monte-Carlo trial.
Rng trial_rng(std::uint64_t master_seed, std::uint64_t trial_index);

/// Amplitude factor (d / d_ref)^(-alpha) multiplying a small-scale vector.
double path_loss_amplitude(double distance_m, double alpha, double reference_m);

/// BSs on a line with uniform spacing; users uniform over each cell's disc.
Geometry build_geometry(const NetworkConfig& config, Rng& rng);

/// Rayleigh small-scale fading scaled by the amplitude path loss.
ChannelSet draw_channels(const NetworkConfig& config, const Geometry& geo, Rng& rng);

/// Geometry and channels for one trial, drawn from trial_rng.
ChannelSet draw_trial(const NetworkConfig& config, std::uint64_t trial_index);

}  // namespace nomacomp
