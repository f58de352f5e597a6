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

#include "nomacomp/scenario.hpp"

#include <cmath>
#include <numbers>

namespace nomacomp {

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out = "invalid configuration:";
  for (const auto& e : errors) out += "\n  " + e;
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Point uniform_in_disc(const Point& center, double radius, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double theta = 2.0 * std::numbers::pi * unit(rng);
  return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

CVector cscg_vector(int length, Rng& rng) {
  // Unit-variance CSCG: real and imaginary parts each carry half the power.
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CVector v(length);
  for (int m = 0; m < length; ++m) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(m) = cplx(re, im);
  }
  return v;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

double NetworkConfig::transmit_power() const {
  return noise_power * std::pow(10.0, transmit_snr_db / 10.0);
}

double NetworkConfig::target_rate() const { return std::log2(1.0 + sinr_target); }

std::vector<std::string> NetworkConfig::validation_errors() const {
  std::vector<std::string> errors;
  if (num_cells < 1) errors.push_back("num_cells must be a positive integer");
  if (antennas_per_bs < 1) errors.push_back("antennas_per_bs must be a positive integer");
  if (clusters_per_cell < 1) errors.push_back("clusters_per_cell must be a positive integer");
  if (clusters_per_cell > antennas_per_bs) {
    errors.push_back("K exceeds M: clusters_per_cell (" + std::to_string(clusters_per_cell) +
                     ") must not exceed antennas_per_bs (" + std::to_string(antennas_per_bs) + ")");
  }
  if (!(noise_power > 0.0) || !std::isfinite(noise_power)) errors.push_back("noise_power must be > 0");
  if (!(sinr_target > 0.0) || !std::isfinite(sinr_target)) errors.push_back("sinr_target must be > 0");
  if (!(path_loss_exponent >= 0.0) || !std::isfinite(path_loss_exponent)) {
    errors.push_back("path_loss_exponent must be >= 0");
  }
  if (!(cell_radius > 0.0)) errors.push_back("cell_radius must be > 0");
  if (!(inter_bs_distance > 0.0)) errors.push_back("inter_bs_distance must be > 0");
  if (!(path_loss_reference_distance > 0.0)) errors.push_back("path_loss_reference_distance must be > 0");
  if (max_iterations < 1) errors.push_back("max_iterations must be a positive integer");
  if (!(rel_tolerance > 0.0)) errors.push_back("rel_tolerance must be > 0");
  if (init_restarts < 0) errors.push_back("init_restarts must be >= 0");
  if (!std::isfinite(transmit_snr_db)) {
    errors.push_back("transmit_snr_db must be finite");
  } else {
    const double p = transmit_power();
    if (!(p > 0.0) || !std::isfinite(p)) errors.push_back("transmit power must be finite and positive");
  }
  return errors;
}

void NetworkConfig::validate() const {
  auto errors = validation_errors();
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

ChannelSet ChannelSet::single_cell(int cell) const {
  ChannelSet out;
  out.num_cells = 1;
  out.antennas = antennas;
  out.clusters_per_cell = clusters_per_cell;
  for (int k = 0; k < clusters_per_cell; ++k) {
    const int c = cluster_id(cell, k, clusters_per_cell);
    out.g_links.push_back(g(cell, c));
    out.h_links.push_back(h(cell, c));
    out.noise_g.push_back(noise_g[c]);
    out.noise_h.push_back(noise_h[c]);
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(trial_index + 0x632be59bd9b4e019ULL));
}

Rng trial_rng(std::uint64_t master_seed, std::uint64_t trial_index) {
  const std::uint64_t s = trial_seed(master_seed, trial_index);
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(trial_index), static_cast<std::uint32_t>(trial_index >> 32)};
  return Rng(seq);
}

double path_loss_amplitude(double distance_m, double alpha, double reference_m) {
  return std::pow(distance_m / reference_m, -alpha);
}

Geometry build_geometry(const NetworkConfig& config, Rng& rng) {
  Geometry geo;
  const int n_cells = config.num_cells;
  const int k_per = config.clusters_per_cell;
  for (int n = 0; n < n_cells; ++n) {
    geo.bs_positions.push_back({n * config.inter_bs_distance, 0.0});
  }
  geo.group1_users.resize(n_cells * k_per);
  geo.group2_users.resize(n_cells * k_per);
  for (int n = 0; n < n_cells; ++n) {
    for (int k = 0; k < k_per; ++k) {
      const int c = cluster_id(n, k, k_per);
      geo.group1_users[c] = uniform_in_disc(geo.bs_positions[n], config.cell_radius, rng);
      geo.group2_users[c] = uniform_in_disc(geo.bs_positions[n], config.cell_radius, rng);
    }
  }
  return geo;
}

ChannelSet draw_channels(const NetworkConfig& config, const Geometry& geo, Rng& rng) {
  ChannelSet ch;
  ch.num_cells = config.num_cells;
  ch.antennas = config.antennas_per_bs;
  ch.clusters_per_cell = config.clusters_per_cell;
  const int nk = ch.num_clusters();
  ch.g_links.assign(static_cast<std::size_t>(ch.num_cells) * nk, CVector());
  ch.h_links.assign(static_cast<std::size_t>(ch.num_cells) * nk, CVector());
  ch.noise_g.assign(nk, config.noise_power);
  ch.noise_h.assign(nk, config.noise_power);

  const double alpha = config.path_loss_exponent;
  const double ref = config.path_loss_reference_distance;
  for (int c = 0; c < nk; ++c) {
    for (int i = 0; i < ch.num_cells; ++i) {
      const double dg = distance(geo.bs_positions[i], geo.group1_users[c]);
      ch.g(i, c) = path_loss_amplitude(dg, alpha, ref) * cscg_vector(ch.antennas, rng);
      const double dh = distance(geo.bs_positions[i], geo.group2_users[c]);
      ch.h(i, c) = path_loss_amplitude(dh, alpha, ref) * cscg_vector(ch.antennas, rng);
    }
  }
  return ch;
}

ChannelSet draw_trial(const NetworkConfig& config, std::uint64_t trial_index) {
  Rng rng = trial_rng(config.master_seed, trial_index);
  const Geometry geo = build_geometry(config, rng);
  return draw_channels(config, geo, rng);
}

}  // namespace nomacomp
