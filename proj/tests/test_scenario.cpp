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

#include <catch_amalgamated.hpp>

#include <cmath>

#include "nomacomp/scenario.hpp"

using namespace nomacomp;
using Catch::Matchers::WithinRel;

TEST_CASE("base stations sit on a line at the inter-site distance") {
  NetworkConfig cfg;
  cfg.num_cells = 2;
  Rng rng = trial_rng(1, 0);
  const Geometry geo = build_geometry(cfg, rng);
  REQUIRE(geo.bs_positions.size() == 2);
  CHECK(geo.bs_positions[0].x == 0.0);
  CHECK(geo.bs_positions[0].y == 0.0);
  CHECK(geo.bs_positions[1].x == 1000.0);
  CHECK(geo.bs_positions[1].y == 0.0);
}

TEST_CASE("users fall inside their own cell disc") {
  NetworkConfig cfg;
  cfg.num_cells = 3;
  cfg.clusters_per_cell = 4;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Rng rng = trial_rng(9, t);
    const Geometry geo = build_geometry(cfg, rng);
    for (int c = 0; c < cfg.num_clusters(); ++c) {
      const Point& bs = geo.bs_positions[c / cfg.clusters_per_cell];
      CHECK(distance(bs, geo.group1_users[c]) <= cfg.cell_radius);
      CHECK(distance(bs, geo.group2_users[c]) <= cfg.cell_radius);
    }
  }
}

TEST_CASE("path loss amplitude") {
  CHECK(path_loss_amplitude(123.0, 0.0, 1.0) == 1.0);
  CHECK(path_loss_amplitude(1.0, 3.5, 1.0) == 1.0);
  CHECK_THAT(path_loss_amplitude(500.0, 4.0, 1.0), WithinRel(1.6e-11, 1e-12));
  CHECK_THAT(path_loss_amplitude(500.0, 2.0, 1000.0), WithinRel(4.0, 1e-14));
}

TEST_CASE("small-scale fading has unit mean power") {
  NetworkConfig cfg;
  cfg.num_cells = 1;
  cfg.antennas_per_bs = 10;
  cfg.clusters_per_cell = 10;
  cfg.path_loss_exponent = 0.0;
  double sum = 0.0;
  int count = 0;
  for (std::uint64_t t = 0; t < 60; ++t) {
    const ChannelSet ch = draw_trial(cfg, t);
    for (const auto& v : ch.g_links) {
      sum += v.squaredNorm();
      count += static_cast<int>(v.size());
    }
  }
  REQUIRE(count >= 6000);
  const double mean = sum / count;
  CHECK(mean >= 0.95);
  CHECK(mean <= 1.05);
}

TEST_CASE("trial streams are reproducible and distinct") {
  NetworkConfig cfg;
  const ChannelSet a = draw_trial(cfg, 3);
  const ChannelSet b = draw_trial(cfg, 3);
  const ChannelSet c = draw_trial(cfg, 4);
  for (std::size_t i = 0; i < a.g_links.size(); ++i) {
    CHECK(a.g_links[i] == b.g_links[i]);
    CHECK(a.h_links[i] == b.h_links[i]);
  }
  CHECK(a.g_links[0] != c.g_links[0]);
  CHECK(trial_seed(1, 0) != trial_seed(2, 0));
  CHECK(trial_seed(1, 0) == trial_seed(1, 0));
}

TEST_CASE("transmit power follows the SNR") {
  NetworkConfig cfg;
  cfg.noise_power = 2.0;
  cfg.transmit_snr_db = 30.0;
  CHECK_THAT(cfg.transmit_power(), WithinRel(2000.0, 1e-12));
  CHECK_THAT(cfg.target_rate(), WithinRel(std::log2(1.2), 1e-12));
}

TEST_CASE("invalid configurations report every problem") {
  NetworkConfig cfg;
  cfg.antennas_per_bs = 4;
  cfg.clusters_per_cell = 5;
  cfg.sinr_target = 0.0;
  cfg.noise_power = -1.0;
  const auto errors = cfg.validation_errors();
  // The negative noise power also makes the transmit power invalid.
  REQUIRE(errors.size() == 4);
  CHECK(errors[0].find("K exceeds M") != std::string::npos);
  CHECK(errors[3].find("transmit power") != std::string::npos);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(NetworkConfig{}.validation_errors().empty());
}

TEST_CASE("single-cell restriction keeps own links") {
  NetworkConfig cfg;
  cfg.num_cells = 2;
  cfg.clusters_per_cell = 2;
  cfg.antennas_per_bs = 3;
  const ChannelSet ch = draw_trial(cfg, 0);
  const ChannelSet one = ch.single_cell(1);
  REQUIRE(one.num_clusters() == 2);
  CHECK(one.g(0, 0) == ch.g(1, 2));
  CHECK(one.h(0, 1) == ch.h(1, 3));
}
