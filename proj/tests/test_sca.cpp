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
#include <vector>

#include "nomacomp/sca.hpp"
#include "test_helpers.hpp"

using namespace nomacomp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

EffectiveChannels scalar_channel(double g, double h) {
  ChannelSet ch = testing::uniform_channels(1, 1, 1, 1.0, 0.0);
  ch.g(0, 0)(0) = g;
  ch.h(0, 0)(0) = h;
  return effective_matrices(ch, compute_bases(ch));
}

// Exhaustive (power, split) search for one single-antenna cluster.
double grid_rate(double g_snr, double h_snr, double gamma, int points) {
  double best = 0.0;
  for (int i = 0; i < points; ++i) {
    const double p = static_cast<double>(i) / (points - 1);
    for (int j = 0; j < points; ++j) {
      const double a = static_cast<double>(j) / (points - 1);
      const double b = 1.0 - a;
      const bool sic = b * p * g_snr >= gamma * (a * p * g_snr + 1.0);
      const bool qos = b * p * h_snr >= gamma * (a * p * h_snr + 1.0);
      if (sic && qos) best = std::max(best, std::log2(1.0 + a * p * g_snr));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("fixed-point update examples") {
  SubproblemSolution sol;
  sol.Q = {CMatrix::Identity(1, 1)};
  sol.t = {0.7};
  {
    const EffectiveChannels eff = scalar_channel(std::sqrt(2.0), 1.0);
    sol.a = {0.5};
    const FixedPoints fp = update_fixed_points(sol, eff);
    CHECK_THAT(fp.c[0], WithinRel(2.0, 1e-14));
    CHECK(fp.t_tilde[0] == 0.7);
    CHECK(fp.w_tilde[0] == 1.0);
  }
  {
    const EffectiveChannels eff = scalar_channel(1.0, 1.0);
    sol.a = {1.0};
    const FixedPoints fp = update_fixed_points(sol, eff);
    CHECK_THAT(fp.d[0], WithinRel(1.0, 1e-14));
  }
  {
    const EffectiveChannels eff = scalar_channel(1.0, 1.0);
    sol.a = {0.0};
    bool clamped = false;
    const FixedPoints fp = update_fixed_points(sol, eff, &clamped);
    CHECK(clamped);
    CHECK(std::isfinite(fp.c[0]));
    CHECK(fp.valid());
  }
}

TEST_CASE("initial expansion points") {
  NetworkConfig cfg = testing::small_config(2, 5, 3, 30.0);
  const ChannelSet ch = draw_trial(cfg, 0);
  const EffectiveChannels eff = effective_matrices(ch, compute_bases(ch));
  const double P = cfg.transmit_power();
  const auto Q0 = initial_matrices(eff, P);
  const FixedPoints fp = initialize(eff, P, 0.5);
  REQUIRE(fp.valid());
  for (int c = 0; c < eff.num_clusters(); ++c) {
    const double S = quad_form(eff.gv(c, c), Q0[c]);
    CHECK_THAT(S, WithinRel(P / 3.0 * eff.gv(c, c).squaredNorm(), 1e-12));
    CHECK_THAT(Q0[c].trace().real(), WithinRel(P / 3.0, 1e-12));
    CHECK_THAT(fp.c[c], WithinRel(std::sqrt(S / 0.5), 1e-12));
    CHECK_THAT(fp.t_tilde[c], WithinRel(std::sqrt(0.5 * S), 1e-12));
  }

  NetworkConfig one = testing::small_config(1, 4, 2, 30.0);
  const ChannelSet c1 = draw_trial(one, 0);
  const EffectiveChannels e1 = effective_matrices(c1, compute_bases(c1));
  for (double w : initialize(e1, one.transmit_power(), 0.5).w_tilde) CHECK(w == 1.0);
}

TEST_CASE("single cluster matches a fine grid search") {
  for (double h : {1.0, 0.5}) {
    NetworkConfig cfg = testing::small_config(1, 1, 1, 20.0);
    ChannelSet ch = testing::uniform_channels(1, 1, 1, 1.0, 0.0);
    ch.h(0, 0)(0) = h;
    const SolveResult r = run(cfg, ch);
    REQUIRE(r.feasible);
    const double oracle = grid_rate(100.0, 100.0 * h * h, cfg.sinr_target, 1001);
    CHECK_THAT(r.sum_rate_group1, WithinRel(oracle, 0.02));
    CHECK(r.sum_rate_group1 >= oracle - 1e-3);
  }
}

TEST_CASE("loop invariants on random networks") {
  NetworkConfig cfg = testing::small_config(2, 4, 2, 30.0);
  cfg.path_loss_exponent = 4.0;
  for (std::uint64_t t = 0; t < 4; ++t) {
    const ChannelSet ch = draw_trial(cfg, t);
    const SolveResult r = run(cfg, ch);
    REQUIRE(r.feasible);
    REQUIRE_FALSE(r.objective_trace.empty());
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
      CHECK(r.objective_trace[i] >= r.objective_trace[i - 1] - 1e-6);
    }
    CHECK(std::isnan(r.iterations.front().rel_change));
    CHECK(r.iterations_used == static_cast<int>(r.objective_trace.size()));
    CHECK(r.iterations_used <= cfg.max_iterations);
    for (const auto& rec : r.iterations) {
      CHECK(rec.agm_residual <= 1e-8);
      CHECK(rec.taylor_residual <= 1e-8);
    }
    for (int c = 0; c < 4; ++c) {
      CHECK_THAT(r.a[c] + r.b[c], WithinAbs(1.0, 1e-12));
      CHECK(r.rates.qos_ok[c]);
    }
    CHECK(r.qos_violations() == 0);
    if (r.min_rank_ratio() >= 1e4) {
      CHECK_THAT(r.sum_rate_group1, WithinRel(r.objective_trace.back(), 0.01));
    }
  }
}

TEST_CASE("hopeless channels report an infeasible design") {
  NetworkConfig cfg = testing::small_config(1, 1, 1, 0.0);
  const ChannelSet ch = testing::uniform_channels(1, 1, 1, 1e-6, 0.0);
  const SolveResult r = run(cfg, ch);
  CHECK_FALSE(r.feasible);
  CHECK(r.sum_rate_group1 == 0.0);
  CHECK(r.qos_violations() == 0);
}
