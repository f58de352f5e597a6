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

#include "nomacomp/baselines.hpp"
#include "test_helpers.hpp"

using namespace nomacomp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Independent coarse search over (p1, p2, a1, a2) for two scalar cells.
double coarse_oracle(const NetworkConfig& cfg, const ChannelSet& ch, int points) {
  const double P = cfg.transmit_power();
  const double gamma = cfg.sinr_target;
  double best = -1.0;
  auto gain = [](const CVector& v) { return std::norm(v(0)); };
  for (int i1 = 0; i1 < points; ++i1) {
    for (int i2 = 0; i2 < points; ++i2) {
      const double p[2] = {P * i1 / (points - 1), P * i2 / (points - 1)};
      for (int j1 = 0; j1 < points; ++j1) {
        for (int j2 = 0; j2 < points; ++j2) {
          const double a[2] = {1.0 * j1 / (points - 1), 1.0 * j2 / (points - 1)};
          double rate = 0.0;
          bool ok = true;
          for (int c = 0; c < 2 && ok; ++c) {
            const int o = 1 - c;
            const double sg = p[c] * gain(ch.g(c, c)) / ch.noise_g[c];
            const double ig = p[o] * gain(ch.g(o, c)) / ch.noise_g[c];
            const double sh = p[c] * gain(ch.h(c, c)) / ch.noise_h[c];
            const double ih = p[o] * gain(ch.h(o, c)) / ch.noise_h[c];
            const double b = 1.0 - a[c];
            ok = b * sg >= gamma * (a[c] * sg + ig + 1.0) && b * sh >= gamma * (a[c] * sh + ih + 1.0);
            rate += std::log2(1.0 + a[c] * sg / (ig + 1.0));
          }
          if (ok) best = std::max(best, rate);
        }
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("scheme names round trip") {
  for (Scheme s : {Scheme::noma_comp, Scheme::fixed_power, Scheme::no_comp, Scheme::oma_comp, Scheme::brute_force}) {
    const auto parsed = parse_scheme(to_string(s));
    REQUIRE(parsed);
    CHECK(*parsed == s);
  }
  CHECK_FALSE(parse_scheme("nonsense"));
  CHECK(std::string(to_string(Scheme::noma_comp)) == "NOMA_CoMP");
}

TEST_CASE("doubled-rate SINR target") {
  CHECK_THAT(oma_sinr_target(0.2), WithinRel(0.44, 1e-12));
  CHECK_THAT(std::log2(1.0 + oma_sinr_target(0.5)) / 2.0, WithinRel(std::log2(1.5), 1e-12));
}

TEST_CASE("fixed power split stays at its constant") {
  NetworkConfig cfg = testing::small_config(2, 4, 2, 30.0);
  cfg.path_loss_exponent = 4.0;
  const SolveResult r = run_fixed_power(cfg, draw_trial(cfg, 0));
  REQUIRE(r.feasible);
  for (double a : r.a) CHECK(a == kFixedSplit);
}

TEST_CASE("no coordination equals the joint design for one cell") {
  NetworkConfig cfg = testing::small_config(1, 4, 2, 30.0);
  const ChannelSet ch = draw_trial(cfg, 1);
  const SolveResult a = run_no_comp(cfg, ch);
  const SolveResult b = run(cfg, ch);
  REQUIRE(a.feasible);
  REQUIRE(b.feasible);
  CHECK_THAT(a.sum_rate_group1, WithinRel(b.sum_rate_group1, 1e-9));
}

TEST_CASE("single-cell designs spend the full budget") {
  NetworkConfig cfg = testing::small_config(1, 4, 2, 30.0);
  const double P = cfg.transmit_power();
  for (std::uint64_t t = 0; t < 3; ++t) {
    const SolveResult r = run_no_comp(cfg, draw_trial(cfg, t));
    REQUIRE(r.feasible);
    double used = 0.0;
    for (const auto& Q : r.Q) used += Q.trace().real();
    CHECK_THAT(used, WithinRel(P, 1e-4));
  }
}

TEST_CASE("orthogonal access halves the rates") {
  NetworkConfig cfg = testing::small_config(2, 4, 2, 30.0);
  cfg.path_loss_exponent = 4.0;
  const SolveResult r = run_oma_comp(cfg, draw_trial(cfg, 2));
  REQUIRE(r.feasible);
  double sum = 0.0;
  for (int c = 0; c < 4; ++c) {
    CHECK_THAT(r.rates.rate_g1[c], WithinRel(0.5 * std::log2(1.0 + r.rates.sinr_g1[c]), 1e-12));
    CHECK_THAT(r.rates.rate_g2[c], WithinRel(0.5 * std::log2(1.0 + r.rates.sinr_g2[c]), 1e-12));
    CHECK(r.rates.qos_ok[c]);
    sum += r.rates.rate_g1[c];
  }
  CHECK_THAT(r.sum_rate_group1, WithinRel(sum, 1e-12));
}

TEST_CASE("oracle rejects other dimensions") {
  NetworkConfig cfg = testing::small_config(2, 2, 1, 30.0);
  CHECK_THROWS_AS(brute_force_oracle(cfg, draw_trial(cfg, 0)), ConfigError);
}

TEST_CASE("oracle with isolated cells transmits at full power") {
  NetworkConfig cfg = testing::small_config(2, 1, 1, 20.0);
  const ChannelSet ch = testing::uniform_channels(2, 1, 1, 1.0, 0.0);
  const SolveResult r = brute_force_oracle(cfg, ch);
  REQUIRE(r.feasible);
  for (const auto& Q : r.Q) CHECK_THAT(Q(0, 0).real(), WithinRel(cfg.transmit_power(), 1e-12));
}

TEST_CASE("oracle agrees with an independent grid and refines it") {
  NetworkConfig cfg = testing::small_config(2, 1, 1, 30.0);
  for (std::uint64_t t = 0; t < 3; ++t) {
    const ChannelSet ch = draw_trial(cfg, t);
    const double coarse = coarse_oracle(cfg, ch, 21);
    REQUIRE(coarse >= 0.0);
    const SolveResult f = brute_force_oracle(cfg, ch, OracleGrid{21, 11});
    REQUIRE(f.feasible);
    CHECK(f.objective_trace.back() >= coarse);
    CHECK(f.objective_trace.back() <= coarse + 0.5);
    CHECK_THAT(f.sum_rate_group1, WithinAbs(f.objective_trace.back(), 1e-9));
    CHECK(f.qos_violations() == 0);
  }
}
