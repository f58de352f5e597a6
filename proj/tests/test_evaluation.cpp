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
#include <limits>
#include <stdexcept>
#include <vector>

#include "nomacomp/evaluation.hpp"
#include "test_helpers.hpp"

using namespace nomacomp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<CVector> scalars(std::initializer_list<double> values) {
  std::vector<CVector> q;
  for (double v : values) q.push_back(CVector::Constant(1, cplx(v, 0.0)));
  return q;
}

TrialRecord record(double rate, bool feasible, std::vector<double> ratios = {}) {
  TrialRecord r;
  r.sum_rate_group1 = rate;
  r.feasible = feasible;
  r.rank_ratios = std::move(ratios);
  return r;
}

}  // namespace

TEST_CASE("scalar cluster SINRs") {
  ChannelSet ch = testing::uniform_channels(1, 1, 1, 2.0, 0.0, 0.5);
  ch.h(0, 0)(0) = 1.0;
  const PrecoderBasis pb = compute_bases(ch);
  const auto q = scalars({3.0});
  const std::vector<double> a{0.25};
  const RateReport r = achieved_sinrs(ch, pb, q, a, 0.2);
  // |q|^2 = 9, |g|^2 / sigma^2 = 8, |h|^2 / varsigma^2 = 2.
  CHECK_THAT(r.sinr_g1[0], WithinRel(0.25 * 72.0, 1e-14));
  CHECK_THAT(r.sinr_sic[0], WithinRel(0.75 * 72.0 / (0.25 * 72.0 + 1.0), 1e-14));
  CHECK_THAT(r.sinr_g2[0], WithinRel(0.75 * 18.0 / (0.25 * 18.0 + 1.0), 1e-14));
  CHECK_THAT(r.rate_g1[0], WithinRel(std::log2(19.0), 1e-14));
  CHECK_THAT(r.sum_rate_group1, WithinRel(std::log2(19.0), 1e-14));
  CHECK(r.qos_ok[0]);
}

TEST_CASE("all power to Group 2") {
  const ChannelSet ch = testing::uniform_channels(1, 1, 1, 1.0, 0.0);
  const RateReport r = achieved_sinrs(ch, compute_bases(ch), scalars({2.0}), std::vector<double>{0.0}, 0.2);
  CHECK(r.sinr_g1[0] == 0.0);
  CHECK_THAT(r.sinr_g2[0], WithinRel(4.0, 1e-14));
  CHECK_THAT(r.sinr_sic[0], WithinRel(4.0, 1e-14));
}

TEST_CASE("zero cross links leave only noise") {
  const ChannelSet ch = testing::uniform_channels(2, 1, 1, 1.0, 0.0);
  const RateReport r = achieved_sinrs(ch, compute_bases(ch), scalars({1.0, 5.0}), std::vector<double>{0.5, 0.5}, 0.2);
  CHECK_THAT(r.sinr_g1[0], WithinRel(0.5, 1e-14));
  CHECK_THAT(r.sinr_g1[1], WithinRel(12.5, 1e-14));
}

TEST_CASE("inter-cell interference enters both groups") {
  const ChannelSet ch = testing::uniform_channels(2, 1, 1, 1.0, 0.5);
  const RateReport r = achieved_sinrs(ch, compute_bases(ch), scalars({2.0, 2.0}), std::vector<double>{0.5, 0.5}, 0.2);
  // Cross power 0.25 * 4 = 1.
  CHECK_THAT(r.sinr_g1[0], WithinRel(2.0 / 2.0, 1e-14));
  CHECK_THAT(r.sinr_g2[0], WithinRel(2.0 / (2.0 + 1.0 + 1.0), 1e-14));
}

TEST_CASE("SIC SINR falls as the split grows") {
  NetworkConfig cfg = testing::small_config(2, 3, 2, 30.0);
  const ChannelSet ch = draw_trial(cfg, 0);
  const PrecoderBasis pb = compute_bases(ch);
  std::vector<CVector> q;
  for (const auto& U : pb.U) q.push_back(CVector::Constant(U.cols(), cplx(3.0, 1.0)));
  double prev = std::numeric_limits<double>::infinity();
  for (double a : {0.1, 0.3, 0.6, 0.9}) {
    const RateReport r = achieved_sinrs(ch, pb, q, std::vector<double>(4, a), 0.2);
    CHECK(r.sinr_sic[0] < prev);
    prev = r.sinr_sic[0];
  }
}

TEST_CASE("constraint check on silent beamformers") {
  const ChannelSet ch = testing::uniform_channels(1, 1, 1, 1.0, 0.0);
  const auto q = scalars({0.0});
  const RateReport r = achieved_sinrs(ch, compute_bases(ch), q, std::vector<double>{0.5}, 0.2);
  const FeasibilityRecord f = check_constraints(r, q, 1, 10.0, 0.2);
  CHECK_FALSE(f.sic_ok);
  CHECK_FALSE(f.qos_ok);
  CHECK(f.power_ok);
  CHECK_FALSE(f.all());
  CHECK(r.qos_violations() == 1);
}

TEST_CASE("power check uses per-BS sums") {
  const auto q = scalars({1.0, 2.0, 3.0, 0.0});
  const auto p = cell_powers(q, 2);
  REQUIRE(p.size() == 2);
  CHECK(p[0] == 5.0);
  CHECK(p[1] == 9.0);
  RateReport dummy;
  CHECK(check_constraints(dummy, q, 2, 9.0, 0.2).power_ok);
  CHECK_FALSE(check_constraints(dummy, q, 2, 8.9, 0.2).power_ok);
}

TEST_CASE("QoS flag uses the rate tolerance") {
  RateReport r;
  const double target = 0.2;
  const double r0 = std::log2(1.2);
  r.sinr_g1 = {1.0, 1.0, 1.0};
  r.sinr_sic = {target, std::exp2(r0 - 5e-5) - 1.0, std::exp2(r0 - 2e-4) - 1.0};
  r.sinr_g2 = {target, 1.0, 1.0};
  finalize_rates(r, target);
  CHECK(r.qos_ok[0]);
  CHECK(r.qos_ok[1]);
  CHECK_FALSE(r.qos_ok[2]);
}

TEST_CASE("aggregation") {
  SECTION("empty input throws") {
    CHECK_THROWS_AS(aggregate(std::vector<TrialRecord>{}), std::invalid_argument);
  }
  SECTION("single trial") {
    const std::vector<TrialRecord> t{record(3.5, true, {10.0, 20.0})};
    const Summary s = aggregate(t);
    CHECK(s.mean_sum_rate == 3.5);
    CHECK(s.min_sum_rate == 3.5);
    CHECK(s.max_sum_rate == 3.5);
    CHECK(s.feasible_fraction == 1.0);
    CHECK(s.rank_ratio_average == 15.0);
    CHECK(s.rank_ratio_minimum == 10.0);
    CHECK(s.rank_ratio_maximum == 20.0);
  }
  SECTION("all infeasible") {
    const std::vector<TrialRecord> t{record(0.0, false), record(0.0, false)};
    const Summary s = aggregate(t);
    CHECK(s.mean_sum_rate == 0.0);
    CHECK(s.feasible_fraction == 0.0);
    CHECK(std::isnan(s.rank_ratio_average));
  }
  SECTION("infinite ratios only enter the maximum") {
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<TrialRecord> t{record(1.0, true, {inf, 4.0}), record(3.0, true, {8.0}),
                                     record(0.0, false, {1.0})};
    const Summary s = aggregate(t);
    CHECK_THAT(s.mean_sum_rate, WithinAbs(4.0 / 3.0, 1e-15));
    CHECK_THAT(s.feasible_fraction, WithinAbs(2.0 / 3.0, 1e-15));
    CHECK(s.rank_ratio_average == 6.0);
    CHECK(s.rank_ratio_maximum == inf);
    CHECK(s.rank_ratio_minimum == 4.0);
  }
}
