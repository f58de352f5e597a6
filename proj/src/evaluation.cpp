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

#include "nomacomp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nomacomp {

namespace {

double received(const CVector& v, const CVector& q) { return std::norm(v.dot(q)); }

}  // namespace

int RateReport::qos_violations() const {
  return static_cast<int>(std::count(qos_ok.begin(), qos_ok.end(), false));
}

void finalize_rates(RateReport& r, double sinr_target) {
  const double r0 = std::log2(1.0 + sinr_target);
  const auto n = r.sinr_g1.size();
  r.rate_g1.resize(n);
  r.rate_sic.resize(n);
  r.rate_g2.resize(n);
  r.qos_ok.resize(n);
  r.sum_rate_group1 = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    r.rate_g1[c] = std::log2(1.0 + r.sinr_g1[c]);
    r.rate_sic[c] = std::log2(1.0 + r.sinr_sic[c]);
    r.rate_g2[c] = std::log2(1.0 + r.sinr_g2[c]);
    r.qos_ok[c] = std::min(r.rate_sic[c], r.rate_g2[c]) >= r0 - kRateTolerance;
    r.sum_rate_group1 += r.rate_g1[c];
  }
}

RateReport achieved_sinrs(const EffectiveChannels& eff, std::span<const CVector> q, std::span<const double> a,
                          double sinr_target) {
  const int nk = eff.num_clusters();
  if (static_cast<int>(q.size()) != nk || static_cast<int>(a.size()) != nk) {
    throw ConfigError({"achieved_sinrs: one beamformer and split per cluster required"});
  }
  RateReport r;
  r.sinr_g1.resize(nk);
  r.sinr_sic.resize(nk);
  r.sinr_g2.resize(nk);
  for (int rx = 0; rx < nk; ++rx) {
    double inter_g = 0.0;
    double inter_h = 0.0;
    double intra_h = 0.0;
    for (int tx = 0; tx < nk; ++tx) {
      if (tx == rx) continue;
      if (eff.cell_of(tx) != eff.cell_of(rx)) {
        inter_g += received(eff.gv(tx, rx), q[tx]);
        inter_h += received(eff.hv(tx, rx), q[tx]);
      } else {
        intra_h += received(eff.hv(tx, rx), q[tx]);
      }
    }
    const double sg = received(eff.gv(rx, rx), q[rx]);
    const double sh = received(eff.hv(rx, rx), q[rx]);
    const double b = 1.0 - a[rx];
    r.sinr_g1[rx] = a[rx] * sg / (inter_g + 1.0);
    r.sinr_sic[rx] = b * sg / (a[rx] * sg + inter_g + 1.0);
    r.sinr_g2[rx] = b * sh / (a[rx] * sh + intra_h + inter_h + 1.0);
  }
  finalize_rates(r, sinr_target);
  return r;
}

RateReport achieved_sinrs(const ChannelSet& channels, const PrecoderBasis& bases, std::span<const CVector> q,
                          std::span<const double> a, double sinr_target) {
  return achieved_sinrs(effective_matrices(channels, bases), q, a, sinr_target);
}

std::vector<double> cell_powers(std::span<const CVector> q, int clusters_per_cell) {
  std::vector<double> p(q.size() / clusters_per_cell, 0.0);
  for (std::size_t c = 0; c < q.size(); ++c) p[c / clusters_per_cell] += q[c].squaredNorm();
  return p;
}

FeasibilityRecord check_constraints(const RateReport& report, std::span<const CVector> q, int clusters_per_cell,
                                    double power, double sinr_target) {
  const double r0 = std::log2(1.0 + sinr_target);
  FeasibilityRecord f;
  for (int c = 0; c < report.num_clusters(); ++c) {
    if (report.rate_sic[c] < r0 - kRateTolerance) f.sic_ok = false;
    if (report.rate_g2[c] < r0 - kRateTolerance) f.qos_ok = false;
  }
  for (double p : cell_powers(q, clusters_per_cell)) {
    if (p > power * (1.0 + 1e-6)) f.power_ok = false;
  }
  return f;
}

double TrialRecord::min_rank_ratio() const {
  if (rank_ratios.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(rank_ratios.begin(), rank_ratios.end());
}

Summary aggregate(std::span<const TrialRecord> trials) {
  if (trials.empty()) throw std::invalid_argument("aggregate: no trials");
  Summary s;
  s.trials = static_cast<int>(trials.size());
  s.min_sum_rate = std::numeric_limits<double>::infinity();
  s.max_sum_rate = -std::numeric_limits<double>::infinity();
  s.rank_ratio_minimum = std::numeric_limits<double>::infinity();
  double finite_sum = 0.0;
  int finite_count = 0;
  int feasible = 0;
  int ratio_count = 0;
  for (const auto& t : trials) {
    s.mean_sum_rate += t.sum_rate_group1;
    s.min_sum_rate = std::min(s.min_sum_rate, t.sum_rate_group1);
    s.max_sum_rate = std::max(s.max_sum_rate, t.sum_rate_group1);
    s.qos_violations += t.qos_violations;
    s.mean_iterations += t.iterations;
    if (!t.feasible) continue;
    ++feasible;
    for (double r : t.rank_ratios) {
      ++ratio_count;
      s.rank_ratio_maximum = std::max(s.rank_ratio_maximum, r);
      s.rank_ratio_minimum = std::min(s.rank_ratio_minimum, r);
      if (std::isfinite(r)) {
        finite_sum += r;
        ++finite_count;
      }
    }
  }
  s.mean_sum_rate /= s.trials;
  s.mean_iterations /= s.trials;
  s.feasible_fraction = static_cast<double>(feasible) / s.trials;
  if (ratio_count == 0) {
    s.rank_ratio_minimum = s.rank_ratio_maximum = s.rank_ratio_average = std::numeric_limits<double>::quiet_NaN();
  } else {
    s.rank_ratio_average = finite_count > 0 ? finite_sum / finite_count : std::numeric_limits<double>::infinity();
  }
  return s;
}

}  // namespace nomacomp
