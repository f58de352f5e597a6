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

#include "nomacomp/precoding.hpp"

#include <cmath>

namespace nomacomp {

namespace {

constexpr double kRankThreshold = 1e-12;

void normalize_phase(CMatrix& basis) {
  for (Eigen::Index col = 0; col < basis.cols(); ++col) {
    const double scale = basis.col(col).cwiseAbs().maxCoeff();
    for (Eigen::Index row = 0; row < basis.rows(); ++row) {
      const cplx z = basis(row, col);
      if (std::abs(z) > 1e-12 * scale) {
        basis.col(col) *= std::conj(z) / std::abs(z);
        basis(row, col) = std::abs(z);
        break;
      }
    }
  }
}

}  // namespace

NullBasis zf_null_basis(std::span<const CVector> other_channels, int antennas, int clusters_per_cell) {
  const int m = antennas;
  const int dim = antennas - clusters_per_cell + 1;
  if (dim < 1 || static_cast<int>(other_channels.size()) != clusters_per_cell - 1) {
    throw ConfigError({"zf_null_basis: expected K-1 channels with K <= M"});
  }
  NullBasis out;
  if (other_channels.empty()) {
    out.basis = CMatrix::Identity(m, m);
    return out;
  }
  CMatrix stacked(m, static_cast<Eigen::Index>(other_channels.size()));
  for (std::size_t j = 0; j < other_channels.size(); ++j) {
    if (other_channels[j].size() != m) throw ConfigError({"zf_null_basis: channel length differs from M"});
    stacked.col(static_cast<Eigen::Index>(j)) = other_channels[j];
  }
  Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double largest = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (largest > 0.0 && sv(i) > kRankThreshold * largest) ++rank;
  }
  out.rank_deficient = rank < clusters_per_cell - 1;
  out.basis = svd.matrixU().block(0, rank, m, dim);
  normalize_phase(out.basis);
  return out;
}

PrecoderBasis compute_bases(const ChannelSet& channels, BasisGroup group) {
  PrecoderBasis bases;
  bases.num_cells = channels.num_cells;
  bases.clusters_per_cell = channels.clusters_per_cell;
  const int kper = channels.clusters_per_cell;
  for (int n = 0; n < channels.num_cells; ++n) {
    for (int k = 0; k < kper; ++k) {
      std::vector<CVector> others;
      for (int j = 0; j < kper; ++j) {
        if (j == k) continue;
        const int cj = cluster_id(n, j, kper);
        others.push_back(group == BasisGroup::group1 ? channels.g(n, cj) : channels.h(n, cj));
      }
      NullBasis nb = zf_null_basis(others, channels.antennas, kper);
      bases.U.push_back(std::move(nb.basis));
      bases.rank_deficient.push_back(nb.rank_deficient);
    }
  }
  return bases;
}

EffectiveChannels effective_matrices(const ChannelSet& channels, const PrecoderBasis& bases) {
  if (bases.num_cells != channels.num_cells || bases.clusters_per_cell != channels.clusters_per_cell ||
      static_cast<int>(bases.U.size()) != channels.num_clusters() ||
      (!bases.U.empty() && bases.U.front().rows() != channels.antennas)) {
    throw ConfigError({"effective_matrices: precoder bases do not match channel dimensions"});
  }
  EffectiveChannels eff;
  eff.num_cells = channels.num_cells;
  eff.clusters_per_cell = channels.clusters_per_cell;
  eff.dim = bases.null_dim();
  const int nk = channels.num_clusters();
  const int kper = channels.clusters_per_cell;
  eff.g_vec.resize(static_cast<std::size_t>(nk) * nk);
  eff.h_vec.resize(eff.g_vec.size());
  eff.G.resize(eff.g_vec.size());
  eff.H.resize(eff.g_vec.size());
  for (int tx = 0; tx < nk; ++tx) {
    const int bs = tx / kper;
    const CMatrix& U = bases.U[tx];
    for (int rx = 0; rx < nk; ++rx) {
      const std::size_t idx = static_cast<std::size_t>(tx) * nk + rx;
      eff.g_vec[idx] = U.adjoint() * channels.g(bs, rx) / std::sqrt(channels.noise_g[rx]);
      eff.h_vec[idx] = U.adjoint() * channels.h(bs, rx) / std::sqrt(channels.noise_h[rx]);
      eff.G[idx] = eff.g_vec[idx] * eff.g_vec[idx].adjoint();
      eff.H[idx] = eff.h_vec[idx] * eff.h_vec[idx].adjoint();
    }
  }
  return eff;
}

double quad_form(const CVector& v, const CMatrix& Q) { return std::real(v.dot(Q * v)); }

InterferenceScalars interference_scalars(const EffectiveChannels& eff, std::span<const CMatrix> Q) {
  const int nk = eff.num_clusters();
  if (static_cast<int>(Q.size()) != nk) throw ConfigError({"interference_scalars: one Q per cluster required"});
  InterferenceScalars out;
  out.u.assign(nk, 1.0);
  out.v.assign(nk, 1.0);
  for (int rx = 0; rx < nk; ++rx) {
    const int cell = eff.cell_of(rx);
    for (int tx = 0; tx < nk; ++tx) {
      if (tx == rx) continue;
      if (Q[tx].rows() != eff.dim) throw ConfigError({"interference_scalars: Q has wrong size"});
      const bool same_cell = eff.cell_of(tx) == cell;
      if (!same_cell) out.u[rx] += quad_form(eff.gv(tx, rx), Q[tx]);
      out.v[rx] += quad_form(eff.hv(tx, rx), Q[tx]);
    }
  }
  return out;
}

}  // namespace nomacomp
