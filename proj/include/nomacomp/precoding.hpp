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

#include <span>
#include <vector>

#include "nomacomp/scenario.hpp"
#include "nomacomp/types.hpp"

namespace nomacomp {

struct NullBasis {
  CMatrix basis;  // M x (M-K+1), orthonormal columns
  bool rank_deficient = false;
};

/// Orthonormal basis of the null space of the stacked K-1 channels.
///
/// Columns are ordered as the trailing left singular vectors of the stacked
/// matrix; each column's first nonzero entry is rotated to be real positive
/// so repeated runs yield identical bases. Singular values below 1e-12 of the
/// largest count as zero; a rank-deficient stack sets the warning flag and
/// returns the first M-K+1 null-space vectors.
NullBasis zf_null_basis(std::span<const CVector> other_channels, int antennas, int clusters_per_cell);

enum class BasisGroup { group1, group2 };

struct PrecoderBasis {
  int num_cells = 0;
  int clusters_per_cell = 0;
  std::vector<CMatrix> U;  // per flat cluster id
  std::vector<bool> rank_deficient;

  int null_dim() const { return U.empty() ? 0 : static_cast<int>(U.front().cols()); }
};

/// ZF bases nulling each cluster's beam at the other same-cell users of
/// the chosen group (Group 1 for NOMA).
PrecoderBasis compute_bases(const ChannelSet& channels, BasisGroup group = BasisGroup::group1);

/// Effective channel matrices between every transmitting cluster and every
/// victim user, G = U^H g g^H U / sigma^2 and H = U^H h h^H U / varsigma^2.
///
/// Each matrix is stored together with its generating vector
/// (U^H g / sigma) so traces against a PSD matrix can be taken as a
/// quadratic form.
struct EffectiveChannels {
  int num_cells = 0;
  int clusters_per_cell = 0;
  int dim = 0;  // M - K + 1
  // [tx * NK + rx]
  std::vector<CVector> g_vec;
  std::vector<CVector> h_vec;
  std::vector<CMatrix> G;
  std::vector<CMatrix> H;

  int num_clusters() const { return num_cells * clusters_per_cell; }
  int cell_of(int cluster) const { return cluster / clusters_per_cell; }
  const CMatrix& Gmat(int tx, int rx) const { return G[tx * num_clusters() + rx]; }
  const CMatrix& Hmat(int tx, int rx) const { return H[tx * num_clusters() + rx]; }
  const CVector& gv(int tx, int rx) const { return g_vec[tx * num_clusters() + rx]; }
  const CVector& hv(int tx, int rx) const { return h_vec[tx * num_clusters() + rx]; }
};

EffectiveChannels effective_matrices(const ChannelSet& channels, const PrecoderBasis& bases);

/// tr(v v^H Q) = v^H Q v for Hermitian Q.
double quad_form(const CVector& v, const CMatrix& Q);

struct InterferenceScalars {
  std::vector<double> u;  // Group-1 inter-cell interference + 1
  std::vector<double> v;  // Group-2 intra- and inter-cell interference + 1
};

InterferenceScalars interference_scalars(const EffectiveChannels& eff, std::span<const CMatrix> Q);

}  // namespace nomacomp
