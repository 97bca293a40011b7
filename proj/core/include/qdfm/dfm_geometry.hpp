// Copyright 2026 The qdfm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include "qdfm/spectral_dfs.hpp"
#include "qdfm/types.hpp"

namespace qdfm {

/// Ordered eigenvalue multiplicities (m_1, ..., m_d) of an n x n Hermitian
/// matrix, sum m_i = n.
class MultiplicitySignature {
 public:
  explicit MultiplicitySignature(std::vector<int> mu);

  const std::vector<int>& mu() const { return mu_; }
  int total() const;        // n
  int block_count() const;  // d
  int sum_squares() const;

 private:
  std::vector<int> mu_;
};

/// Multiplicities of the preserved blocks (eigenvalues fixed) and of the free
/// blocks (only multiplicities fixed; possibly empty).
struct DfmSpec {
  std::vector<int> preserved;    // m_K, nonempty
  std::vector<int> free_blocks;  // m_Kbar, possibly empty

  void validate() const;
  int total() const;
};

/// Codimension of the fixed-multiplicity stratum of density matrices:
/// sum m_i^2 - d + 1.
int stratum_codimension(const MultiplicitySignature& mu);

/// Dimension of the fixed-spectrum unitary orbit U(n)/prod U(m_l):
/// n^2 - sum m_l^2.
int isospectral_leaf_dimension(const MultiplicitySignature& mu);

/// Dimension of the manifold of density matrices with the preserved blocks'
/// eigenvalues fixed and the free blocks' multiplicities fixed:
/// n^2 + sum m_kbar - sum m_kbar^2 - sum m_k^2 - 1 when free blocks exist;
/// with no free blocks all eigenvalues are specified and the trace constraint
/// is already implied, so the isospectral leaf dimension applies instead.
int dfm_dimension(const DfmSpec& spec);

struct DfmTableRow {
  std::vector<int> preserved;
  std::vector<int> free_blocks;
  int dimension = 0;
};

/// Enumerates the distinct (m_K, m_Kbar) partition pairs for dimension n and
/// their manifold dimensions. Pairs whose free part is a single simple
/// eigenvalue are omitted: the trace constraint pins that eigenvalue, so they
/// coincide with a fully specified row. Rows are ordered by (sum m_K,
/// descending-sorted m_K, descending-sorted m_Kbar).
std::vector<DfmTableRow> table_generate(int n);

/// First-order directions that keep the selected eigenvalues stationary and
/// move each unselected block as a trace-balanced scalar shift. The strict
/// block-scalar construction yields (n^2 - sum_l m_l^2) + (d_free - 1)
/// directions; the closed-form manifold dimension counts sum m_kbar free
/// eigenvalue parameters instead, so the two are reported side by side and
/// disagree whenever some m_kbar > 1.
struct TangentBasisReport {
  std::vector<HermitianOperator> basis;
  Eigen::Index construction_dimension = 0;
  Eigen::Index theorem_dimension = 0;
  bool dimensions_agree = false;
};

TangentBasisReport multiplicity_preserving_tangent(const DensityMatrix& rho,
                                                   const BlockSpectrum& spec,
                                                   const BlockSelection& sel);

/// DfmSpec induced by a block spectrum and a selection of its blocks.
DfmSpec dfm_spec_from_selection(const BlockSpectrum& spec, const BlockSelection& sel);

}  // namespace qdfm
