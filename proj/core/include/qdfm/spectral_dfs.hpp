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

#include "qdfm/lindblad.hpp"
#include "qdfm/types.hpp"

namespace qdfm {

struct SpectralBlock {
  double eigenvalue = 0.0;  // representative value (mean of the cluster)
  Eigen::Index multiplicity = 0;
  ComplexMatrix basis;  // n x multiplicity, orthonormal columns

  ComplexMatrix projector() const { return basis * basis.adjoint(); }
};

/// Clustered spectral decomposition of a Hermitian matrix, blocks ordered by
/// strictly decreasing eigenvalue.
class BlockSpectrum {
 public:
  static BlockSpectrum from_hermitian(const HermitianOperator& op, double cluster_tol);

  const std::vector<SpectralBlock>& blocks() const { return blocks_; }
  const SpectralBlock& block(Eigen::Index l) const { return blocks_.at(l); }
  Eigen::Index block_count() const { return static_cast<Eigen::Index>(blocks_.size()); }
  Eigen::Index dim() const { return dim_; }
  double cluster_tol() const { return cluster_tol_; }

  std::vector<int> multiplicities() const;
  /// Full eigenbasis, block bases concatenated in block order.
  ComplexMatrix eigenbasis() const;
  /// sum_l lambda_[l] P_l.
  ComplexMatrix reconstruct() const;

 private:
  BlockSpectrum(std::vector<SpectralBlock> blocks, Eigen::Index dim, double cluster_tol);

  std::vector<SpectralBlock> blocks_;
  Eigen::Index dim_ = 0;
  double cluster_tol_ = 0.0;
};

/// Single-linkage clustering of the spectrum with gap threshold cluster_tol.
/// Throws ClusteringError when a merged block has internal spread beyond
/// cluster_tol/2 (ill-separated spectrum).
BlockSpectrum spectral_blocks(const DensityMatrix& rho,
                              double cluster_tol = defaults::kClusterTol);

/// Indices of the blocks to preserve (K). The complement is implied.
struct BlockSelection {
  std::vector<Eigen::Index> indices;

  static BlockSelection all(const BlockSpectrum& spec);
  void validate(const BlockSpectrum& spec) const;
  bool contains(Eigen::Index block) const;
  Eigen::Index selected_dimension(const BlockSpectrum& spec) const;  // m_K
};

/// Orthogonal projector onto the selected eigenspaces, rank m_K.
HermitianOperator dfs_projector(const BlockSpectrum& spec, const BlockSelection& sel);

/// P rho P / Tr[P rho P]. Throws when the selected weight is below weight_tol.
DensityMatrix dfs_state(const DensityMatrix& rho, const BlockSpectrum& spec,
                        const BlockSelection& sel, double weight_tol = 1e-12);

/// Gauge-continuous orthonormal frames along a trajectory: frame(i) spans the
/// selected eigenspaces of rho(t_i) and completion(i) spans the complement;
/// [frame | completion] is unitary at every time.
class EigenframePath {
 public:
  EigenframePath(std::vector<double> times, std::vector<ComplexMatrix> frames,
                 std::vector<ComplexMatrix> completions);

  Eigen::Index size() const { return static_cast<Eigen::Index>(times_.size()); }
  Eigen::Index dim() const { return frames_.empty() ? 0 : frames_.front().rows(); }
  Eigen::Index frame_dim() const { return frames_.empty() ? 0 : frames_.front().cols(); }
  double time(Eigen::Index i) const { return times_.at(i); }
  const std::vector<double>& times() const { return times_; }
  const ComplexMatrix& frame(Eigen::Index i) const { return frames_.at(i); }
  const ComplexMatrix& completion(Eigen::Index i) const { return completions_.at(i); }
  ComplexMatrix full_unitary(Eigen::Index i) const;

 private:
  std::vector<double> times_;
  std::vector<ComplexMatrix> frames_;
  std::vector<ComplexMatrix> completions_;
};

/// Tracks the selected eigenspaces along the trajectory. Successive frames
/// are aligned per block by the orthogonal Procrustes solution (polar factor
/// of frame(t_k)^dagger raw_frame(t_{k+1})), which pins the otherwise
/// arbitrary intra-block gauge; the complement is aligned as a whole. Throws
/// BlockCrossingError when selected eigenvalues approach unselected ones
/// within cluster_tol or a selected multiplicity changes.
EigenframePath eigenframe_path(const Trajectory& traj, const BlockSelection& sel_at_t0,
                               double cluster_tol = defaults::kClusterTol);

/// Sub-dynamics generator i (dV/dt) V^dagger from the completed unitary path,
/// by second-order finite differences on the time grid. Only the selected
/// block of the result is gauge-insensitive. Throws IntegrationError when the
/// finite-difference result is non-Hermitian beyond fd_tol (step too coarse).
std::vector<HermitianOperator> dfs_hamiltonian(const EigenframePath& path,
                                               double fd_tol = defaults::kFiniteDiffTol);

/// || P rhodot P + i P [H, rho] P ||_F with rhodot from the model; zero
/// exactly when the selected sub-dynamics is compatible with unitary
/// evolution generated by H.
double consistency_residual(const LindbladModel& model, const DensityMatrix& rho,
                            const RealVector& u, const RealVector& gamma,
                            const HermitianOperator& h_dfs, const BlockSpectrum& spec,
                            const BlockSelection& sel);

struct CommonEigenspace {
  ComplexMatrix basis;       // n x k orthonormal columns
  ComplexVector eigenvalues; // one entry per jump operator
};

/// Maximal joint eigenspaces of a family of (not necessarily commuting)
/// operators, grouped by eigenvalue tuple. Empty when no common eigenvector
/// exists.
std::vector<CommonEigenspace> common_eigenvector_subspace(
    const std::vector<ComplexMatrix>& jumps, double tol = 1e-9);

struct PreservationOptions {
  double cluster_tol = defaults::kClusterTol;
  double preserve_tol = defaults::kPreserveTol;
};

/// Per-time record of tracked block eigenvalues and their drift from t = 0.
struct PreservationReport {
  std::vector<double> times;
  /// Tracked eigenvalue of every initial block, per time (block order of t=0).
  std::vector<RealVector> block_eigenvalues;
  /// |lambda_k(t) - lambda_k(0)| for the selected blocks, per time.
  std::vector<RealVector> deviations;
  /// Whether the unselected multiplicity multiset changed at each time.
  std::vector<bool> kbar_multiplicity_changed;
  /// Per-time flag: block matching was injective and multiplicity-consistent.
  std::vector<bool> tracking_ok;

  std::vector<Eigen::Index> selected;
  std::vector<int> initial_multiplicities;
  double max_deviation = 0.0;
  bool any_kbar_change = false;
  bool any_tracking_failure = false;
  bool df_compatible = false;
  double preserve_tol = 0.0;
};

PreservationReport eigenvalue_preservation_report(const Trajectory& traj,
                                                  const BlockSelection& sel_at_t0,
                                                  const PreservationOptions& options = {});

}  // namespace qdfm
