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

#include <string>
#include <utility>
#include <vector>

#include "qdfm/bloch_bilinear.hpp"
#include "qdfm/dfm_geometry.hpp"
#include "qdfm/types.hpp"

namespace qdfm {

/// Real-linear span of N x N real matrices with tolerance-based rank
/// bookkeeping. Matrices are vectorized to length-N^2 vectors; membership and
/// rank decisions use rank_tol relative to the largest basis Frobenius norm,
/// with acceptance confirmed by an SVD of the stacked basis.
class MatrixSpan {
 public:
  explicit MatrixSpan(Eigen::Index ambient_dim, double rank_tol = defaults::kRankTol);

  Eigen::Index ambient_dim() const { return ambient_; }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(basis_.size()); }
  double rank_tol() const { return rank_tol_; }
  const std::vector<RealMatrix>& basis() const { return basis_; }

  /// Residual of candidate minus its orthogonal projection onto the span
  /// (Frobenius inner product), and the residual norm.
  std::pair<RealMatrix, double> reduce(const RealMatrix& candidate) const;

  bool contains(const RealMatrix& candidate) const;

  /// Adds candidate if it is independent of the span; returns whether the
  /// span grew.
  bool add(const RealMatrix& candidate);

  /// Smallest singular value of the stacked vectorized basis (0 when empty).
  double smallest_singular_value() const;

  /// Absolute tolerance used for a candidate of the given norm.
  double membership_threshold(double candidate_norm) const;

 private:
  Eigen::Index ambient_ = 0;
  double rank_tol_ = defaults::kRankTol;
  double max_norm_ = 0.0;
  std::vector<RealMatrix> basis_;
  RealMatrix ortho_;  // N^2 x k orthonormal columns spanning vec(basis)
};

std::pair<RealMatrix, double> span_reduce(const RealMatrix& candidate, const MatrixSpan& span);

struct Degree0Result {
  struct JointEigenspace {
    RealMatrix basis;          // N x k orthonormal columns
    RealVector eigenvalues;    // one per input matrix
  };
  std::vector<JointEigenspace> spaces;
  bool full_space = false;

  bool empty() const { return spaces.empty(); }
  Eigen::Index total_dimension() const;
};

/// Common real eigenvectors of the drift matrix and every control matrix,
/// found by intersecting real eigenspaces. full_space is set when every
/// direction qualifies.
Degree0Result degree0_check(const RealMatrix& drift, const std::vector<RealMatrix>& controls,
                            double tol = 1e-9);

struct ClosureOptions {
  double rank_tol = defaults::kRankTol;
  int max_iterations = 64;
  /// Expansion hook: only degree-1 (linear) generators are implemented.
  int expansion_degree = 1;
};

/// Which dissipation-rate model the closure runs under: independent rates
/// seed one generator per channel; constant known rates fold the dissipators
/// into the drift and seed their rate-weighted sum.
struct RateVariant {
  static RateVariant stochastic();
  static RateVariant constant(RealVector rates);

  bool is_stochastic = true;
  RealVector rates;
};

struct ClosureReport {
  MatrixSpan span;
  int iterations = 0;
  bool stabilized = false;

  struct Added {
    int iteration = 0;
    std::string provenance;
    double residual_norm = 0.0;
  };
  std::vector<Added> added;
  std::vector<std::string> reduction_log;
  std::vector<std::string> warnings;

  Eigen::Index dimension() const { return span.dimension(); }
};

/// Smallest span of linear vector fields containing the seeds and closed
/// under brackets with the drift and control fields modulo the control
/// directions. Candidate brackets are tested against span(S ∪ controls); a
/// new generator stores the component orthogonal to both, so the result
/// stays control-free except for the seed directions themselves.
ClosureReport close_distribution(const RealMatrix& drift, const std::vector<RealMatrix>& controls,
                                 const std::vector<std::string>& control_labels,
                                 const std::vector<std::pair<std::string, RealMatrix>>& seeds,
                                 const ClosureOptions& options = {});

/// Bracket closure of the model's dissipation directions under the chosen
/// rate variant.
ClosureReport reachability_distribution(const BilinearModel& bm, const RateVariant& variant,
                                        const ClosureOptions& options = {});

struct PointwiseDistribution {
  std::vector<RealVector> vectors;  // {V_i x0}
  Eigen::Index dimension = 0;       // rank of the stacked vectors
};

PointwiseDistribution evaluate_distribution(const MatrixSpan& span, const RealVector& x0);

struct ContainmentOptions {
  double rank_tol = defaults::kRankTol;
  double cluster_tol = defaults::kClusterTol;
  /// When set, the base point's block structure is validated against it.
  const DfmSpec* expected = nullptr;
};

struct ContainmentReport {
  bool contained = false;
  Eigen::Index tangent_dimension = 0;
  Eigen::Index pointwise_dimension = 0;
  Eigen::Index intersection_dimension = 0;
  RealVector principal_angles;         // radians, ascending
  std::vector<double> residual_norms;  // distribution vectors vs tangent span
};

/// Compares the distribution evaluated at x0 with the manifold tangent
/// directions mapped into the same coordinates: containment, intersection
/// dimension and principal angles.
ContainmentReport tangent_containment(const MatrixSpan& span, const RealVector& x0,
                                      const std::vector<HermitianOperator>& dfm_tangent,
                                      CoordinateMode mode, const ContainmentOptions& options = {});

}  // namespace qdfm
