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
#include <vector>

#include "qdfm/lindblad.hpp"
#include "qdfm/types.hpp"

namespace qdfm {

/// Real coordinates for Hermitian matrices.
///
/// kDiagGaps (n^2 - 1 components): rho_11 - rho_ii for i = 2..n, then
/// rho_ij + rho_ji for i > j in row-major order, then i(rho_ij - rho_ji) in
/// the same order. Injective on trace-1 Hermitian matrices only.
///
/// kDiagGapsTrace (n^2): the same list with Tr[rho] appended last; a linear
/// bijection on Hermitian matrices.
///
/// kPauli (n^2, n a power of two): x_k = Tr[rho s_k] over the Pauli product
/// basis, identity first; also a bijection.
enum class CoordinateMode { kDiagGaps, kDiagGapsTrace, kPauli };

const char* to_string(CoordinateMode mode);
CoordinateMode coordinate_mode_from_string(const std::string& name);

Eigen::Index coordinate_dimension(CoordinateMode mode, Eigen::Index n);

/// System dimension n recovered from a coordinate vector length.
Eigen::Index system_dimension(CoordinateMode mode, Eigen::Index coord_len);

RealVector coherence_map(const ComplexMatrix& rho, CoordinateMode mode);
RealVector coherence_map(const HermitianOperator& rho, CoordinateMode mode);

/// Unique Hermitian rho with coherence_map(rho) = x. kDiagGaps does not carry
/// the trace, which is supplied by trace_hint; the other modes ignore it.
ComplexMatrix inverse_coherence_map(const RealVector& x, CoordinateMode mode,
                                    double trace_hint = 1.0);

/// Matrices of the equation-of-motion superoperators in the chosen real
/// coordinates: drift() is the matrix of rho -> -i[H0, rho], controls()[a] of
/// rho -> -i[H_a, rho], dissipators()[a] of rho -> L_a(rho).
class BilinearModel {
 public:
  BilinearModel(CoordinateMode mode, Eigen::Index system_dim, RealMatrix drift,
                std::vector<RealMatrix> controls, std::vector<RealMatrix> dissipators,
                std::vector<std::string> control_labels, std::vector<std::string> jump_labels);

  CoordinateMode mode() const { return mode_; }
  Eigen::Index coord_dim() const { return drift_.rows(); }
  Eigen::Index system_dim() const { return system_dim_; }
  const RealMatrix& drift() const { return drift_; }
  const std::vector<RealMatrix>& controls() const { return controls_; }
  const std::vector<RealMatrix>& dissipators() const { return dissipators_; }
  const std::vector<std::string>& control_labels() const { return control_labels_; }
  const std::vector<std::string>& jump_labels() const { return jump_labels_; }

 private:
  CoordinateMode mode_;
  Eigen::Index system_dim_;
  RealMatrix drift_;
  std::vector<RealMatrix> controls_;
  std::vector<RealMatrix> dissipators_;
  std::vector<std::string> control_labels_;
  std::vector<std::string> jump_labels_;
};

/// Columns are the coordinate images of each superoperator applied to the
/// basis matrix dual to the respective coordinate. Throws when the mode
/// cannot represent the model exactly (kPauli with n not a power of two;
/// kDiagGaps with a channel that does not preserve the identity direction).
BilinearModel build_bilinear(const LindbladModel& model, CoordinateMode mode);

/// A x + sum_a u_a (B_a x) + sum_a gamma_a (G_a x).
RealVector bilinear_rhs(const BilinearModel& bm, const RealVector& x, const RealVector& u,
                        const RealVector& gamma);

/// Fixed-step RK4 for the coordinate equation of motion with constant knobs.
std::vector<RealVector> bilinear_propagate(const BilinearModel& bm, const RealVector& x0,
                                           const RealVector& u, const RealVector& gamma,
                                           const std::vector<double>& t_grid,
                                           double max_step = defaults::kMaxStep);

/// Invertible T with x_to = T x_from, defined for the two full-rank modes.
RealMatrix coordinate_change(CoordinateMode from, CoordinateMode to, Eigen::Index n);

}  // namespace qdfm
