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

#include "qdfm/types.hpp"

namespace qdfm {

/// Right-continuous step function: values()[i] holds on [times()[i], times()[i+1]),
/// the first value before times().front(), the last value from times().back() on.
class PiecewiseConstantSignal {
 public:
  PiecewiseConstantSignal(std::vector<double> times, std::vector<double> values);
  static PiecewiseConstantSignal constant(double value);

  double value(double t) const;
  bool nonnegative() const;
  bool is_constant() const { return values_.size() == 1; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

/// One piecewise-constant signal per control knob. An empty schedule means
/// all controls are held at zero.
class ControlSchedule {
 public:
  ControlSchedule() = default;
  explicit ControlSchedule(std::vector<PiecewiseConstantSignal> signals);
  static ControlSchedule constant(const RealVector& u);

  bool empty() const { return signals_.empty(); }
  Eigen::Index size() const { return static_cast<Eigen::Index>(signals_.size()); }
  RealVector values(double t, Eigen::Index num_controls) const;
  const std::vector<PiecewiseConstantSignal>& signals() const { return signals_; }

 private:
  std::vector<PiecewiseConstantSignal> signals_;
};

struct ControlTerm {
  std::string label;
  HermitianOperator hamiltonian;
};

struct JumpTerm {
  std::string label;
  ComplexMatrix op;
  PiecewiseConstantSignal rate;
};

/// Open-system model: drift Hamiltonian, control Hamiltonians with real
/// knobs, and jump operators with nonnegative rate signals.
class LindbladModel {
 public:
  LindbladModel(HermitianOperator h0, std::vector<ControlTerm> controls,
                std::vector<JumpTerm> jumps);

  Eigen::Index dim() const { return h0_.dim(); }
  const HermitianOperator& h0() const { return h0_; }
  const std::vector<ControlTerm>& controls() const { return controls_; }
  const std::vector<JumpTerm>& jumps() const { return jumps_; }
  Eigen::Index num_controls() const { return static_cast<Eigen::Index>(controls_.size()); }
  Eigen::Index num_jumps() const { return static_cast<Eigen::Index>(jumps_.size()); }

  RealVector rates(double t) const;

 private:
  HermitianOperator h0_;
  std::vector<ControlTerm> controls_;
  std::vector<JumpTerm> jumps_;
};

/// The 4^q Hermitian tensor products of {I, sx, sy, sz}, identity first,
/// with the leftmost factor acting on qubit 1. Tr[s_i s_j] = n delta_ij.
std::vector<HermitianOperator> pauli_product_basis(int num_qubits);

/// Dissipator of a single jump operator:
/// L(rho) = (1/2)([F, rho F^dagger] + [F rho, F^dagger]).
HermitianOperator lindbladian_apply(const ComplexMatrix& jump, const HermitianOperator& rho);

/// Full equation-of-motion right-hand side
/// -i[H0 + sum_a u_a H_a, rho] + sum_a gamma_a L_a(rho).
HermitianOperator lindblad_rhs(const LindbladModel& model, const DensityMatrix& rho,
                               const RealVector& u, const RealVector& gamma);

/// Same, without density-matrix validation of the state (used on integrator
/// stage values, which are not densities).
ComplexMatrix lindblad_rhs_matrix(const LindbladModel& model, const ComplexMatrix& rho,
                                  const RealVector& u, const RealVector& gamma);

struct PropagateOptions {
  double max_step = defaults::kMaxStep;
  double hermiticity_tol = defaults::kHermiticityTol;
  double trace_tol = defaults::kTraceTol;
  double psd_tol = defaults::kPsdTol;
  /// Abort threshold: trace error or negative-eigenvalue magnitude beyond
  /// this raises IntegrationError instead of a report entry.
  double hard_tol = defaults::kHardTol;
};

/// States of one integrated trajectory, with the control/rate samples used
/// and a report of invariant violations (violations are reported, never
/// silently repaired).
class Trajectory {
 public:
  Trajectory(std::vector<double> times, std::vector<ComplexMatrix> states,
             std::vector<RealVector> controls, std::vector<RealVector> rates,
             std::vector<std::string> violations, double max_trace_error,
             double worst_min_eigenvalue, double max_hermiticity_defect);

  Eigen::Index size() const { return static_cast<Eigen::Index>(times_.size()); }
  Eigen::Index dim() const { return states_.empty() ? 0 : states_.front().rows(); }
  double time(Eigen::Index i) const { return times_.at(i); }
  const std::vector<double>& times() const { return times_; }
  const ComplexMatrix& state(Eigen::Index i) const { return states_.at(i); }
  const std::vector<ComplexMatrix>& states() const { return states_; }
  const RealVector& controls_at(Eigen::Index i) const { return controls_.at(i); }
  const RealVector& rates_at(Eigen::Index i) const { return rates_.at(i); }

  const std::vector<std::string>& invariant_violations() const { return violations_; }
  double max_trace_error() const { return max_trace_error_; }
  double worst_min_eigenvalue() const { return worst_min_eigenvalue_; }
  double max_hermiticity_defect() const { return max_hermiticity_defect_; }

 private:
  std::vector<double> times_;
  std::vector<ComplexMatrix> states_;
  std::vector<RealVector> controls_;
  std::vector<RealVector> rates_;
  std::vector<std::string> violations_;
  double max_trace_error_ = 0.0;
  double worst_min_eigenvalue_ = 0.0;
  double max_hermiticity_defect_ = 0.0;
};

/// Fixed-step classical RK4 between the requested output times. Substeps are
/// capped at options.max_step and split at control/rate breakpoints so each
/// RK4 step sees constant coefficients.
Trajectory propagate(const LindbladModel& model, const DensityMatrix& rho0,
                     const ControlSchedule& schedule, const std::vector<double>& t_grid,
                     const PropagateOptions& options = {});

}  // namespace qdfm
