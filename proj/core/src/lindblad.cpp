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

#include "qdfm/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>

namespace qdfm {

PiecewiseConstantSignal::PiecewiseConstantSignal(std::vector<double> times,
                                                 std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty() || times_.size() != values_.size()) {
    throw InvariantViolation("PiecewiseConstantSignal: times and values must match and be nonempty");
  }
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    if (!(times_[i] < times_[i + 1])) {
      throw InvariantViolation("PiecewiseConstantSignal: grid must be strictly increasing");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw InvariantViolation("PiecewiseConstantSignal: non-finite value");
    }
  }
}

PiecewiseConstantSignal PiecewiseConstantSignal::constant(double value) {
  return PiecewiseConstantSignal({0.0}, {value});
}

double PiecewiseConstantSignal::value(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) {
    return values_.front();
  }
  return values_[static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1];
}

bool PiecewiseConstantSignal::nonnegative() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

ControlSchedule::ControlSchedule(std::vector<PiecewiseConstantSignal> signals)
    : signals_(std::move(signals)) {}

ControlSchedule ControlSchedule::constant(const RealVector& u) {
  std::vector<PiecewiseConstantSignal> signals;
  signals.reserve(static_cast<std::size_t>(u.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    signals.push_back(PiecewiseConstantSignal::constant(u(i)));
  }
  return ControlSchedule(std::move(signals));
}

RealVector ControlSchedule::values(double t, Eigen::Index num_controls) const {
  if (signals_.empty()) {
    return RealVector::Zero(num_controls);
  }
  if (size() != num_controls) {
    std::ostringstream os;
    os << "ControlSchedule: " << signals_.size() << " signals for " << num_controls
       << " controls";
    throw DimensionError(os.str());
  }
  RealVector u(num_controls);
  for (Eigen::Index i = 0; i < num_controls; ++i) {
    u(i) = signals_[static_cast<std::size_t>(i)].value(t);
  }
  return u;
}

LindbladModel::LindbladModel(HermitianOperator h0, std::vector<ControlTerm> controls,
                             std::vector<JumpTerm> jumps)
    : h0_(std::move(h0)), controls_(std::move(controls)), jumps_(std::move(jumps)) {
  const Eigen::Index n = h0_.dim();
  for (const auto& c : controls_) {
    if (c.hamiltonian.dim() != n) {
      throw DimensionError("LindbladModel: control '" + c.label + "' dimension mismatch");
    }
  }
  for (const auto& j : jumps_) {
    if (j.op.rows() != n || j.op.cols() != n) {
      throw DimensionError("LindbladModel: jump '" + j.label + "' dimension mismatch");
    }
    if (!all_finite(j.op)) {
      throw InvariantViolation("LindbladModel: jump '" + j.label + "' has non-finite entries");
    }
    if (!j.rate.nonnegative()) {
      throw InvariantViolation("LindbladModel: jump '" + j.label + "' has a negative rate sample");
    }
  }
}

RealVector LindbladModel::rates(double t) const {
  RealVector g(num_jumps());
  for (Eigen::Index i = 0; i < num_jumps(); ++i) {
    g(i) = jumps_[static_cast<std::size_t>(i)].rate.value(t);
  }
  return g;
}

std::vector<HermitianOperator> pauli_product_basis(int num_qubits) {
  if (num_qubits < 1) {
    throw DimensionError("pauli_product_basis: num_qubits must be >= 1");
  }
  ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  ComplexMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  sz << 1, 0, 0, -1;
  const ComplexMatrix single[4] = {id, sx, sy, sz};

  const std::size_t count = std::size_t{1} << (2 * num_qubits);
  std::vector<HermitianOperator> basis;
  basis.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    ComplexMatrix m = ComplexMatrix::Identity(1, 1);
    // Base-4 digits, most significant digit = first (leftmost) tensor factor.
    for (int q = num_qubits - 1; q >= 0; --q) {
      const std::size_t digit = (k >> (2 * q)) & 3u;
      m = Eigen::kroneckerProduct(m, single[digit]).eval();
    }
    basis.emplace_back(std::move(m));
  }
  return basis;
}

namespace {

ComplexMatrix lindbladian_matrix(const ComplexMatrix& jump, const ComplexMatrix& rho) {
  if (jump.rows() != jump.cols() || jump.rows() != rho.rows() || rho.rows() != rho.cols()) {
    throw DimensionError("lindbladian_apply: dimension mismatch");
  }
  const ComplexMatrix fdag = jump.adjoint();
  return 0.5 * (commutator(jump, rho * fdag) + commutator(jump * rho, fdag));
}

}  // namespace

HermitianOperator lindbladian_apply(const ComplexMatrix& jump, const HermitianOperator& rho) {
  return HermitianOperator::symmetrized(lindbladian_matrix(jump, rho.matrix()), 1e-10);
}

ComplexMatrix lindblad_rhs_matrix(const LindbladModel& model, const ComplexMatrix& rho,
                                  const RealVector& u, const RealVector& gamma) {
  if (rho.rows() != model.dim() || rho.cols() != model.dim()) {
    throw DimensionError("lindblad_rhs: state dimension mismatch");
  }
  if (u.size() != model.num_controls()) {
    throw DimensionError("lindblad_rhs: control vector length mismatch");
  }
  if (gamma.size() != model.num_jumps()) {
    throw DimensionError("lindblad_rhs: rate vector length mismatch");
  }
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    if (gamma(i) < 0.0) {
      throw InvariantViolation("lindblad_rhs: negative rate");
    }
  }
  ComplexMatrix h = model.h0().matrix();
  for (Eigen::Index i = 0; i < model.num_controls(); ++i) {
    h += u(i) * model.controls()[static_cast<std::size_t>(i)].hamiltonian.matrix();
  }
  ComplexMatrix out = Complex(0, -1) * commutator(h, rho);
  for (Eigen::Index i = 0; i < model.num_jumps(); ++i) {
    if (gamma(i) != 0.0) {
      out += gamma(i) * lindbladian_matrix(model.jumps()[static_cast<std::size_t>(i)].op, rho);
    }
  }
  return out;
}

HermitianOperator lindblad_rhs(const LindbladModel& model, const DensityMatrix& rho,
                               const RealVector& u, const RealVector& gamma) {
  return HermitianOperator::symmetrized(lindblad_rhs_matrix(model, rho.matrix(), u, gamma), 1e-10);
}

Trajectory::Trajectory(std::vector<double> times, std::vector<ComplexMatrix> states,
                       std::vector<RealVector> controls, std::vector<RealVector> rates,
                       std::vector<std::string> violations, double max_trace_error,
                       double worst_min_eigenvalue, double max_hermiticity_defect)
    : times_(std::move(times)),
      states_(std::move(states)),
      controls_(std::move(controls)),
      rates_(std::move(rates)),
      violations_(std::move(violations)),
      max_trace_error_(max_trace_error),
      worst_min_eigenvalue_(worst_min_eigenvalue),
      max_hermiticity_defect_(max_hermiticity_defect) {
  if (times_.size() != states_.size() || times_.size() != controls_.size() ||
      times_.size() != rates_.size()) {
    throw InvariantViolation("Trajectory: inconsistent sample counts");
  }
}

namespace {

struct SegmentBounds {
  std::vector<double> cuts;
};

// Breakpoints of every signal that fall strictly inside (a, b).
std::vector<double> interior_breakpoints(const LindbladModel& model,
                                         const ControlSchedule& schedule, double a, double b) {
  std::set<double> cuts;
  auto collect = [&](const std::vector<double>& ts) {
    for (double t : ts) {
      if (t > a && t < b) {
        cuts.insert(t);
      }
    }
  };
  for (const auto& j : model.jumps()) {
    collect(j.rate.times());
  }
  for (const auto& s : schedule.signals()) {
    collect(s.times());
  }
  return {cuts.begin(), cuts.end()};
}

}  // namespace

Trajectory propagate(const LindbladModel& model, const DensityMatrix& rho0,
                     const ControlSchedule& schedule, const std::vector<double>& t_grid,
                     const PropagateOptions& options) {
  if (t_grid.size() < 2) {
    throw InvariantViolation("propagate: time grid needs at least two points");
  }
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    if (!(t_grid[i] < t_grid[i + 1])) {
      throw InvariantViolation("propagate: time grid must be strictly increasing");
    }
  }
  if (rho0.dim() != model.dim()) {
    throw DimensionError("propagate: initial state dimension mismatch");
  }
  if (options.max_step <= 0.0) {
    throw InvariantViolation("propagate: max_step must be positive");
  }
  if (!schedule.empty() && schedule.size() != model.num_controls()) {
    throw DimensionError("propagate: schedule size does not match control count");
  }

  std::vector<double> times;
  std::vector<ComplexMatrix> states;
  std::vector<RealVector> controls;
  std::vector<RealVector> rates;
  std::vector<std::string> violations;
  double max_trace_error = 0.0;
  double worst_min_eig = 1.0;
  double max_herm_defect = 0.0;

  auto record = [&](double t, const ComplexMatrix& rho) {
    const double trace_err =
        std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
    const double herm = hermiticity_defect(rho);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (rho + rho.adjoint().eval()),
                                                    Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    max_trace_error = std::max(max_trace_error, trace_err);
    worst_min_eig = std::min(worst_min_eig, min_eig);
    max_herm_defect = std::max(max_herm_defect, herm);

    if (trace_err > options.hard_tol || min_eig < -options.hard_tol ||
        herm > options.hard_tol) {
      std::ostringstream os;
      os << "propagate: invariant violation beyond hard tolerance at t = " << t
         << " (trace error " << trace_err << ", min eigenvalue " << min_eig
         << ", hermiticity defect " << herm << "); integration step too large";
      throw IntegrationError(os.str());
    }
    std::ostringstream why;
    if (trace_err > options.trace_tol) {
      why << "trace error " << trace_err << "; ";
    }
    if (min_eig < -options.psd_tol) {
      why << "min eigenvalue " << min_eig << "; ";
    }
    if (herm > options.hermiticity_tol) {
      why << "hermiticity defect " << herm << "; ";
    }
    if (!why.str().empty()) {
      std::ostringstream os;
      os << "t = " << t << ": " << why.str();
      violations.push_back(os.str());
    }
    times.push_back(t);
    states.push_back(rho);
    controls.push_back(schedule.values(t, model.num_controls()));
    rates.push_back(model.rates(t));
  };

  ComplexMatrix rho = rho0.matrix();
  record(t_grid.front(), rho);

  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    const double a = t_grid[k];
    const double b = t_grid[k + 1];
    std::vector<double> cuts = interior_breakpoints(model, schedule, a, b);
    cuts.insert(cuts.begin(), a);
    cuts.push_back(b);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double seg_a = cuts[s];
      const double seg_b = cuts[s + 1];
      const double len = seg_b - seg_a;
      const int substeps = std::max(1, static_cast<int>(std::ceil(len / options.max_step - 1e-12)));
      const double h = len / substeps;
      // Signals are constant within the segment; sample once at its start.
      const RealVector u = schedule.values(seg_a, model.num_controls());
      const RealVector g = model.rates(seg_a);
      for (int step = 0; step < substeps; ++step) {
        const ComplexMatrix k1 = lindblad_rhs_matrix(model, rho, u, g);
        const ComplexMatrix k2 = lindblad_rhs_matrix(model, rho + 0.5 * h * k1, u, g);
        const ComplexMatrix k3 = lindblad_rhs_matrix(model, rho + 0.5 * h * k2, u, g);
        const ComplexMatrix k4 = lindblad_rhs_matrix(model, rho + h * k3, u, g);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    record(b, rho);
  }

  return Trajectory(std::move(times), std::move(states), std::move(controls), std::move(rates),
                    std::move(violations), max_trace_error, worst_min_eig, max_herm_defect);
}

}  // namespace qdfm
