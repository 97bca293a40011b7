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

#include "qdfm/bloch_bilinear.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace qdfm {

const char* to_string(CoordinateMode mode) {
  switch (mode) {
    case CoordinateMode::kDiagGaps:
      return "diag-gaps";
    case CoordinateMode::kDiagGapsTrace:
      return "diag-gaps-trace";
    case CoordinateMode::kPauli:
      return "pauli";
  }
  return "unknown";
}

CoordinateMode coordinate_mode_from_string(const std::string& name) {
  if (name == "diag-gaps") {
    return CoordinateMode::kDiagGaps;
  }
  if (name == "diag-gaps-trace") {
    return CoordinateMode::kDiagGapsTrace;
  }
  if (name == "pauli") {
    return CoordinateMode::kPauli;
  }
  throw ParseError("unknown coordinate mode '" + name + "'");
}

namespace {

bool is_power_of_two(Eigen::Index n) {
  return n >= 1 && (n & (n - 1)) == 0;
}

int log2_exact(Eigen::Index n) {
  int q = 0;
  while ((Eigen::Index{1} << q) < n) {
    ++q;
  }
  return q;
}

void require_pauli_compatible(Eigen::Index n) {
  if (!is_power_of_two(n) || n < 2) {
    std::ostringstream os;
    os << "pauli coordinates require the dimension to be a power of two, got " << n;
    throw DimensionError(os.str());
  }
}

}  // namespace

Eigen::Index coordinate_dimension(CoordinateMode mode, Eigen::Index n) {
  if (n < 2) {
    throw DimensionError("coordinate_dimension: n must be >= 2");
  }
  switch (mode) {
    case CoordinateMode::kDiagGaps:
      return n * n - 1;
    case CoordinateMode::kDiagGapsTrace:
      return n * n;
    case CoordinateMode::kPauli:
      require_pauli_compatible(n);
      return n * n;
  }
  throw Error("coordinate_dimension: bad mode");
}

Eigen::Index system_dimension(CoordinateMode mode, Eigen::Index coord_len) {
  for (Eigen::Index n = 2; n * n <= coord_len + 1; ++n) {
    if (mode == CoordinateMode::kPauli && !is_power_of_two(n)) {
      continue;
    }
    if (coordinate_dimension(mode, n) == coord_len) {
      return n;
    }
  }
  std::ostringstream os;
  os << "coordinate vector length " << coord_len << " does not match mode " << to_string(mode);
  throw DimensionError(os.str());
}

RealVector coherence_map(const ComplexMatrix& rho, CoordinateMode mode) {
  if (rho.rows() != rho.cols()) {
    throw DimensionError("coherence_map: matrix is not square");
  }
  const Eigen::Index n = rho.rows();
  const double defect = hermiticity_defect(rho);
  if (defect > 1e-8 * std::max(1.0, max_abs(rho))) {
    std::ostringstream os;
    os << "coherence_map: input not Hermitian (defect " << defect << ")";
    throw InvariantViolation(os.str());
  }
  const Eigen::Index len = coordinate_dimension(mode, n);
  RealVector x(len);

  if (mode == CoordinateMode::kPauli) {
    const auto basis = pauli_product_basis(log2_exact(n));
    for (Eigen::Index k = 0; k < len; ++k) {
      x(k) = (rho * basis[static_cast<std::size_t>(k)].matrix()).trace().real();
    }
    return x;
  }

  Eigen::Index pos = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    x(pos++) = (rho(0, 0) - rho(i, i)).real();
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      x(pos++) = (rho(i, j) + rho(j, i)).real();
    }
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      x(pos++) = (Complex(0, 1) * (rho(i, j) - rho(j, i))).real();
    }
  }
  if (mode == CoordinateMode::kDiagGapsTrace) {
    x(pos++) = rho.trace().real();
  }
  return x;
}

RealVector coherence_map(const HermitianOperator& rho, CoordinateMode mode) {
  return coherence_map(rho.matrix(), mode);
}

ComplexMatrix inverse_coherence_map(const RealVector& x, CoordinateMode mode, double trace_hint) {
  const Eigen::Index n = system_dimension(mode, x.size());

  if (mode == CoordinateMode::kPauli) {
    const auto basis = pauli_product_basis(log2_exact(n));
    ComplexMatrix rho = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      rho += x(k) * basis[static_cast<std::size_t>(k)].matrix();
    }
    return rho / static_cast<double>(n);
  }

  const double trace = (mode == CoordinateMode::kDiagGapsTrace) ? x(x.size() - 1) : trace_hint;
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  double gap_sum = 0.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    gap_sum += x(i - 1);
  }
  const double rho00 = (trace + gap_sum) / static_cast<double>(n);
  rho(0, 0) = rho00;
  for (Eigen::Index i = 1; i < n; ++i) {
    rho(i, i) = rho00 - x(i - 1);
  }
  const Eigen::Index pair_count = n * (n - 1) / 2;
  Eigen::Index pos = n - 1;
  Eigen::Index pair = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double s = x(pos + pair);
      const double t = x(pos + pair_count + pair);
      rho(i, j) = 0.5 * Complex(s, -t);
      rho(j, i) = 0.5 * Complex(s, t);
      ++pair;
    }
  }
  return rho;
}

BilinearModel::BilinearModel(CoordinateMode mode, Eigen::Index system_dim, RealMatrix drift,
                             std::vector<RealMatrix> controls, std::vector<RealMatrix> dissipators,
                             std::vector<std::string> control_labels,
                             std::vector<std::string> jump_labels)
    : mode_(mode),
      system_dim_(system_dim),
      drift_(std::move(drift)),
      controls_(std::move(controls)),
      dissipators_(std::move(dissipators)),
      control_labels_(std::move(control_labels)),
      jump_labels_(std::move(jump_labels)) {
  const Eigen::Index len = drift_.rows();
  if (drift_.cols() != len || !all_finite(drift_)) {
    throw InvariantViolation("BilinearModel: bad drift matrix");
  }
  auto check = [&](const std::vector<RealMatrix>& mats, const char* who) {
    for (const auto& m : mats) {
      if (m.rows() != len || m.cols() != len || !all_finite(m)) {
        throw InvariantViolation(std::string("BilinearModel: bad ") + who + " matrix");
      }
    }
  };
  check(controls_, "control");
  check(dissipators_, "dissipator");
  if (controls_.size() != control_labels_.size() || dissipators_.size() != jump_labels_.size()) {
    throw InvariantViolation("BilinearModel: label count mismatch");
  }
}

namespace {

ComplexMatrix dissipator_matrix(const ComplexMatrix& jump, const ComplexMatrix& rho) {
  const ComplexMatrix fdag = jump.adjoint();
  return 0.5 * (commutator(jump, rho * fdag) + commutator(jump * rho, fdag));
}

}  // namespace

BilinearModel build_bilinear(const LindbladModel& model, CoordinateMode mode) {
  const Eigen::Index n = model.dim();
  const Eigen::Index len = coordinate_dimension(mode, n);
  const double dual_trace = 0.0;  // kDiagGaps dual basis uses traceless representatives

  std::vector<ComplexMatrix> duals;
  duals.reserve(static_cast<std::size_t>(len));
  for (Eigen::Index k = 0; k < len; ++k) {
    RealVector e = RealVector::Zero(len);
    e(k) = 1.0;
    duals.push_back(inverse_coherence_map(e, mode, dual_trace));
  }

  auto matrix_of = [&](auto&& superop, const std::string& label) {
    RealMatrix m(len, len);
    for (Eigen::Index k = 0; k < len; ++k) {
      m.col(k) = coherence_map(superop(duals[static_cast<std::size_t>(k)]), mode);
    }
    if (mode == CoordinateMode::kDiagGaps) {
      // The identity direction is invisible to these coordinates; the map is
      // exact only if the superoperator sends it to a multiple of itself.
      const ComplexMatrix image = superop(ComplexMatrix::Identity(n, n).eval());
      const RealVector leak = coherence_map(image, mode);
      if (leak.cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, max_abs(image))) {
        throw InvariantViolation("build_bilinear: '" + label +
                                 "' does not preserve the identity direction; trace-free "
                                 "coordinates cannot represent it exactly");
      }
    }
    return m;
  };

  const ComplexMatrix h0 = model.h0().matrix();
  RealMatrix drift = matrix_of(
      [&](const ComplexMatrix& rho) { return (Complex(0, -1) * commutator(h0, rho)).eval(); },
      "drift");

  std::vector<RealMatrix> controls;
  std::vector<std::string> control_labels;
  for (const auto& c : model.controls()) {
    const ComplexMatrix h = c.hamiltonian.matrix();
    controls.push_back(matrix_of(
        [&](const ComplexMatrix& rho) { return (Complex(0, -1) * commutator(h, rho)).eval(); },
        c.label));
    control_labels.push_back(c.label);
  }

  std::vector<RealMatrix> dissipators;
  std::vector<std::string> jump_labels;
  for (const auto& j : model.jumps()) {
    dissipators.push_back(matrix_of(
        [&](const ComplexMatrix& rho) { return dissipator_matrix(j.op, rho); }, j.label));
    jump_labels.push_back(j.label);
  }

  return BilinearModel(mode, n, std::move(drift), std::move(controls), std::move(dissipators),
                       std::move(control_labels), std::move(jump_labels));
}

RealVector bilinear_rhs(const BilinearModel& bm, const RealVector& x, const RealVector& u,
                        const RealVector& gamma) {
  if (x.size() != bm.coord_dim()) {
    throw DimensionError("bilinear_rhs: state length mismatch");
  }
  if (u.size() != static_cast<Eigen::Index>(bm.controls().size())) {
    throw DimensionError("bilinear_rhs: control length mismatch");
  }
  if (gamma.size() != static_cast<Eigen::Index>(bm.dissipators().size())) {
    throw DimensionError("bilinear_rhs: rate length mismatch");
  }
  RealVector out = bm.drift() * x;
  for (Eigen::Index a = 0; a < u.size(); ++a) {
    out += u(a) * (bm.controls()[static_cast<std::size_t>(a)] * x);
  }
  for (Eigen::Index a = 0; a < gamma.size(); ++a) {
    out += gamma(a) * (bm.dissipators()[static_cast<std::size_t>(a)] * x);
  }
  return out;
}

std::vector<RealVector> bilinear_propagate(const BilinearModel& bm, const RealVector& x0,
                                           const RealVector& u, const RealVector& gamma,
                                           const std::vector<double>& t_grid, double max_step) {
  if (t_grid.size() < 2) {
    throw InvariantViolation("bilinear_propagate: time grid needs at least two points");
  }
  RealVector x = x0;
  std::vector<RealVector> out{x};
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    const double len = t_grid[k + 1] - t_grid[k];
    if (len <= 0.0) {
      throw InvariantViolation("bilinear_propagate: time grid must be strictly increasing");
    }
    const int substeps = std::max(1, static_cast<int>(std::ceil(len / max_step - 1e-12)));
    const double h = len / substeps;
    for (int s = 0; s < substeps; ++s) {
      const RealVector k1 = bilinear_rhs(bm, x, u, gamma);
      const RealVector k2 = bilinear_rhs(bm, x + 0.5 * h * k1, u, gamma);
      const RealVector k3 = bilinear_rhs(bm, x + 0.5 * h * k2, u, gamma);
      const RealVector k4 = bilinear_rhs(bm, x + h * k3, u, gamma);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.push_back(x);
  }
  return out;
}

RealMatrix coordinate_change(CoordinateMode from, CoordinateMode to, Eigen::Index n) {
  if (from == CoordinateMode::kDiagGaps || to == CoordinateMode::kDiagGaps) {
    throw InvariantViolation(
        "coordinate_change: only the full-rank coordinate modes are convertible");
  }
  const Eigen::Index len = coordinate_dimension(from, n);
  RealMatrix t(len, len);
  for (Eigen::Index k = 0; k < len; ++k) {
    RealVector e = RealVector::Zero(len);
    e(k) = 1.0;
    t.col(k) = coherence_map(inverse_coherence_map(e, from), to);
  }
  return t;
}

}  // namespace qdfm
