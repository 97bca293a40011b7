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

#include "qdfm/types.hpp"

#include <cmath>
#include <sstream>

namespace qdfm {

bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

bool all_finite(const RealMatrix& m) {
  return m.allFinite();
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("hermiticity_defect: matrix is not square");
  }
  return max_abs(m - m.adjoint().eval());
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    std::ostringstream os;
    os << "commutator: dimension mismatch (" << a.rows() << "x" << a.cols() << " vs " << b.rows()
       << "x" << b.cols() << ")";
    throw DimensionError(os.str());
  }
  return a * b - b * a;
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionError("anticommutator: dimension mismatch");
  }
  return a * b + b * a;
}

HermitianOperator::HermitianOperator(ComplexMatrix m, double hermiticity_tol)
    : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) {
    throw DimensionError("HermitianOperator: matrix is not square");
  }
  if (!all_finite(mat_)) {
    throw InvariantViolation("HermitianOperator: non-finite entries");
  }
  const double defect = hermiticity_defect(mat_);
  if (defect > hermiticity_tol) {
    std::ostringstream os;
    os << "HermitianOperator: hermiticity defect " << defect << " exceeds tolerance "
       << hermiticity_tol;
    throw InvariantViolation(os.str());
  }
}

HermitianOperator HermitianOperator::symmetrized(const ComplexMatrix& m, double hermiticity_tol) {
  if (m.rows() != m.cols()) {
    throw DimensionError("HermitianOperator::symmetrized: matrix is not square");
  }
  const double defect = hermiticity_defect(m);
  if (defect > hermiticity_tol) {
    std::ostringstream os;
    os << "HermitianOperator::symmetrized: defect " << defect << " exceeds tolerance "
       << hermiticity_tol;
    throw InvariantViolation(os.str());
  }
  ComplexMatrix sym = 0.5 * (m + m.adjoint().eval());
  return HermitianOperator(std::move(sym), 1e-30 + defect);
}

DensityMatrix::DensityMatrix(HermitianOperator op, double trace_tol, double psd_tol)
    : op_(std::move(op)) {
  const double trace_err = std::abs(op_.matrix().trace().real() - 1.0) +
                           std::abs(op_.matrix().trace().imag());
  if (trace_err > trace_tol) {
    std::ostringstream os;
    os << "DensityMatrix: trace error " << trace_err << " exceeds tolerance " << trace_tol;
    throw InvariantViolation(os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op_.matrix(), Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -psd_tol) {
    std::ostringstream os;
    os << "DensityMatrix: smallest eigenvalue " << min_eig << " below -" << psd_tol;
    throw InvariantViolation(os.str());
  }
}

DensityMatrix DensityMatrix::from_matrix(const ComplexMatrix& m, double hermiticity_tol,
                                         double trace_tol, double psd_tol) {
  return DensityMatrix(HermitianOperator(m, hermiticity_tol), trace_tol, psd_tol);
}

DensityMatrix pure_state(const ComplexVector& amplitudes) {
  const double norm = amplitudes.norm();
  if (norm <= 0.0 || !amplitudes.allFinite()) {
    throw InvariantViolation("pure_state: amplitudes must be finite and nonzero");
  }
  ComplexVector psi = amplitudes / norm;
  return DensityMatrix(HermitianOperator(psi * psi.adjoint()));
}

DensityMatrix diagonal_density(const RealVector& populations) {
  ComplexMatrix m = ComplexMatrix::Zero(populations.size(), populations.size());
  for (Eigen::Index i = 0; i < populations.size(); ++i) {
    m(i, i) = populations(i);
  }
  return DensityMatrix(HermitianOperator(std::move(m)));
}

DensityMatrix maximally_mixed(Eigen::Index n) {
  if (n < 1) {
    throw DimensionError("maximally_mixed: dimension must be positive");
  }
  ComplexMatrix m = ComplexMatrix::Identity(n, n) / static_cast<double>(n);
  return DensityMatrix(HermitianOperator(std::move(m)));
}

}  // namespace qdfm
