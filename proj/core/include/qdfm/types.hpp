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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qdfm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace defaults {
inline constexpr double kHermiticityTol = 1e-10;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kPsdTol = 1e-8;
inline constexpr double kClusterTol = 1e-8;
inline constexpr double kFiniteDiffTol = 1e-5;
inline constexpr double kPreserveTol = 1e-6;
inline constexpr double kRankTol = 1e-9;
inline constexpr double kHardTol = 1e-6;
inline constexpr double kMaxStep = 1e-3;
}  // namespace defaults

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of an operation do not share a common dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A construction-time invariant check failed (non-Hermitian input,
/// trace/positivity violation, non-orthonormal frame, ...).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Eigenvalue clustering could not produce well-separated blocks.
class ClusteringError : public Error {
 public:
  using Error::Error;
};

/// Tracked eigenvalue blocks approached or crossed along a trajectory.
class BlockCrossingError : public Error {
 public:
  using Error::Error;
};

/// Numerical integration or finite differencing failed a hard check.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Malformed model file or operator expression.
class ParseError : public Error {
 public:
  using Error::Error;
};

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.derived().cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& m);
bool all_finite(const RealMatrix& m);

/// Largest entry of |M - M^dagger|.
double hermiticity_defect(const ComplexMatrix& m);

/// a*b - b*a. Throws DimensionError on shape mismatch.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Square complex matrix checked to be Hermitian at construction.
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m,
                             double hermiticity_tol = defaults::kHermiticityTol);

  /// Accepts m with defect up to `hermiticity_tol` and stores (m + m^dagger)/2.
  static HermitianOperator symmetrized(const ComplexMatrix& m, double hermiticity_tol);

  const ComplexMatrix& matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  ComplexMatrix mat_;
};

/// Trace-1 positive-semidefinite Hermitian matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianOperator op,
                         double trace_tol = defaults::kTraceTol,
                         double psd_tol = defaults::kPsdTol);

  static DensityMatrix from_matrix(const ComplexMatrix& m,
                                   double hermiticity_tol = defaults::kHermiticityTol,
                                   double trace_tol = defaults::kTraceTol,
                                   double psd_tol = defaults::kPsdTol);

  const ComplexMatrix& matrix() const { return op_.matrix(); }
  const HermitianOperator& hermitian() const { return op_; }
  Eigen::Index dim() const { return op_.dim(); }

 private:
  HermitianOperator op_;
};

/// Normalized projector |psi><psi| from (unnormalized) amplitudes.
DensityMatrix pure_state(const ComplexVector& amplitudes);

/// Density matrix with the given diagonal in the computational basis.
DensityMatrix diagonal_density(const RealVector& populations);

DensityMatrix maximally_mixed(Eigen::Index n);

}  // namespace qdfm
