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

#include "qdfm/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <utility>

namespace qdfm {

namespace {

RealVector vectorize(const RealMatrix& m) {
  return Eigen::Map<const RealVector>(m.data(), m.size());
}

RealMatrix unvectorize(const RealVector& v, Eigen::Index n) {
  return Eigen::Map<const RealMatrix>(v.data(), n, n);
}

}  // namespace

MatrixSpan::MatrixSpan(Eigen::Index ambient_dim, double rank_tol)
    : ambient_(ambient_dim), rank_tol_(rank_tol), ortho_(ambient_dim * ambient_dim, 0) {
  if (ambient_dim < 1) {
    throw DimensionError("MatrixSpan: ambient dimension must be positive");
  }
  if (rank_tol <= 0.0) {
    throw InvariantViolation("MatrixSpan: rank_tol must be positive");
  }
}

double MatrixSpan::membership_threshold(double candidate_norm) const {
  return rank_tol_ * std::max(max_norm_, candidate_norm);
}

std::pair<RealMatrix, double> MatrixSpan::reduce(const RealMatrix& candidate) const {
  if (candidate.rows() != ambient_ || candidate.cols() != ambient_) {
    throw DimensionError("MatrixSpan::reduce: candidate dimension mismatch");
  }
  RealVector v = vectorize(candidate);
  if (ortho_.cols() > 0) {
    v -= ortho_ * (ortho_.transpose() * v);
    // Second pass keeps the residual orthogonal at working precision.
    v -= ortho_ * (ortho_.transpose() * v);
  }
  return {unvectorize(v, ambient_), v.norm()};
}

bool MatrixSpan::contains(const RealMatrix& candidate) const {
  const auto [residual, norm] = reduce(candidate);
  static_cast<void>(residual);
  return norm <= membership_threshold(candidate.norm());
}

bool MatrixSpan::add(const RealMatrix& candidate) {
  const double cnorm = candidate.norm();
  if (cnorm == 0.0) {
    return false;
  }
  auto [residual, rnorm] = reduce(candidate);
  if (rnorm <= membership_threshold(cnorm)) {
    return false;
  }
  // Confirm independence on the stacked basis directly.
  RealMatrix stacked(ambient_ * ambient_, dimension() + 1);
  for (Eigen::Index i = 0; i < dimension(); ++i) {
    stacked.col(i) = vectorize(basis_[static_cast<std::size_t>(i)]);
  }
  stacked.col(dimension()) = vectorize(candidate);
  Eigen::JacobiSVD<RealMatrix> svd(stacked);
  if (svd.singularValues().minCoeff() <= membership_threshold(cnorm)) {
    return false;
  }
  basis_.push_back(candidate);
  max_norm_ = std::max(max_norm_, cnorm);
  ortho_.conservativeResize(Eigen::NoChange, ortho_.cols() + 1);
  ortho_.col(ortho_.cols() - 1) = vectorize(residual) / rnorm;
  return true;
}

double MatrixSpan::smallest_singular_value() const {
  if (basis_.empty()) {
    return 0.0;
  }
  RealMatrix stacked(ambient_ * ambient_, dimension());
  for (Eigen::Index i = 0; i < dimension(); ++i) {
    stacked.col(i) = vectorize(basis_[static_cast<std::size_t>(i)]);
  }
  Eigen::JacobiSVD<RealMatrix> svd(stacked);
  return svd.singularValues().minCoeff();
}

std::pair<RealMatrix, double> span_reduce(const RealMatrix& candidate, const MatrixSpan& span) {
  return span.reduce(candidate);
}

Eigen::Index Degree0Result::total_dimension() const {
  Eigen::Index total = 0;
  for (const auto& s : spaces) {
    total += s.basis.cols();
  }
  return total;
}

namespace {

RealMatrix orthonormal_columns_real(const RealMatrix& b) {
  Eigen::HouseholderQR<RealMatrix> qr(b);
  return RealMatrix(qr.householderQ()) * RealMatrix::Identity(b.rows(), b.cols());
}

RealMatrix real_nullspace_columns(const RealMatrix& s, double tol_abs) {
  Eigen::JacobiSVD<RealMatrix> svd(s, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol_abs) {
      ++rank;
    }
  }
  return svd.matrixV().rightCols(s.cols() - rank);
}

std::vector<double> cluster_real(const std::vector<double>& values, double tol) {
  std::vector<double> centers;
  std::vector<int> counts;
  for (double v : values) {
    bool placed = false;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (std::abs(v - centers[c]) <= tol) {
        centers[c] = (centers[c] * counts[c] + v) / (counts[c] + 1);
        ++counts[c];
        placed = true;
        break;
      }
    }
    if (!placed) {
      centers.push_back(v);
      counts.push_back(1);
    }
  }
  return centers;
}

}  // namespace

Degree0Result degree0_check(const RealMatrix& drift, const std::vector<RealMatrix>& controls,
                            double tol) {
  const Eigen::Index n = drift.rows();
  if (drift.cols() != n) {
    throw DimensionError("degree0_check: drift must be square");
  }
  std::vector<RealMatrix> mats{drift};
  for (const auto& b : controls) {
    if (b.rows() != n || b.cols() != n) {
      throw DimensionError("degree0_check: control dimension mismatch");
    }
    mats.push_back(b);
  }

  struct Leaf {
    RealMatrix basis;
    std::vector<double> values;
  };
  std::vector<Leaf> leaves{{RealMatrix::Identity(n, n), {}}};

  for (const auto& m : mats) {
    const double scale = std::max(1.0, max_abs(m));
    std::vector<Leaf> next;
    for (const auto& leaf : leaves) {
      const RealMatrix compressed = leaf.basis.transpose() * m * leaf.basis;
      Eigen::EigenSolver<RealMatrix> es(compressed);
      std::vector<double> reals;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (std::abs(es.eigenvalues()(i).imag()) <= tol * scale) {
          reals.push_back(es.eigenvalues()(i).real());
        }
      }
      for (double lambda : cluster_real(reals, tol * scale)) {
        const RealMatrix shifted = m * leaf.basis - lambda * leaf.basis;
        const RealMatrix y = real_nullspace_columns(shifted, tol * scale);
        if (y.cols() == 0) {
          continue;
        }
        RealMatrix basis = orthonormal_columns_real(leaf.basis * y);
        if (max_abs(m * basis - lambda * basis) > 10.0 * tol * scale) {
          continue;
        }
        Leaf refined{std::move(basis), leaf.values};
        refined.values.push_back(lambda);
        next.push_back(std::move(refined));
      }
    }
    leaves = std::move(next);
    if (leaves.empty()) {
      break;
    }
  }

  Degree0Result result;
  for (auto& leaf : leaves) {
    Degree0Result::JointEigenspace space;
    space.basis = std::move(leaf.basis);
    space.eigenvalues = Eigen::Map<RealVector>(leaf.values.data(),
                                               static_cast<Eigen::Index>(leaf.values.size()));
    result.spaces.push_back(std::move(space));
  }
  result.full_space = result.total_dimension() == n;
  return result;
}

RateVariant RateVariant::stochastic() {
  return RateVariant{true, {}};
}

RateVariant RateVariant::constant(RealVector rates) {
  return RateVariant{false, std::move(rates)};
}

ClosureReport close_distribution(const RealMatrix& drift, const std::vector<RealMatrix>& controls,
                                 const std::vector<std::string>& control_labels,
                                 const std::vector<std::pair<std::string, RealMatrix>>& seeds,
                                 const ClosureOptions& options) {
  if (options.expansion_degree != 1) {
    throw InvariantViolation(
        "close_distribution: only degree-1 (linear) generators are implemented");
  }
  if (options.max_iterations < 1) {
    throw InvariantViolation("close_distribution: max_iterations must be >= 1");
  }
  if (control_labels.size() != controls.size()) {
    throw InvariantViolation("close_distribution: control label count mismatch");
  }
  const Eigen::Index n = drift.rows();

  ClosureReport report{MatrixSpan(n, options.rank_tol)};
  MatrixSpan with_controls(n, options.rank_tol);
  for (const auto& b : controls) {
    with_controls.add(b);
  }

  std::deque<Eigen::Index> frontier;
  for (const auto& [label, g] : seeds) {
    if (g.rows() != n || g.cols() != n) {
      throw DimensionError("close_distribution: seed dimension mismatch");
    }
    const auto [residual, rnorm] = report.span.reduce(g);
    static_cast<void>(residual);
    if (report.span.add(g)) {
      with_controls.add(g);
      frontier.push_back(report.span.dimension() - 1);
      report.added.push_back({0, "seed " + label, rnorm});
    } else {
      report.reduction_log.push_back("seed " + label + " already in span");
    }
  }

  int round = 0;
  while (!frontier.empty()) {
    if (round >= options.max_iterations) {
      report.warnings.push_back("closure did not stabilize within max_iterations");
      break;
    }
    ++round;
    std::deque<Eigen::Index> next;
    for (const Eigen::Index idx : frontier) {
      const RealMatrix w = report.span.basis()[static_cast<std::size_t>(idx)];
      for (std::size_t m = 0; m <= controls.size(); ++m) {
        const RealMatrix& partner = (m == 0) ? drift : controls[m - 1];
        const std::string partner_label = (m == 0) ? "A" : control_labels[m - 1];
        const RealMatrix bracket = partner * w - w * partner;
        const auto [residual, rnorm] = with_controls.reduce(bracket);
        std::ostringstream label;
        label << "[" << partner_label << ", S" << idx << "]";
        if (rnorm <= with_controls.membership_threshold(bracket.norm())) {
          std::ostringstream log;
          log << label.str() << " in span+controls (residual " << rnorm << ")";
          report.reduction_log.push_back(log.str());
          continue;
        }
        // Store only the component orthogonal to span+controls, keeping the
        // distribution control-free beyond its seed directions.
        if (report.span.add(residual)) {
          with_controls.add(residual);
          next.push_back(report.span.dimension() - 1);
          report.added.push_back({round, label.str(), rnorm});
        }
      }
    }
    frontier = std::move(next);
  }
  report.iterations = round;
  report.stabilized = frontier.empty();

  const double smallest = report.span.smallest_singular_value();
  if (report.span.dimension() > 0 &&
      smallest < 10.0 * report.span.membership_threshold(smallest)) {
    std::ostringstream os;
    os << "rank decisions are marginal: smallest retained singular value " << smallest;
    report.warnings.push_back(os.str());
  }
  return report;
}

ClosureReport reachability_distribution(const BilinearModel& bm, const RateVariant& variant,
                                        const ClosureOptions& options) {
  std::vector<std::string> control_labels;
  control_labels.reserve(bm.control_labels().size());
  for (const auto& l : bm.control_labels()) {
    control_labels.push_back("B[" + l + "]");
  }

  std::vector<std::pair<std::string, RealMatrix>> seeds;
  RealMatrix drift = bm.drift();
  if (variant.is_stochastic) {
    for (std::size_t a = 0; a < bm.dissipators().size(); ++a) {
      seeds.emplace_back("G[" + bm.jump_labels()[a] + "]", bm.dissipators()[a]);
    }
  } else {
    if (variant.rates.size() != static_cast<Eigen::Index>(bm.dissipators().size())) {
      throw DimensionError("reachability_distribution: one rate per dissipation channel required");
    }
    RealMatrix weighted = RealMatrix::Zero(bm.coord_dim(), bm.coord_dim());
    for (std::size_t a = 0; a < bm.dissipators().size(); ++a) {
      const double rate = variant.rates(static_cast<Eigen::Index>(a));
      if (rate < 0.0) {
        throw InvariantViolation("reachability_distribution: negative rate");
      }
      weighted += rate * bm.dissipators()[a];
    }
    drift += weighted;
    seeds.emplace_back("sum_a rate_a*G[a]", weighted);
  }
  return close_distribution(drift, bm.controls(), control_labels, seeds, options);
}

PointwiseDistribution evaluate_distribution(const MatrixSpan& span, const RealVector& x0) {
  if (x0.size() != span.ambient_dim()) {
    throw DimensionError("evaluate_distribution: point length mismatch");
  }
  PointwiseDistribution out;
  double scale = 0.0;
  for (const auto& v : span.basis()) {
    out.vectors.push_back(v * x0);
    scale = std::max(scale, out.vectors.back().norm());
  }
  if (out.vectors.empty() || scale == 0.0) {
    out.dimension = 0;
    return out;
  }
  RealMatrix stacked(x0.size(), static_cast<Eigen::Index>(out.vectors.size()));
  for (std::size_t i = 0; i < out.vectors.size(); ++i) {
    stacked.col(static_cast<Eigen::Index>(i)) = out.vectors[i];
  }
  Eigen::JacobiSVD<RealMatrix> svd(stacked);
  const double thr = span.rank_tol() * scale;
  out.dimension = (svd.singularValues().array() > thr).count();
  return out;
}

namespace {

// Orthonormal basis of the column span, rank decided at rank_tol relative to
// the largest singular value (or 1 for near-zero inputs).
RealMatrix column_span_basis(const RealMatrix& m, double rank_tol) {
  if (m.cols() == 0) {
    return RealMatrix(m.rows(), 0);
  }
  Eigen::JacobiSVD<RealMatrix> svd(m, Eigen::ComputeThinU);
  const double thr = rank_tol * std::max(1.0, svd.singularValues()(0));
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > thr) {
      ++rank;
    }
  }
  return svd.matrixU().leftCols(rank);
}

}  // namespace

ContainmentReport tangent_containment(const MatrixSpan& span, const RealVector& x0,
                                      const std::vector<HermitianOperator>& dfm_tangent,
                                      CoordinateMode mode, const ContainmentOptions& options) {
  if (x0.size() != span.ambient_dim()) {
    throw DimensionError("tangent_containment: point length mismatch");
  }
  const ComplexMatrix rho0 = inverse_coherence_map(x0, mode, 1.0);
  if (options.expected != nullptr) {
    options.expected->validate();
    const BlockSpectrum spec = BlockSpectrum::from_hermitian(
        HermitianOperator::symmetrized(rho0, 1e-8), options.cluster_tol);
    std::vector<int> found = spec.multiplicities();
    std::vector<int> wanted = options.expected->preserved;
    wanted.insert(wanted.end(), options.expected->free_blocks.begin(),
                  options.expected->free_blocks.end());
    std::sort(found.begin(), found.end());
    std::sort(wanted.begin(), wanted.end());
    if (found != wanted) {
      throw InvariantViolation(
          "tangent_containment: base point is incompatible with the manifold block structure");
    }
  }

  RealMatrix tangent(x0.size(), static_cast<Eigen::Index>(dfm_tangent.size()));
  for (std::size_t i = 0; i < dfm_tangent.size(); ++i) {
    tangent.col(static_cast<Eigen::Index>(i)) = coherence_map(dfm_tangent[i].matrix(), mode);
  }
  const RealMatrix q_tangent = column_span_basis(tangent, options.rank_tol);

  const PointwiseDistribution pointwise = evaluate_distribution(span, x0);
  RealMatrix dist(x0.size(), static_cast<Eigen::Index>(pointwise.vectors.size()));
  for (std::size_t i = 0; i < pointwise.vectors.size(); ++i) {
    dist.col(static_cast<Eigen::Index>(i)) = pointwise.vectors[i];
  }
  const RealMatrix q_dist = column_span_basis(dist, options.rank_tol);

  ContainmentReport report;
  report.tangent_dimension = q_tangent.cols();
  report.pointwise_dimension = pointwise.dimension;
  report.contained = true;
  for (const auto& d : pointwise.vectors) {
    RealVector r = d - q_tangent * (q_tangent.transpose() * d);
    const double rn = r.norm();
    report.residual_norms.push_back(rn);
    if (rn > options.rank_tol * d.norm()) {
      report.contained = false;
    }
  }

  if (q_tangent.cols() > 0 && q_dist.cols() > 0) {
    RealMatrix joint(x0.size(), q_tangent.cols() + q_dist.cols());
    joint.leftCols(q_tangent.cols()) = q_tangent;
    joint.rightCols(q_dist.cols()) = q_dist;
    const Eigen::Index joint_rank = column_span_basis(joint, options.rank_tol).cols();
    report.intersection_dimension = q_tangent.cols() + q_dist.cols() - joint_rank;

    Eigen::JacobiSVD<RealMatrix> svd(q_tangent.transpose() * q_dist);
    const Eigen::Index count = svd.singularValues().size();
    report.principal_angles.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) {
      report.principal_angles(i) = std::acos(std::clamp(svd.singularValues()(i), 0.0, 1.0));
    }
  } else {
    report.intersection_dimension = 0;
    report.principal_angles.resize(0);
  }
  return report;
}

}  // namespace qdfm
