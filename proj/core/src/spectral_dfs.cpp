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

#include "qdfm/spectral_dfs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace qdfm {

BlockSpectrum::BlockSpectrum(std::vector<SpectralBlock> blocks, Eigen::Index dim,
                             double cluster_tol)
    : blocks_(std::move(blocks)), dim_(dim), cluster_tol_(cluster_tol) {}

BlockSpectrum BlockSpectrum::from_hermitian(const HermitianOperator& op, double cluster_tol) {
  if (cluster_tol <= 0.0) {
    throw InvariantViolation("spectral_blocks: cluster_tol must be positive");
  }
  const Eigen::Index n = op.dim();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(op.matrix());
  if (es.info() != Eigen::Success) {
    throw Error("spectral_blocks: eigendecomposition failed");
  }

  // Solver order is ascending; work in descending order throughout.
  std::vector<double> vals(static_cast<std::size_t>(n));
  ComplexMatrix vecs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    vals[static_cast<std::size_t>(i)] = es.eigenvalues()(n - 1 - i);
    vecs.col(i) = es.eigenvectors().col(n - 1 - i);
  }

  std::vector<SpectralBlock> blocks;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    const bool boundary =
        (i == n) || (vals[static_cast<std::size_t>(i - 1)] - vals[static_cast<std::size_t>(i)] >
                     cluster_tol);
    if (!boundary) {
      continue;
    }
    const Eigen::Index m = i - start;
    const double spread =
        vals[static_cast<std::size_t>(start)] - vals[static_cast<std::size_t>(i - 1)];
    if (spread > 0.5 * cluster_tol) {
      std::ostringstream os;
      os << "spectral_blocks: cluster spread " << spread << " exceeds cluster_tol/2 = "
         << 0.5 * cluster_tol << " (ill-separated spectrum)";
      throw ClusteringError(os.str());
    }
    double mean = 0.0;
    for (Eigen::Index j = start; j < i; ++j) {
      mean += vals[static_cast<std::size_t>(j)];
    }
    mean /= static_cast<double>(m);
    blocks.push_back(SpectralBlock{mean, m, vecs.middleCols(start, m)});
    start = i;
  }
  return BlockSpectrum(std::move(blocks), n, cluster_tol);
}

std::vector<int> BlockSpectrum::multiplicities() const {
  std::vector<int> mu;
  mu.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    mu.push_back(static_cast<int>(b.multiplicity));
  }
  return mu;
}

ComplexMatrix BlockSpectrum::eigenbasis() const {
  ComplexMatrix v(dim_, dim_);
  Eigen::Index col = 0;
  for (const auto& b : blocks_) {
    v.middleCols(col, b.multiplicity) = b.basis;
    col += b.multiplicity;
  }
  return v;
}

ComplexMatrix BlockSpectrum::reconstruct() const {
  ComplexMatrix m = ComplexMatrix::Zero(dim_, dim_);
  for (const auto& b : blocks_) {
    m += b.eigenvalue * b.projector();
  }
  return m;
}

BlockSpectrum spectral_blocks(const DensityMatrix& rho, double cluster_tol) {
  return BlockSpectrum::from_hermitian(rho.hermitian(), cluster_tol);
}

BlockSelection BlockSelection::all(const BlockSpectrum& spec) {
  BlockSelection sel;
  for (Eigen::Index l = 0; l < spec.block_count(); ++l) {
    sel.indices.push_back(l);
  }
  return sel;
}

void BlockSelection::validate(const BlockSpectrum& spec) const {
  if (indices.empty()) {
    throw InvariantViolation("BlockSelection: selection must be nonempty");
  }
  std::vector<Eigen::Index> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= spec.block_count()) {
      throw InvariantViolation("BlockSelection: block index out of range");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw InvariantViolation("BlockSelection: duplicate block index");
    }
  }
}

bool BlockSelection::contains(Eigen::Index block) const {
  return std::find(indices.begin(), indices.end(), block) != indices.end();
}

Eigen::Index BlockSelection::selected_dimension(const BlockSpectrum& spec) const {
  validate(spec);
  Eigen::Index m = 0;
  for (Eigen::Index l : indices) {
    m += spec.block(l).multiplicity;
  }
  return m;
}

HermitianOperator dfs_projector(const BlockSpectrum& spec, const BlockSelection& sel) {
  sel.validate(spec);
  ComplexMatrix p = ComplexMatrix::Zero(spec.dim(), spec.dim());
  for (Eigen::Index l : sel.indices) {
    p += spec.block(l).projector();
  }
  return HermitianOperator::symmetrized(p, 1e-12);
}

DensityMatrix dfs_state(const DensityMatrix& rho, const BlockSpectrum& spec,
                        const BlockSelection& sel, double weight_tol) {
  const ComplexMatrix p = dfs_projector(spec, sel).matrix();
  const ComplexMatrix prp = p * rho.matrix() * p;
  const double weight = prp.trace().real();
  if (weight <= weight_tol) {
    std::ostringstream os;
    os << "dfs_state: selected weight " << weight << " below " << weight_tol;
    throw InvariantViolation(os.str());
  }
  return DensityMatrix::from_matrix(prp / weight, 1e-9, 1e-9, 1e-9);
}

EigenframePath::EigenframePath(std::vector<double> times, std::vector<ComplexMatrix> frames,
                               std::vector<ComplexMatrix> completions)
    : times_(std::move(times)), frames_(std::move(frames)), completions_(std::move(completions)) {
  if (times_.empty() || times_.size() != frames_.size() || times_.size() != completions_.size()) {
    throw InvariantViolation("EigenframePath: inconsistent sample counts");
  }
  const Eigen::Index n = frames_.front().rows();
  const Eigen::Index mk = frames_.front().cols();
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    const ComplexMatrix& f = frames_[i];
    const ComplexMatrix& c = completions_[i];
    if (f.rows() != n || f.cols() != mk || c.rows() != n || c.cols() != n - mk) {
      throw DimensionError("EigenframePath: frame shape mismatch");
    }
    ComplexMatrix v(n, n);
    v.leftCols(mk) = f;
    v.rightCols(n - mk) = c;
    const double defect = max_abs(v.adjoint() * v - ComplexMatrix::Identity(n, n));
    if (defect > 1e-10) {
      std::ostringstream os;
      os << "EigenframePath: frame " << i << " not orthonormal (defect " << defect << ")";
      throw InvariantViolation(os.str());
    }
  }
}

ComplexMatrix EigenframePath::full_unitary(Eigen::Index i) const {
  const ComplexMatrix& f = frames_.at(static_cast<std::size_t>(i));
  const ComplexMatrix& c = completions_.at(static_cast<std::size_t>(i));
  ComplexMatrix v(f.rows(), f.cols() + c.cols());
  v.leftCols(f.cols()) = f;
  v.rightCols(c.cols()) = c;
  return v;
}

namespace {

// Unitary Procrustes alignment: the W minimizing ||raw W - target||_F.
ComplexMatrix procrustes_align(const ComplexMatrix& raw, const ComplexMatrix& target) {
  const ComplexMatrix x = raw.adjoint() * target;
  Eigen::JacobiSVD<ComplexMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return raw * (svd.matrixU() * svd.matrixV().adjoint());
}

double subspace_overlap(const ComplexMatrix& basis_a, const ComplexMatrix& basis_b) {
  return (basis_a.adjoint() * basis_b).squaredNorm();
}

}  // namespace

EigenframePath eigenframe_path(const Trajectory& traj, const BlockSelection& sel_at_t0,
                               double cluster_tol) {
  if (traj.size() < 1) {
    throw InvariantViolation("eigenframe_path: empty trajectory");
  }
  const Eigen::Index n = traj.dim();
  const BlockSpectrum spec0 = BlockSpectrum::from_hermitian(
      HermitianOperator::symmetrized(traj.state(0), 1e-8), cluster_tol);
  sel_at_t0.validate(spec0);

  std::vector<Eigen::Index> selected = sel_at_t0.indices;
  std::sort(selected.begin(), selected.end());

  // Per-block frames for the selection; the complement is carried whole.
  std::vector<ComplexMatrix> block_frames;
  std::vector<Eigen::Index> block_mults;
  for (Eigen::Index l : selected) {
    block_frames.push_back(spec0.block(l).basis);
    block_mults.push_back(spec0.block(l).multiplicity);
  }
  Eigen::Index m_k = 0;
  for (Eigen::Index m : block_mults) {
    m_k += m;
  }
  ComplexMatrix completion(n, n - m_k);
  {
    Eigen::Index col = 0;
    for (Eigen::Index l = 0; l < spec0.block_count(); ++l) {
      if (std::find(selected.begin(), selected.end(), l) == selected.end()) {
        completion.middleCols(col, spec0.block(l).multiplicity) = spec0.block(l).basis;
        col += spec0.block(l).multiplicity;
      }
    }
  }

  auto assemble = [&](const std::vector<ComplexMatrix>& parts) {
    ComplexMatrix f(n, m_k);
    Eigen::Index col = 0;
    for (const auto& part : parts) {
      f.middleCols(col, part.cols()) = part;
      col += part.cols();
    }
    return f;
  };

  std::vector<double> times{traj.time(0)};
  std::vector<ComplexMatrix> frames{assemble(block_frames)};
  std::vector<ComplexMatrix> completions{completion};

  for (Eigen::Index i = 1; i < traj.size(); ++i) {
    const BlockSpectrum cur = BlockSpectrum::from_hermitian(
        HermitianOperator::symmetrized(traj.state(i), 1e-8), cluster_tol);

    // Match each tracked block to the current block its eigenspace overlaps.
    std::vector<Eigen::Index> match(block_frames.size());
    std::vector<bool> taken(static_cast<std::size_t>(cur.block_count()), false);
    for (std::size_t b = 0; b < block_frames.size(); ++b) {
      double best = -1.0;
      Eigen::Index best_l = -1;
      for (Eigen::Index l = 0; l < cur.block_count(); ++l) {
        const double overlap = subspace_overlap(cur.block(l).basis, block_frames[b]);
        if (overlap > best) {
          best = overlap;
          best_l = l;
        }
      }
      if (best_l < 0 || taken[static_cast<std::size_t>(best_l)] ||
          cur.block(best_l).multiplicity != block_mults[b] ||
          best < 0.5 * static_cast<double>(block_mults[b])) {
        std::ostringstream os;
        os << "eigenframe_path: lost track of selected block " << b << " at t = " << traj.time(i)
           << " (projector discontinuity / block crossing)";
        throw BlockCrossingError(os.str());
      }
      taken[static_cast<std::size_t>(best_l)] = true;
      match[b] = best_l;
    }

    // Selected eigenvalues must stay separated from the unselected ones.
    for (std::size_t b = 0; b < match.size(); ++b) {
      for (Eigen::Index l = 0; l < cur.block_count(); ++l) {
        if (taken[static_cast<std::size_t>(l)]) {
          continue;
        }
        const double gap = std::abs(cur.block(match[b]).eigenvalue - cur.block(l).eigenvalue);
        if (gap <= cluster_tol) {
          std::ostringstream os;
          os << "eigenframe_path: selected eigenvalue approaches an unselected one (gap " << gap
             << ") at t = " << traj.time(i);
          throw BlockCrossingError(os.str());
        }
      }
    }

    for (std::size_t b = 0; b < block_frames.size(); ++b) {
      block_frames[b] = procrustes_align(cur.block(match[b]).basis, block_frames[b]);
    }
    ComplexMatrix raw_completion(n, n - m_k);
    {
      Eigen::Index col = 0;
      for (Eigen::Index l = 0; l < cur.block_count(); ++l) {
        if (!taken[static_cast<std::size_t>(l)]) {
          raw_completion.middleCols(col, cur.block(l).multiplicity) = cur.block(l).basis;
          col += cur.block(l).multiplicity;
        }
      }
    }
    completion = (n - m_k) > 0 ? procrustes_align(raw_completion, completion)
                               : ComplexMatrix(n, 0);

    times.push_back(traj.time(i));
    frames.push_back(assemble(block_frames));
    completions.push_back(completion);
  }

  return EigenframePath(std::move(times), std::move(frames), std::move(completions));
}

namespace {

// Derivative weights of the quadratic through (ta, tb, tc) evaluated at te.
std::array<double, 3> three_point_weights(double ta, double tb, double tc, double te) {
  return {(2.0 * te - tb - tc) / ((ta - tb) * (ta - tc)),
          (2.0 * te - ta - tc) / ((tb - ta) * (tb - tc)),
          (2.0 * te - ta - tb) / ((tc - ta) * (tc - tb))};
}

}  // namespace

std::vector<HermitianOperator> dfs_hamiltonian(const EigenframePath& path, double fd_tol) {
  const Eigen::Index count = path.size();
  if (count < 2) {
    throw InvariantViolation("dfs_hamiltonian: path needs at least two times");
  }
  std::vector<ComplexMatrix> v(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    v[static_cast<std::size_t>(i)] = path.full_unitary(i);
  }

  std::vector<HermitianOperator> result;
  result.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    ComplexMatrix vdot;
    if (count == 2) {
      vdot = (v[1] - v[0]) / (path.time(1) - path.time(0));
    } else {
      const Eigen::Index a = std::clamp<Eigen::Index>(i - 1, 0, count - 3);
      const auto w = three_point_weights(path.time(a), path.time(a + 1), path.time(a + 2),
                                         path.time(i));
      vdot = w[0] * v[static_cast<std::size_t>(a)] + w[1] * v[static_cast<std::size_t>(a + 1)] +
             w[2] * v[static_cast<std::size_t>(a + 2)];
    }
    ComplexMatrix h = Complex(0, 1) * vdot * v[static_cast<std::size_t>(i)].adjoint();
    const double defect = hermiticity_defect(h);
    if (defect > fd_tol) {
      std::ostringstream os;
      os << "dfs_hamiltonian: non-Hermitian finite difference (defect " << defect
         << " > " << fd_tol << "); time step too coarse";
      throw IntegrationError(os.str());
    }
    result.push_back(HermitianOperator::symmetrized(h, fd_tol));
  }
  return result;
}

double consistency_residual(const LindbladModel& model, const DensityMatrix& rho,
                            const RealVector& u, const RealVector& gamma,
                            const HermitianOperator& h_dfs, const BlockSpectrum& spec,
                            const BlockSelection& sel) {
  if (h_dfs.dim() != model.dim() || rho.dim() != model.dim() || spec.dim() != model.dim()) {
    throw DimensionError("consistency_residual: dimension mismatch");
  }
  const ComplexMatrix p = dfs_projector(spec, sel).matrix();
  const ComplexMatrix rhodot = lindblad_rhs_matrix(model, rho.matrix(), u, gamma);
  const ComplexMatrix residual =
      p * rhodot * p + Complex(0, 1) * (p * commutator(h_dfs.matrix(), rho.matrix()) * p);
  return residual.norm();
}

namespace {

ComplexMatrix orthonormal_columns(const ComplexMatrix& b) {
  Eigen::HouseholderQR<ComplexMatrix> qr(b);
  return ComplexMatrix(qr.householderQ()) * ComplexMatrix::Identity(b.rows(), b.cols());
}

// Columns of V spanning the (numerical) null space of s.
ComplexMatrix nullspace_columns(const ComplexMatrix& s, double tol_abs) {
  Eigen::JacobiSVD<ComplexMatrix> svd(s, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol_abs) {
      ++rank;
    }
  }
  return svd.matrixV().rightCols(s.cols() - rank);
}

struct EigLeaf {
  ComplexMatrix basis;
  std::vector<Complex> values;
};

std::vector<Complex> cluster_complex(const std::vector<Complex>& values, double tol) {
  std::vector<Complex> centers;
  std::vector<int> counts;
  for (const Complex& v : values) {
    bool placed = false;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (std::abs(v - centers[c]) <= tol) {
        centers[c] = (centers[c] * static_cast<double>(counts[c]) + v) /
                     static_cast<double>(counts[c] + 1);
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

std::vector<CommonEigenspace> common_eigenvector_subspace(const std::vector<ComplexMatrix>& jumps,
                                                          double tol) {
  if (jumps.empty()) {
    return {};
  }
  const Eigen::Index n = jumps.front().rows();
  for (const auto& f : jumps) {
    if (f.rows() != n || f.cols() != n) {
      throw DimensionError("common_eigenvector_subspace: dimension mismatch");
    }
  }

  std::vector<EigLeaf> leaves{{ComplexMatrix::Identity(n, n), {}}};
  for (const auto& f : jumps) {
    const double scale = std::max(1.0, max_abs(f));
    std::vector<EigLeaf> next;
    for (const auto& leaf : leaves) {
      const Eigen::Index k = leaf.basis.cols();
      const ComplexMatrix compressed = leaf.basis.adjoint() * f * leaf.basis;
      Eigen::ComplexEigenSolver<ComplexMatrix> es(compressed);
      std::vector<Complex> candidates(es.eigenvalues().data(),
                                      es.eigenvalues().data() + es.eigenvalues().size());
      for (const Complex& c : cluster_complex(candidates, tol * scale)) {
        const ComplexMatrix shifted = f * leaf.basis - c * leaf.basis;
        const ComplexMatrix y = nullspace_columns(shifted, tol * scale);
        if (y.cols() == 0) {
          continue;
        }
        ComplexMatrix basis = orthonormal_columns(leaf.basis * y);
        if (max_abs(f * basis - c * basis) > 10.0 * tol * scale) {
          continue;
        }
        EigLeaf refined{std::move(basis), leaf.values};
        refined.values.push_back(c);
        next.push_back(std::move(refined));
      }
      static_cast<void>(k);
    }
    leaves = std::move(next);
    if (leaves.empty()) {
      break;
    }
  }

  std::sort(leaves.begin(), leaves.end(), [](const EigLeaf& a, const EigLeaf& b) {
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      if (a.values[i].real() != b.values[i].real()) {
        return a.values[i].real() > b.values[i].real();
      }
      if (a.values[i].imag() != b.values[i].imag()) {
        return a.values[i].imag() > b.values[i].imag();
      }
    }
    return false;
  });

  std::vector<CommonEigenspace> result;
  result.reserve(leaves.size());
  for (auto& leaf : leaves) {
    CommonEigenspace space;
    space.basis = std::move(leaf.basis);
    space.eigenvalues = Eigen::Map<ComplexVector>(leaf.values.data(),
                                                  static_cast<Eigen::Index>(leaf.values.size()));
    result.push_back(std::move(space));
  }
  return result;
}

PreservationReport eigenvalue_preservation_report(const Trajectory& traj,
                                                  const BlockSelection& sel_at_t0,
                                                  const PreservationOptions& options) {
  if (traj.size() < 1) {
    throw InvariantViolation("eigenvalue_preservation_report: empty trajectory");
  }
  const BlockSpectrum spec0 = BlockSpectrum::from_hermitian(
      HermitianOperator::symmetrized(traj.state(0), 1e-8), options.cluster_tol);
  sel_at_t0.validate(spec0);

  const Eigen::Index d0 = spec0.block_count();
  std::vector<double> reference(static_cast<std::size_t>(d0));
  std::vector<double> tracked(static_cast<std::size_t>(d0));
  std::vector<int> init_mult = spec0.multiplicities();
  for (Eigen::Index l = 0; l < d0; ++l) {
    reference[static_cast<std::size_t>(l)] = spec0.block(l).eigenvalue;
    tracked[static_cast<std::size_t>(l)] = spec0.block(l).eigenvalue;
  }
  std::vector<int> kbar_init;
  for (Eigen::Index l = 0; l < d0; ++l) {
    if (!sel_at_t0.contains(l)) {
      kbar_init.push_back(init_mult[static_cast<std::size_t>(l)]);
    }
  }
  std::sort(kbar_init.begin(), kbar_init.end());

  PreservationReport report;
  report.selected = sel_at_t0.indices;
  std::sort(report.selected.begin(), report.selected.end());
  report.initial_multiplicities = init_mult;
  report.preserve_tol = options.preserve_tol;

  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    BlockSpectrum cur = BlockSpectrum::from_hermitian(
        HermitianOperator::symmetrized(traj.state(i), 1e-8), options.cluster_tol);
    const Eigen::Index dc = cur.block_count();

    // Globally-greedy nearest matching from tracked values to current blocks.
    std::vector<Eigen::Index> match(static_cast<std::size_t>(d0), -1);
    std::vector<bool> taken(static_cast<std::size_t>(dc), false);
    bool ok = true;
    std::vector<std::pair<double, std::pair<Eigen::Index, Eigen::Index>>> pairs;
    for (Eigen::Index b = 0; b < d0; ++b) {
      for (Eigen::Index l = 0; l < dc; ++l) {
        pairs.push_back({std::abs(tracked[static_cast<std::size_t>(b)] - cur.block(l).eigenvalue),
                         {b, l}});
      }
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Eigen::Index assigned = 0;
    for (const auto& [dist, bl] : pairs) {
      const auto [b, l] = bl;
      if (match[static_cast<std::size_t>(b)] >= 0 || taken[static_cast<std::size_t>(l)]) {
        continue;
      }
      match[static_cast<std::size_t>(b)] = l;
      taken[static_cast<std::size_t>(l)] = true;
      ++assigned;
      if (assigned == std::min(d0, dc)) {
        break;
      }
    }
    for (Eigen::Index b = 0; b < d0; ++b) {
      if (match[static_cast<std::size_t>(b)] < 0) {
        ok = false;  // merged away; reuse the nearest for display
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index l = 0; l < dc; ++l) {
          const double dist =
              std::abs(tracked[static_cast<std::size_t>(b)] - cur.block(l).eigenvalue);
          if (dist < best) {
            best = dist;
            match[static_cast<std::size_t>(b)] = l;
          }
        }
      } else if (cur.block(match[static_cast<std::size_t>(b)]).multiplicity !=
                 init_mult[static_cast<std::size_t>(b)]) {
        ok = false;
      }
    }

    RealVector lambdas(d0);
    for (Eigen::Index b = 0; b < d0; ++b) {
      lambdas(b) = cur.block(match[static_cast<std::size_t>(b)]).eigenvalue;
      tracked[static_cast<std::size_t>(b)] = lambdas(b);
    }
    RealVector devs(static_cast<Eigen::Index>(report.selected.size()));
    for (std::size_t s = 0; s < report.selected.size(); ++s) {
      const Eigen::Index b = report.selected[s];
      devs(static_cast<Eigen::Index>(s)) =
          std::abs(lambdas(b) - reference[static_cast<std::size_t>(b)]);
      report.max_deviation = std::max(report.max_deviation, devs(static_cast<Eigen::Index>(s)));
    }

    std::vector<int> kbar_now;
    std::vector<bool> matched_to_selected(static_cast<std::size_t>(dc), false);
    for (const Eigen::Index b : report.selected) {
      matched_to_selected[static_cast<std::size_t>(match[static_cast<std::size_t>(b)])] = true;
    }
    for (Eigen::Index l = 0; l < dc; ++l) {
      if (!matched_to_selected[static_cast<std::size_t>(l)]) {
        kbar_now.push_back(static_cast<int>(cur.block(l).multiplicity));
      }
    }
    std::sort(kbar_now.begin(), kbar_now.end());
    const bool kbar_changed = kbar_now != kbar_init;

    report.times.push_back(traj.time(i));
    report.block_eigenvalues.push_back(std::move(lambdas));
    report.deviations.push_back(std::move(devs));
    report.kbar_multiplicity_changed.push_back(kbar_changed);
    report.tracking_ok.push_back(ok);
    report.any_kbar_change = report.any_kbar_change || kbar_changed;
    report.any_tracking_failure = report.any_tracking_failure || !ok;
  }

  report.df_compatible =
      report.max_deviation <= options.preserve_tol && !report.any_kbar_change;
  return report;
}

}  // namespace qdfm
