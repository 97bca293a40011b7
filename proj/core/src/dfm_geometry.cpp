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

#include "qdfm/dfm_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qdfm {

namespace {

void check_multiplicities(const std::vector<int>& mu, const char* who, bool allow_empty) {
  if (mu.empty() && !allow_empty) {
    throw InvariantViolation(std::string(who) + ": multiplicity list must be nonempty");
  }
  for (int m : mu) {
    if (m < 1) {
      throw InvariantViolation(std::string(who) + ": multiplicities must be >= 1");
    }
  }
}

int sum_of(const std::vector<int>& v) {
  return std::accumulate(v.begin(), v.end(), 0);
}

int sum_squares_of(const std::vector<int>& v) {
  return std::accumulate(v.begin(), v.end(), 0, [](int acc, int m) { return acc + m * m; });
}

}  // namespace

MultiplicitySignature::MultiplicitySignature(std::vector<int> mu) : mu_(std::move(mu)) {
  check_multiplicities(mu_, "MultiplicitySignature", false);
}

int MultiplicitySignature::total() const {
  return sum_of(mu_);
}

int MultiplicitySignature::block_count() const {
  return static_cast<int>(mu_.size());
}

int MultiplicitySignature::sum_squares() const {
  return sum_squares_of(mu_);
}

void DfmSpec::validate() const {
  check_multiplicities(preserved, "DfmSpec.preserved", false);
  check_multiplicities(free_blocks, "DfmSpec.free_blocks", true);
}

int DfmSpec::total() const {
  return sum_of(preserved) + sum_of(free_blocks);
}

int stratum_codimension(const MultiplicitySignature& mu) {
  return mu.sum_squares() - mu.block_count() + 1;
}

int isospectral_leaf_dimension(const MultiplicitySignature& mu) {
  const int n = mu.total();
  return n * n - mu.sum_squares();
}

int dfm_dimension(const DfmSpec& spec) {
  spec.validate();
  const int n = spec.total();
  if (spec.free_blocks.empty()) {
    // All eigenvalues specified: the trace constraint is already implied by
    // the spectrum, so the fixed-spectrum orbit dimension applies.
    return n * n - sum_squares_of(spec.preserved);
  }
  return n * n + sum_of(spec.free_blocks) - sum_squares_of(spec.free_blocks) -
         sum_squares_of(spec.preserved) - 1;
}

namespace {

// Partitions of n as descending-sorted multisets, in ascending lexicographic
// order of the descending representation.
std::vector<std::vector<int>> partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  // Recursive enumeration with parts bounded by the previous part.
  auto rec = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
      cur.push_back(part);
      self(self, remaining - part, part);
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<DfmTableRow> table_generate(int n) {
  if (n < 2) {
    throw InvariantViolation("table_generate: n must be >= 2");
  }
  std::vector<DfmTableRow> rows;
  for (int preserved_sum = 1; preserved_sum <= n; ++preserved_sum) {
    const int free_sum = n - preserved_sum;
    for (const auto& mk : partitions(preserved_sum)) {
      if (free_sum == 0) {
        DfmSpec spec{mk, {}};
        rows.push_back({mk, {}, dfm_dimension(spec)});
        continue;
      }
      for (const auto& mkbar : partitions(free_sum)) {
        // A single free simple eigenvalue is pinned by the trace constraint,
        // so that pair duplicates a fully specified row.
        if (mkbar.size() == 1 && mkbar[0] == 1) {
          continue;
        }
        DfmSpec spec{mk, mkbar};
        rows.push_back({mk, mkbar, dfm_dimension(spec)});
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const DfmTableRow& a, const DfmTableRow& b) {
    const int sa = sum_of(a.preserved);
    const int sb = sum_of(b.preserved);
    if (sa != sb) {
      return sa < sb;
    }
    if (a.preserved != b.preserved) {
      return a.preserved < b.preserved;
    }
    return a.free_blocks < b.free_blocks;
  });
  // Rows were built and ordered on descending partitions; present ascending.
  for (auto& row : rows) {
    std::sort(row.preserved.begin(), row.preserved.end());
    std::sort(row.free_blocks.begin(), row.free_blocks.end());
  }
  return rows;
}

DfmSpec dfm_spec_from_selection(const BlockSpectrum& spec, const BlockSelection& sel) {
  sel.validate(spec);
  DfmSpec out;
  for (Eigen::Index l = 0; l < spec.block_count(); ++l) {
    const int m = static_cast<int>(spec.block(l).multiplicity);
    if (sel.contains(l)) {
      out.preserved.push_back(m);
    } else {
      out.free_blocks.push_back(m);
    }
  }
  return out;
}

TangentBasisReport multiplicity_preserving_tangent(const DensityMatrix& rho,
                                                   const BlockSpectrum& spec,
                                                   const BlockSelection& sel) {
  sel.validate(spec);
  if (spec.dim() != rho.dim()) {
    throw DimensionError("multiplicity_preserving_tangent: dimension mismatch");
  }
  const Eigen::Index n = spec.dim();
  const ComplexMatrix v = spec.eigenbasis();

  std::vector<HermitianOperator> basis;

  // Hermitian off-diagonal blocks between any two distinct eigenblocks.
  std::vector<Eigen::Index> offsets(static_cast<std::size_t>(spec.block_count()) + 1, 0);
  for (Eigen::Index l = 0; l < spec.block_count(); ++l) {
    offsets[static_cast<std::size_t>(l) + 1] =
        offsets[static_cast<std::size_t>(l)] + spec.block(l).multiplicity;
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index l = 0; l < spec.block_count(); ++l) {
    for (Eigen::Index lp = l + 1; lp < spec.block_count(); ++lp) {
      for (Eigen::Index i = offsets[static_cast<std::size_t>(l)];
           i < offsets[static_cast<std::size_t>(l) + 1]; ++i) {
        for (Eigen::Index j = offsets[static_cast<std::size_t>(lp)];
             j < offsets[static_cast<std::size_t>(lp) + 1]; ++j) {
          const ComplexVector vi = v.col(i);
          const ComplexVector vj = v.col(j);
          ComplexMatrix sym = inv_sqrt2 * (vi * vj.adjoint() + vj * vi.adjoint());
          ComplexMatrix anti = Complex(0, 1) * inv_sqrt2 * (vi * vj.adjoint() - vj * vi.adjoint());
          basis.push_back(HermitianOperator::symmetrized(std::move(sym), 1e-12));
          basis.push_back(HermitianOperator::symmetrized(std::move(anti), 1e-12));
        }
      }
    }
  }

  // Trace-balanced scalar shifts of the free blocks.
  std::vector<Eigen::Index> free_idx;
  for (Eigen::Index l = 0; l < spec.block_count(); ++l) {
    if (!sel.contains(l)) {
      free_idx.push_back(l);
    }
  }
  for (std::size_t f = 1; f < free_idx.size(); ++f) {
    const Eigen::Index l0 = free_idx[0];
    const Eigen::Index lf = free_idx[f];
    ComplexMatrix delta = ComplexMatrix::Zero(n, n);
    const double w0 = 1.0 / static_cast<double>(spec.block(l0).multiplicity);
    const double wf = 1.0 / static_cast<double>(spec.block(lf).multiplicity);
    delta += wf * spec.block(lf).projector();
    delta -= w0 * spec.block(l0).projector();
    delta /= delta.norm();
    basis.push_back(HermitianOperator::symmetrized(std::move(delta), 1e-12));
  }

  TangentBasisReport report;
  report.construction_dimension = static_cast<Eigen::Index>(basis.size());
  report.basis = std::move(basis);
  report.theorem_dimension = dfm_dimension(dfm_spec_from_selection(spec, sel));
  report.dimensions_agree = report.construction_dimension == report.theorem_dimension;
  return report;
}

}  // namespace qdfm
