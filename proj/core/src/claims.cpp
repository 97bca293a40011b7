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

#include "qdfm/claims.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "qdfm/bloch_bilinear.hpp"
#include "qdfm/dfm_geometry.hpp"
#include "qdfm/model_io.hpp"
#include "qdfm/reachability.hpp"

namespace qdfm {

bool ClaimSuite::all_passed() const {
  return std::all_of(claims.begin(), claims.end(),
                     [](const ClaimResult& c) { return c.passed || c.informational; });
}

namespace {

std::string format_blocks(const std::vector<int>& blocks) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    os << (i ? "," : "") << blocks[i];
  }
  os << "}";
  return os.str();
}

ClaimResult check_dimension_table() {
  const std::vector<DfmTableRow> expected = {
      {{1}, {1, 1, 1}, 14}, {{1}, {1, 2}, 12},    {{1}, {3}, 8},    {{1, 1}, {1, 1}, 13},
      {{1, 1}, {2}, 11},    {{2}, {1, 1}, 11},    {{2}, {2}, 9},    {{1, 1, 1, 1}, {}, 12},
      {{1, 1, 2}, {}, 10},  {{2, 2}, {}, 8},      {{1, 3}, {}, 6},  {{4}, {}, 0}};
  const auto rows = table_generate(4);

  ClaimResult claim;
  claim.name = "dfm-dimension-table-n4";
  claim.passed = rows.size() == expected.size();
  std::ostringstream details;
  details << rows.size() << " rows";
  if (claim.passed) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].preserved != expected[i].preserved ||
          rows[i].free_blocks != expected[i].free_blocks ||
          rows[i].dimension != expected[i].dimension) {
        claim.passed = false;
        details << "; mismatch at row " << i << ": got " << format_blocks(rows[i].preserved)
                << " " << format_blocks(rows[i].free_blocks) << " -> " << rows[i].dimension;
        break;
      }
    }
  }
  if (claim.passed) {
    details << ", all dimensions match";
  }
  claim.details = details.str();
  return claim;
}

struct PresetModels {
  BilinearModel trace_mode;
  BilinearModel pauli_mode;
};

ClaimResult check_reach_dimension(const PresetModels& models, bool stochastic, int expected_dim) {
  ClaimResult claim;
  claim.name = stochastic ? "reachability-dim-independent-rates"
                          : "reachability-dim-equal-constant-rates";
  claim.passed = true;
  std::ostringstream details;
  const double tols[] = {1e-11, 1e-9, 1e-7};
  for (const BilinearModel* bm : {&models.trace_mode, &models.pauli_mode}) {
    for (double tol : tols) {
      ClosureOptions options;
      options.rank_tol = tol;
      const RateVariant variant =
          stochastic ? RateVariant::stochastic()
                     : RateVariant::constant(RealVector::Ones(
                           static_cast<Eigen::Index>(bm->dissipators().size())));
      const ClosureReport report = reachability_distribution(*bm, variant, options);
      if (!report.stabilized || report.dimension() != expected_dim) {
        claim.passed = false;
      }
      details << to_string(bm->mode()) << "@" << tol << " -> " << report.dimension() << "; ";
    }
  }
  details << "expected " << expected_dim;
  claim.details = details.str();
  return claim;
}

ClaimResult check_degree0(const BilinearModel& bm) {
  ClaimResult claim;
  claim.name = "no-degree0-generator";
  const Degree0Result result = degree0_check(bm.drift(), bm.controls());
  claim.passed = result.empty();
  std::ostringstream details;
  if (result.empty()) {
    details << "no common real eigenvector of the drift and control matrices";
  } else {
    details << "found joint eigenspaces of total dimension " << result.total_dimension();
  }
  claim.details = details.str();
  return claim;
}

ClaimResult check_commutators(const BilinearModel& bm) {
  ClaimResult claim;
  claim.name = "control-commutator-cyclic";
  claim.passed = true;
  double worst = 0.0;
  // Controls are ordered x1, y1, z1, x2, y2, z2.
  const int cyc[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (const auto& abc : cyc) {
        const RealMatrix& ba = bm.controls()[static_cast<std::size_t>(3 * i + abc[0])];
        const RealMatrix& bb = bm.controls()[static_cast<std::size_t>(3 * j + abc[1])];
        const RealMatrix bracket = ba * bb - bb * ba;
        RealMatrix expected = RealMatrix::Zero(bm.coord_dim(), bm.coord_dim());
        if (i == j) {
          expected = bm.controls()[static_cast<std::size_t>(3 * i + abc[2])];
        }
        worst = std::max(worst, max_abs(bracket - expected));
      }
    }
  }
  claim.passed = worst <= 1e-12;
  std::ostringstream details;
  details << "max deviation " << worst << " (tolerance 1e-12)";
  claim.details = details.str();
  return claim;
}

ClaimResult check_dissipators_diagonal(const BilinearModel& bm) {
  ClaimResult claim;
  claim.name = "dissipators-diagonal";
  double worst = 0.0;
  for (const auto& g : bm.dissipators()) {
    RealMatrix off = g;
    off.diagonal().setZero();
    worst = std::max(worst, max_abs(off));
  }
  claim.passed = worst <= 1e-12;
  std::ostringstream details;
  details << "max off-diagonal entry " << worst << " in " << to_string(bm.mode())
          << " coordinates";
  claim.details = details.str();
  return claim;
}

double skew_defect(const RealMatrix& m) {
  return max_abs(m + m.transpose().eval());
}

ClaimResult check_skew_pattern(const PresetModels& models) {
  ClaimResult claim;
  claim.name = "control-skew-pattern";
  claim.informational = true;

  auto pattern = [&](const BilinearModel& bm, std::ostringstream& os) {
    bool ok = true;
    for (int i = 0; i < 2; ++i) {
      const double dx = skew_defect(bm.controls()[static_cast<std::size_t>(3 * i + 0)]);
      const double dy = skew_defect(bm.controls()[static_cast<std::size_t>(3 * i + 1)]);
      const double dz = skew_defect(bm.controls()[static_cast<std::size_t>(3 * i + 2)]);
      ok = ok && dz <= 1e-12 && dx > 1e-6 && dy > 1e-6;
      os << "qubit " << (i + 1) << ": skew defects x=" << dx << " y=" << dy << " z=" << dz
         << "; ";
    }
    return ok;
  };

  std::ostringstream details;
  details << "expected z skew-symmetric, x/y not, in " << to_string(models.trace_mode.mode())
          << " coordinates: ";
  claim.passed = pattern(models.trace_mode, details);
  if (!claim.passed) {
    details << "| " << to_string(models.pauli_mode.mode()) << " coordinates: ";
    pattern(models.pauli_mode, details);
  }
  claim.details = details.str();
  return claim;
}

}  // namespace

ClaimSuite run_preset_claims(const std::string& preset_name) {
  const ModelFile file = preset_model(preset_name);
  const LindbladModel model = to_lindblad_model(file);

  const PresetModels models{build_bilinear(model, CoordinateMode::kDiagGapsTrace),
                            build_bilinear(model, CoordinateMode::kPauli)};

  ClaimSuite suite;
  suite.preset = preset_name;
  suite.claims.push_back(check_dimension_table());
  suite.claims.push_back(check_reach_dimension(models, /*stochastic=*/true, 10));
  suite.claims.push_back(check_reach_dimension(models, /*stochastic=*/false, 9));
  suite.claims.push_back(check_degree0(models.trace_mode));
  suite.claims.push_back(check_commutators(models.trace_mode));
  suite.claims.push_back(check_dissipators_diagonal(models.trace_mode));
  suite.claims.push_back(check_skew_pattern(models));
  return suite;
}

std::string claims_to_text(const ClaimSuite& suite) {
  std::ostringstream os;
  os << "claim checks for preset '" << suite.preset << "'\n";
  for (const auto& c : suite.claims) {
    os << (c.passed ? "PASS" : "FAIL") << (c.informational ? " (informational)" : "") << " "
       << c.name << ": " << c.details << "\n";
  }
  os << (suite.all_passed() ? "all claims passed" : "some claims FAILED") << "\n";
  return os.str();
}

std::string claims_to_json(const ClaimSuite& suite) {
  nlohmann::json doc;
  doc["preset"] = suite.preset;
  doc["all_passed"] = suite.all_passed();
  nlohmann::json claims = nlohmann::json::array();
  for (const auto& c : suite.claims) {
    claims.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"informational", c.informational},
                      {"details", c.details}});
  }
  doc["claims"] = claims;
  return doc.dump(2);
}

}  // namespace qdfm
