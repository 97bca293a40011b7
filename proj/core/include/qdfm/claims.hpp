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

struct ClaimResult {
  std::string name;
  bool passed = false;
  /// Informational claims are reported but do not fail the suite.
  bool informational = false;
  std::string details;
};

struct ClaimSuite {
  std::string preset;
  std::vector<ClaimResult> claims;

  bool all_passed() const;
};

/// Structural and numerical checks for a built-in preset: the n = 4 manifold
/// dimension table, reachability dimensions under both rate variants across
/// tolerances and coordinate modes, absence of degree-0 generators, control
/// matrix commutation relations, dissipator diagonality and the
/// skew-symmetry pattern of the control matrices.
ClaimSuite run_preset_claims(const std::string& preset_name);

std::string claims_to_text(const ClaimSuite& suite);
std::string claims_to_json(const ClaimSuite& suite);

}  // namespace qdfm
