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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qdfm/bloch_bilinear.hpp"
#include "qdfm/lindblad.hpp"
#include "qdfm/types.hpp"

namespace qdfm {

/// Operator expression over Pauli-product names: sums of optionally scaled
/// terms such as "ZI", "0.5 XI + 0.5 IX", "-1i*XY". Scalars may carry an 'i'
/// suffix for imaginary factors. Unknown tokens are rejected by name.
ComplexMatrix parse_operator_expr(const std::string& text, Eigen::Index n);

struct RateSpec {
  bool stochastic = false;
  double value = 0.0;
};

/// Declarative model document. Operator fields keep their source expressions
/// so a written file re-parses to an equal model.
struct ModelFile {
  Eigen::Index n = 0;
  std::string h0;  // empty means zero
  struct Control {
    std::string label;
    std::string op;
  };
  std::vector<Control> controls;
  struct Jump {
    std::string label;
    std::string op;
    RateSpec rate;
  };
  std::vector<Jump> jumps;
  /// Raw JSON of the optional initial-state field ("" when absent). Accepts
  /// "mixed", "pure:<qubit chars 0/1/+/->", "diag:v1,v2,...", or a matrix
  /// literal with [re, im] entries.
  std::string initial_state_json;
  std::optional<CoordinateMode> mode;
};

ModelFile parse_model_file(const std::string& json_text);
ModelFile load_model_file(const std::filesystem::path& path);
std::string write_model_file(const ModelFile& file);

LindbladModel to_lindblad_model(const ModelFile& file);

/// Initial state declared in the file; maximally mixed when absent.
DensityMatrix initial_state(const ModelFile& file);

bool has_stochastic_rates(const ModelFile& file);

/// Built-in models. "two-qubit-dephasing": two qubits under independent pure
/// dephasing with no internal Hamiltonian and full per-qubit control at
/// strength 1/2.
ModelFile preset_model(const std::string& name);
std::vector<std::string> preset_names();

/// 64-bit FNV-1a of a string, as 16 hex digits; used for config digests.
std::string fnv1a_hex(const std::string& text);

}  // namespace qdfm
