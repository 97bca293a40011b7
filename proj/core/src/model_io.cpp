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

#include "qdfm/model_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <unsupported/Eigen/KroneckerProduct>

namespace qdfm {

namespace {

using nlohmann::json;

struct ExprLexer {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
};

const ComplexMatrix& pauli_letter(char c) {
  static const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  static const ComplexMatrix sx = [] {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
  }();
  static const ComplexMatrix sy = [] {
    ComplexMatrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
  }();
  static const ComplexMatrix sz = [] {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
  }();
  switch (c) {
    case 'I':
      return id;
    case 'X':
      return sx;
    case 'Y':
      return sy;
    case 'Z':
      return sz;
  }
  throw ParseError(std::string("internal: bad pauli letter '") + c + "'");
}

}  // namespace

ComplexMatrix parse_operator_expr(const std::string& text, Eigen::Index n) {
  if (n < 2 || (n & (n - 1)) != 0) {
    throw ParseError("operator expressions require a power-of-two dimension");
  }
  int qubits = 0;
  while ((Eigen::Index{1} << qubits) < n) {
    ++qubits;
  }

  ComplexMatrix total = ComplexMatrix::Zero(n, n);
  ExprLexer lex{text};
  bool first = true;
  while (!lex.done()) {
    double sign = 1.0;
    const char c = lex.peek();
    if (c == '+' || c == '-') {
      sign = (c == '-') ? -1.0 : 1.0;
      ++lex.pos;
    } else if (!first) {
      throw ParseError("operator expression: expected '+' or '-' at position " +
                       std::to_string(lex.pos));
    }
    first = false;
    lex.skip_ws();

    // Optional scalar: a number, optionally suffixed with 'i', or a bare 'i'.
    Complex coef(sign, 0.0);
    bool have_coef = false;
    if (lex.pos < text.size()) {
      const char f = text[lex.pos];
      if (std::isdigit(static_cast<unsigned char>(f)) || f == '.') {
        const char* start = text.c_str() + lex.pos;
        char* end = nullptr;
        const double value = std::strtod(start, &end);
        if (end == start) {
          throw ParseError("operator expression: bad number at position " +
                           std::to_string(lex.pos));
        }
        lex.pos += static_cast<std::size_t>(end - start);
        if (lex.pos < text.size() && (text[lex.pos] == 'i' || text[lex.pos] == 'j')) {
          coef = Complex(0.0, sign * value);
          ++lex.pos;
        } else {
          coef = Complex(sign * value, 0.0);
        }
        have_coef = true;
      } else if ((f == 'i' || f == 'j') &&
                 (lex.pos + 1 >= text.size() ||
                  !std::isalpha(static_cast<unsigned char>(text[lex.pos + 1])))) {
        coef = Complex(0.0, sign);
        ++lex.pos;
        have_coef = true;
      }
    }
    if (have_coef) {
      lex.skip_ws();
      if (lex.pos < text.size() && text[lex.pos] == '*') {
        ++lex.pos;
        lex.skip_ws();
      }
    }

    std::size_t tok_start = lex.pos;
    while (lex.pos < text.size() &&
           std::isalnum(static_cast<unsigned char>(text[lex.pos]))) {
      ++lex.pos;
    }
    const std::string token = text.substr(tok_start, lex.pos - tok_start);
    if (token.empty()) {
      throw ParseError("operator expression: expected operator name at position " +
                       std::to_string(tok_start));
    }
    for (char letter : token) {
      if (letter != 'I' && letter != 'X' && letter != 'Y' && letter != 'Z') {
        throw ParseError("operator expression: unknown operator token '" + token + "'");
      }
    }
    if (static_cast<int>(token.size()) != qubits) {
      std::ostringstream os;
      os << "operator expression: token '" << token << "' has " << token.size()
         << " factors but the dimension " << n << " needs " << qubits;
      throw ParseError(os.str());
    }
    ComplexMatrix op = ComplexMatrix::Identity(1, 1);
    for (char letter : token) {
      op = Eigen::kroneckerProduct(op, pauli_letter(letter)).eval();
    }
    total += coef * op;
  }
  if (first) {
    throw ParseError("operator expression: empty expression");
  }
  return total;
}

namespace {

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

RateSpec parse_rate(const json& j, const std::string& label) {
  RateSpec rate;
  if (j.is_string()) {
    if (j.get<std::string>() != "stochastic") {
      throw ParseError("jump '" + label + "': rate must be a number or \"stochastic\"");
    }
    rate.stochastic = true;
    return rate;
  }
  if (!j.is_number()) {
    throw ParseError("jump '" + label + "': rate must be a number or \"stochastic\"");
  }
  rate.value = j.get<double>();
  if (rate.value < 0.0) {
    throw ParseError("jump '" + label + "': rate must be nonnegative");
  }
  return rate;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    static_cast<void>(value);
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace

ModelFile parse_model_file(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(json_text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream os;
    os << "model file: JSON syntax error at line " << line << ", column " << col;
    throw ParseError(os.str());
  }
  if (!doc.is_object()) {
    throw ParseError("model file: top level must be an object");
  }
  reject_unknown_keys(doc, {"n", "h0", "controls", "jumps", "initial_state", "mode"},
                      "model file");

  ModelFile file;
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw ParseError("model file: integer field 'n' is required");
  }
  file.n = doc["n"].get<Eigen::Index>();
  if (file.n < 2) {
    throw ParseError("model file: n must be >= 2");
  }
  if (doc.contains("h0")) {
    if (!doc["h0"].is_string()) {
      throw ParseError("model file: 'h0' must be an operator expression string");
    }
    file.h0 = doc["h0"].get<std::string>();
  }
  if (doc.contains("controls")) {
    if (!doc["controls"].is_array()) {
      throw ParseError("model file: 'controls' must be an array");
    }
    for (const auto& c : doc["controls"]) {
      reject_unknown_keys(c, {"label", "op"}, "control");
      if (!c.contains("label") || !c.contains("op")) {
        throw ParseError("model file: each control needs 'label' and 'op'");
      }
      file.controls.push_back({c["label"].get<std::string>(), c["op"].get<std::string>()});
    }
  }
  if (doc.contains("jumps")) {
    if (!doc["jumps"].is_array()) {
      throw ParseError("model file: 'jumps' must be an array");
    }
    for (const auto& j : doc["jumps"]) {
      reject_unknown_keys(j, {"label", "op", "rate"}, "jump");
      if (!j.contains("label") || !j.contains("op") || !j.contains("rate")) {
        throw ParseError("model file: each jump needs 'label', 'op' and 'rate'");
      }
      const std::string label = j["label"].get<std::string>();
      file.jumps.push_back({label, j["op"].get<std::string>(), parse_rate(j["rate"], label)});
    }
  }
  if (doc.contains("initial_state")) {
    file.initial_state_json = doc["initial_state"].dump();
  }
  if (doc.contains("mode")) {
    file.mode = coordinate_mode_from_string(doc["mode"].get<std::string>());
  }

  // Validate eagerly so errors carry file context rather than surfacing later.
  to_lindblad_model(file);
  if (!file.initial_state_json.empty()) {
    initial_state(file);
  }
  return file;
}

ModelFile load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open model file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model_file(buffer.str());
}

std::string write_model_file(const ModelFile& file) {
  json doc;
  doc["n"] = file.n;
  if (!file.h0.empty()) {
    doc["h0"] = file.h0;
  }
  json controls = json::array();
  for (const auto& c : file.controls) {
    controls.push_back({{"label", c.label}, {"op", c.op}});
  }
  if (!controls.empty()) {
    doc["controls"] = controls;
  }
  json jumps = json::array();
  for (const auto& j : file.jumps) {
    json entry = {{"label", j.label}, {"op", j.op}};
    if (j.rate.stochastic) {
      entry["rate"] = "stochastic";
    } else {
      entry["rate"] = j.rate.value;
    }
    jumps.push_back(entry);
  }
  if (!jumps.empty()) {
    doc["jumps"] = jumps;
  }
  if (!file.initial_state_json.empty()) {
    doc["initial_state"] = json::parse(file.initial_state_json);
  }
  if (file.mode.has_value()) {
    doc["mode"] = to_string(*file.mode);
  }
  return doc.dump(2);
}

LindbladModel to_lindblad_model(const ModelFile& file) {
  ComplexMatrix h0 = file.h0.empty() ? ComplexMatrix::Zero(file.n, file.n)
                                     : parse_operator_expr(file.h0, file.n);
  HermitianOperator h0_op(std::move(h0), 1e-12);

  std::vector<ControlTerm> controls;
  for (const auto& c : file.controls) {
    ComplexMatrix op = parse_operator_expr(c.op, file.n);
    if (hermiticity_defect(op) > 1e-12) {
      throw ParseError("control '" + c.label + "' is not Hermitian");
    }
    controls.push_back({c.label, HermitianOperator(std::move(op), 1e-12)});
  }

  std::vector<JumpTerm> jumps;
  for (const auto& j : file.jumps) {
    ComplexMatrix op = parse_operator_expr(j.op, file.n);
    // Stochastic rates carry no numeric value; unit rate is used wherever a
    // concrete signal is required (the reachability analysis ignores it).
    const double value = j.rate.stochastic ? 1.0 : j.rate.value;
    jumps.push_back({j.label, std::move(op), PiecewiseConstantSignal::constant(value)});
  }

  return LindbladModel(std::move(h0_op), std::move(controls), std::move(jumps));
}

DensityMatrix initial_state(const ModelFile& file) {
  if (file.initial_state_json.empty()) {
    return maximally_mixed(file.n);
  }
  const json j = json::parse(file.initial_state_json);

  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    if (text == "mixed") {
      return maximally_mixed(file.n);
    }
    if (text.rfind("pure:", 0) == 0) {
      const std::string spec = text.substr(5);
      int qubits = 0;
      while ((Eigen::Index{1} << qubits) < file.n) {
        ++qubits;
      }
      if (static_cast<int>(spec.size()) != qubits) {
        throw ParseError("initial_state: pure-state spec '" + spec + "' needs one character "
                         "per qubit");
      }
      ComplexVector psi = ComplexVector::Ones(1);
      for (char c : spec) {
        ComplexVector q(2);
        switch (c) {
          case '0':
            q << 1, 0;
            break;
          case '1':
            q << 0, 1;
            break;
          case '+':
            q << 1, 1;
            break;
          case '-':
            q << 1, -1;
            break;
          default:
            throw ParseError(std::string("initial_state: unknown qubit state '") + c + "'");
        }
        psi = Eigen::kroneckerProduct(psi, q).eval();
      }
      return pure_state(psi);
    }
    if (text.rfind("diag:", 0) == 0) {
      std::vector<double> values;
      std::stringstream ss(text.substr(5));
      std::string item;
      while (std::getline(ss, item, ',')) {
        values.push_back(std::stod(item));
      }
      if (static_cast<Eigen::Index>(values.size()) != file.n) {
        throw ParseError("initial_state: diag needs exactly n entries");
      }
      return diagonal_density(Eigen::Map<RealVector>(values.data(),
                                                     static_cast<Eigen::Index>(values.size())));
    }
    throw ParseError("initial_state: unknown named state '" + text + "'");
  }

  if (j.is_array()) {
    if (static_cast<Eigen::Index>(j.size()) != file.n) {
      throw ParseError("initial_state: matrix literal must have n rows");
    }
    ComplexMatrix m(file.n, file.n);
    for (Eigen::Index r = 0; r < file.n; ++r) {
      const json& row = j[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != file.n) {
        throw ParseError("initial_state: matrix literal must be n x n");
      }
      for (Eigen::Index c = 0; c < file.n; ++c) {
        const json& entry = row[static_cast<std::size_t>(c)];
        if (entry.is_number()) {
          m(r, c) = Complex(entry.get<double>(), 0.0);
        } else if (entry.is_array() && entry.size() == 2) {
          m(r, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
        } else {
          throw ParseError("initial_state: entries must be numbers or [re, im] pairs");
        }
      }
    }
    return DensityMatrix::from_matrix(m);
  }
  throw ParseError("initial_state: must be a string or a matrix literal");
}

bool has_stochastic_rates(const ModelFile& file) {
  for (const auto& j : file.jumps) {
    if (j.rate.stochastic) {
      return true;
    }
  }
  return false;
}

ModelFile preset_model(const std::string& name) {
  if (name == "two-qubit-dephasing") {
    ModelFile file;
    file.n = 4;
    file.h0 = "";
    file.controls = {{"x1", "0.5 XI"}, {"y1", "0.5 YI"}, {"z1", "0.5 ZI"},
                     {"x2", "0.5 IX"}, {"y2", "0.5 IY"}, {"z2", "0.5 IZ"}};
    file.jumps = {{"Z1", "ZI", {false, 1.0}}, {"Z2", "IZ", {false, 1.0}}};
    file.initial_state_json = "\"diag:0.4,0.3,0.2,0.1\"";
    file.mode = CoordinateMode::kDiagGapsTrace;
    return file;
  }
  throw ParseError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"two-qubit-dephasing"};
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

}  // namespace qdfm
