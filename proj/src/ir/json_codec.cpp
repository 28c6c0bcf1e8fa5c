#include <algorithm>
#include <cmath>

#include "demeasure/error.hpp"
#include "demeasure/ir_json.hpp"

namespace demeasure::ir {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what, 0, 0, path);
}

const Json& field(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing key '") + key + "'");
  return *it;
}

const Json* optional_field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::size_t as_index(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer()) {
    if (j.get<long long>() < 0) fail(path, "expected a non-negative integer");
    return static_cast<std::size_t>(j.get<long long>());
  }
  fail(path, "expected a non-negative integer");
}

std::vector<std::size_t> as_index_list(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of indices");
  std::vector<std::size_t> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_index(j[i], path + "/" + std::to_string(i)));
  return out;
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

void expect_dim(const ComplexMatrix& m, std::size_t rows, std::size_t cols, const std::string& path) {
  if (m.rows() != rows || m.cols() != cols) {
    fail(path, "dimension mismatch: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                   ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

std::size_t qubit_dim(std::size_t qubits, const std::string& path) {
  if (qubits >= 32) fail(path, "too many qubits for one operation");
  return std::size_t{1} << qubits;
}

Gate gate_from_json(const Json& obj, std::size_t arity, const std::string& path) {
  const std::string name = as_string(field(obj, "gate", path), path + "/gate");
  const std::size_t dim = qubit_dim(arity, path);
  if (name == "matrix") {
    ComplexMatrix m = matrix_from_json(field(obj, "matrix", path), path + "/matrix");
    expect_dim(m, dim, dim, path + "/matrix");
    return Gate::literal(std::move(m));
  }
  auto m = named_gate_matrix(name);
  if (!m) fail(path + "/gate", "unknown gate name '" + name + "'");
  if (m->rows() != dim) {
    fail(path, "dimension mismatch: gate '" + name + "' acts on " +
                   std::to_string(static_cast<int>(std::log2(static_cast<double>(m->rows())))) + " qubit(s), " +
                   std::to_string(arity) + " target(s) given");
  }
  return Gate::named(name);
}

void gate_to_json(Json& obj, const Gate& g) {
  obj["gate"] = g.name;
  if (g.is_literal()) obj["matrix"] = matrix_to_json(g.matrix);
}

GateStep gate_step_from_json(const Json& obj, const std::string& path) {
  GateStep s;
  s.targets = as_index_list(field(obj, "targets", path), path + "/targets");
  s.gate = gate_from_json(obj, s.targets.size(), path);
  if (const Json* c = optional_field(obj, "controls")) s.controls = as_index_list(*c, path + "/controls");
  if (const Json* v = optional_field(obj, "control_values")) {
    for (std::size_t x : as_index_list(*v, path + "/control_values")) s.control_values.push_back(static_cast<int>(x));
    if (s.control_values.size() != s.controls.size()) {
      fail(path + "/control_values", "dimension mismatch: one value per control required");
    }
  } else {
    s.control_values.assign(s.controls.size(), 1);
  }
  if (const Json* c = optional_field(obj, "condition")) {
    ClassicalCondition cond;
    cond.group = as_index(field(*c, "group", path + "/condition"), path + "/condition/group");
    cond.value = as_index(field(*c, "value", path + "/condition"), path + "/condition/value");
    s.condition = cond;
  }
  return s;
}

Json gate_step_to_json(const GateStep& s) {
  Json j;
  j["kind"] = "gate";
  gate_to_json(j, s.gate);
  j["targets"] = s.targets;
  if (!s.controls.empty()) {
    j["controls"] = s.controls;
    j["control_values"] = s.control_values;
  }
  if (s.condition) j["condition"] = Json{{"group", s.condition->group}, {"value", s.condition->value}};
  return j;
}

Step step_from_json(const Json& obj, const std::string& path) {
  const std::string kind = as_string(field(obj, "kind", path), path + "/kind");
  if (kind == "gate") return gate_step_from_json(obj, path);
  if (kind == "measure") {
    MeasureStep s;
    s.op_table = as_string(field(obj, "op_table", path), path + "/op_table");
    s.targets = as_index_list(field(obj, "targets", path), path + "/targets");
    s.result = as_index(field(obj, "result", path), path + "/result");
    return s;
  }
  if (kind == "feedback") {
    FeedbackStep s;
    s.source = as_index(field(obj, "source", path), path + "/source");
    s.targets = as_index_list(field(obj, "targets", path), path + "/targets");
    const Json& table = field(obj, "table", path);
    if (!table.is_array()) fail(path + "/table", "expected an array");
    for (std::size_t i = 0; i < table.size(); ++i) {
      const std::string epath = path + "/table/" + std::to_string(i);
      FeedbackEntry e;
      e.outcome = as_index(field(table[i], "outcome", epath), epath + "/outcome");
      e.gate = gate_from_json(table[i], s.targets.size(), epath);
      s.table.push_back(std::move(e));
    }
    return s;
  }
  if (kind == "reset") {
    ResetStep s;
    s.targets = as_index_list(field(obj, "targets", path), path + "/targets");
    s.goal = matrix_from_json(field(obj, "goal", path), path + "/goal");
    expect_dim(s.goal, qubit_dim(s.targets.size(), path), 1, path + "/goal");
    return s;
  }
  if (kind == "dephase") {
    DephaseStep s;
    s.targets = as_index_list(field(obj, "targets", path), path + "/targets");
    if (const Json* b = optional_field(obj, "basis")) {
      ComplexMatrix m = matrix_from_json(*b, path + "/basis");
      const std::size_t dim = qubit_dim(s.targets.size(), path);
      expect_dim(m, dim, dim, path + "/basis");
      s.basis = std::move(m);
    }
    return s;
  }
  if (kind == "rus") {
    RusBlock s;
    s.workspace_qubits = as_index(field(obj, "workspace", path), path + "/workspace");
    const Json& prep = field(obj, "prepare", path);
    if (!prep.is_array()) fail(path + "/prepare", "expected an array of gate steps");
    for (std::size_t i = 0; i < prep.size(); ++i) {
      const std::string ppath = path + "/prepare/" + std::to_string(i);
      if (as_string(field(prep[i], "kind", ppath), ppath + "/kind") != "gate") {
        fail(ppath + "/kind", "prepare sub-protocols may only contain gate steps");
      }
      s.prepare.push_back(gate_step_from_json(prep[i], ppath));
    }
    const Json& check = field(obj, "check", path);
    s.check_table = as_string(field(check, "op_table", path + "/check"), path + "/check/op_table");
    s.check_targets = as_index_list(field(check, "targets", path + "/check"), path + "/check/targets");
    s.success = as_index_list(field(obj, "success", path), path + "/success");
    s.output = as_index_list(field(obj, "output", path), path + "/output");
    s.dest = as_index_list(field(obj, "dest", path), path + "/dest");
    s.result = as_index(field(obj, "result", path), path + "/result");
    return s;
  }
  fail(path + "/kind", "unknown step kind '" + kind + "'");
}

Json step_to_json(const Step& step) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        Json j;
        if constexpr (std::is_same_v<T, GateStep>) {
          return gate_step_to_json(s);
        } else if constexpr (std::is_same_v<T, MeasureStep>) {
          j["kind"] = "measure";
          j["op_table"] = s.op_table;
          j["targets"] = s.targets;
          j["result"] = s.result;
        } else if constexpr (std::is_same_v<T, FeedbackStep>) {
          j["kind"] = "feedback";
          j["source"] = s.source;
          j["targets"] = s.targets;
          Json table = Json::array();
          for (const auto& e : s.table) {
            Json entry;
            entry["outcome"] = e.outcome;
            gate_to_json(entry, e.gate);
            table.push_back(std::move(entry));
          }
          j["table"] = std::move(table);
        } else if constexpr (std::is_same_v<T, ResetStep>) {
          j["kind"] = "reset";
          j["targets"] = s.targets;
          j["goal"] = matrix_to_json(s.goal);
        } else if constexpr (std::is_same_v<T, DephaseStep>) {
          j["kind"] = "dephase";
          j["targets"] = s.targets;
          if (s.basis) j["basis"] = matrix_to_json(*s.basis);
        } else {
          j["kind"] = "rus";
          j["workspace"] = s.workspace_qubits;
          Json prep = Json::array();
          for (const auto& g : s.prepare) prep.push_back(gate_step_to_json(g));
          j["prepare"] = std::move(prep);
          j["check"] = Json{{"op_table", s.check_table}, {"targets", s.check_targets}};
          j["success"] = s.success;
          j["output"] = s.output;
          j["dest"] = s.dest;
          j["result"] = s.result;
        }
        return j;
      },
      step);
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) fail(path + "/0", "expected a non-empty row of [re, im] pairs");
  const std::size_t cols = j[0].size();
  std::vector<Complex> data;
  data.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rpath = path + "/" + std::to_string(r);
    if (!j[r].is_array()) fail(rpath, "expected a row array");
    if (j[r].size() != cols) fail(rpath, "dimension mismatch: ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string epath = rpath + "/" + std::to_string(c);
      const Json& e = j[r][c];
      if (!e.is_array() || e.size() != 2) fail(epath, "expected a [re, im] pair");
      const double re = as_number(e[0], epath + "/0");
      const double im = as_number(e[1], epath + "/1");
      if (!std::isfinite(re) || !std::isfinite(im)) fail(epath, "non-finite matrix entry");
      data.emplace_back(re, im);
    }
  }
  return ComplexMatrix(rows, cols, std::move(data));
}

Json protocol_to_json(const Protocol& p) {
  Json j;
  j["ir_version"] = kIrVersion;
  Json meta = Json::object();
  for (const auto& [k, v] : p.metadata) meta[k] = v;
  j["metadata"] = std::move(meta);
  j["registers"] = Json{{"qubits", p.registers.quantum_count}, {"classical", p.registers.classical_count}};
  Json tables = Json::object();
  for (const auto& [name, set] : p.op_tables) {
    Json ops = Json::array();
    for (const auto& a : set.ops) ops.push_back(matrix_to_json(a));
    tables[name] = Json{{"dim", set.dim}, {"ops", std::move(ops)}};
  }
  j["op_tables"] = std::move(tables);
  Json steps = Json::array();
  for (const auto& s : p.steps) steps.push_back(step_to_json(s));
  j["steps"] = std::move(steps);
  return j;
}

Protocol protocol_from_json(const Json& j) {
  if (!j.is_object()) fail("", "document must be an object");
  const Json& version = field(j, "ir_version", "");
  if (!version.is_number_integer() || version.get<long long>() != kIrVersion) {
    fail("/ir_version", "unsupported ir_version (expected " + std::to_string(kIrVersion) + ")");
  }
  Protocol p;
  const Json& regs = field(j, "registers", "");
  p.registers.quantum_count = as_index(field(regs, "qubits", "/registers"), "/registers/qubits");
  p.registers.classical_count = as_index(field(regs, "classical", "/registers"), "/registers/classical");
  if (const Json* meta = optional_field(j, "metadata")) {
    if (!meta->is_object()) fail("/metadata", "expected an object");
    for (auto it = meta->begin(); it != meta->end(); ++it) {
      p.metadata[it.key()] = as_string(it.value(), "/metadata/" + it.key());
    }
  }
  if (const Json* tables = optional_field(j, "op_tables")) {
    if (!tables->is_object()) fail("/op_tables", "expected an object");
    for (auto it = tables->begin(); it != tables->end(); ++it) {
      const std::string tpath = "/op_tables/" + it.key();
      MeasurementOpSet set;
      set.dim = as_index(field(it.value(), "dim", tpath), tpath + "/dim");
      const Json& ops = field(it.value(), "ops", tpath);
      if (!ops.is_array()) fail(tpath + "/ops", "expected an array of matrices");
      for (std::size_t n = 0; n < ops.size(); ++n) {
        const std::string opath = tpath + "/ops/" + std::to_string(n);
        ComplexMatrix a = matrix_from_json(ops[n], opath);
        expect_dim(a, set.dim, set.dim, opath);
        set.ops.push_back(std::move(a));
      }
      p.op_tables.emplace(it.key(), std::move(set));
    }
  }
  const Json& steps = field(j, "steps", "");
  if (!steps.is_array()) fail("/steps", "expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    p.steps.push_back(step_from_json(steps[i], "/steps/" + std::to_string(i)));
  }
  return p;
}

Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         e.what(),
                     line, column);
  } catch (const nlohmann::json::exception& e) {
    // e.g. numbers out of range
    throw ParseError(std::string("malformed document: ") + e.what(), 0, 0);
  }
}

namespace {

bool flat(const Json& j, int depth) {
  if (!j.is_structured()) return true;
  if (depth == 0 || !j.is_array()) return false;
  return std::all_of(j.begin(), j.end(), [depth](const Json& e) { return flat(e, depth - 1); });
}

// Arrays of scalars, and arrays of such arrays (matrix rows), stay on one
// line; everything else is indented by two spaces per level.
void write(std::string& out, const Json& j, std::size_t indent) {
  if (flat(j, 2)) {
    if (!j.is_array()) {
      out += j.dump();
      return;
    }
    out += '[';
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ", ";
      write(out, j[i], indent);
    }
    out += ']';
    return;
  }
  const bool object = j.is_object();
  if (j.empty()) {
    out += object ? "{}" : "[]";
    return;
  }
  out += object ? "{\n" : "[\n";
  const std::string pad(indent + 2, ' ');
  std::size_t i = 0;
  for (auto it = j.begin(); it != j.end(); ++it, ++i) {
    if (i) out += ",\n";
    out += pad;
    if (object) out += Json(it.key()).dump() + ": ";
    write(out, it.value(), indent + 2);
  }
  out += '\n';
  out += std::string(indent, ' ');
  out += object ? '}' : ']';
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  write(out, j, 0);
  out += '\n';
  return out;
}

Protocol parse_protocol(std::string_view text) {
  const Json j = parse_json_text(text);
  try {
    return protocol_from_json(j);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("malformed document: ") + e.what(), 0, 0);
  }
}

std::string serialize_protocol(const Protocol& p) { return dump_json(protocol_to_json(p)); }

}  // namespace demeasure::ir
