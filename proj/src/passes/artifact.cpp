#include <algorithm>

#include "demeasure/error.hpp"
#include "demeasure/ir_json.hpp"
#include "demeasure/passes.hpp"

namespace demeasure::passes {

using ir::Json;

const GroupWrite* AncillaMap::backing(std::size_t group, std::size_t origin_step) const {
  const GroupWrite* best = nullptr;
  for (const auto& w : groups) {
    if (w.group == group && w.origin_step < origin_step && (best == nullptr || w.origin_step >= best->origin_step)) {
      best = &w;
    }
  }
  return best;
}

bool AncillaMap::is_ancilla(std::size_t qubit) const {
  return std::any_of(qubits.begin(), qubits.end(), [qubit](const AncillaRecord& r) { return r.qubit == qubit; });
}

std::size_t CompiledArtifact::rus_attempts() const {
  std::size_t n = 1;
  for (const auto& r : ancilla_map.rus) n = std::max(n, r.copies);
  return n;
}

namespace {

Json map_to_json(const CompiledArtifact& a) {
  Json m = Json::object();
  m["original_qubits"] = a.original_qubits;
  m["classical_code_level"] = a.classical_code_level;
  Json qubits = Json::array();
  for (const auto& r : a.ancilla_map.qubits) {
    Json q = Json::object();
    q["qubit"] = r.qubit;
    q["pass"] = r.pass;
    q["origin_step"] = r.origin_step;
    q["role"] = r.role;
    if (r.group) q["group"] = *r.group;
    q["basis"] = r.basis;
    qubits.push_back(std::move(q));
  }
  m["qubits"] = std::move(qubits);
  Json groups = Json::array();
  for (const auto& g : a.ancilla_map.groups) {
    groups.push_back(
        Json{{"group", g.group}, {"origin_step", g.origin_step}, {"qubits", g.qubits}, {"outcomes", g.outcomes}});
  }
  m["groups"] = std::move(groups);
  Json rus = Json::array();
  for (const auto& r : a.ancilla_map.rus) {
    rus.push_back(Json{{"origin_step", r.origin_step},
                       {"copies", r.copies},
                       {"success_probability", r.success_probability},
                       {"failure_probability", r.failure_probability},
                       {"loaded_flag", r.loaded_flag},
                       {"dest", r.dest}});
  }
  m["rus"] = std::move(rus);
  return m;
}

template <typename T>
T get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("ancilla_map: missing key '") + key + "'", 0, 0);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("ancilla_map: bad value for '") + key + "'", 0, 0);
  }
}

}  // namespace

std::string serialize_artifact(const CompiledArtifact& a, bool include_timings) {
  Json j = ir::protocol_to_json(a.protocol);
  j["ancilla_map"] = map_to_json(a);
  if (include_timings) {
    Json t = Json::array();
    for (const auto& p : a.timings) t.push_back(Json{{"pass", p.pass}, {"milliseconds", p.milliseconds}});
    j["timings"] = std::move(t);
  }
  return ir::dump_json(j);
}

CompiledArtifact parse_artifact(std::string_view text) {
  const Json j = ir::parse_json_text(text);
  CompiledArtifact a;
  try {
    a.protocol = ir::protocol_from_json(j);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("malformed document: ") + e.what(), 0, 0);
  }
  a.original_qubits = a.protocol.registers.quantum_count;
  if (!j.contains("ancilla_map")) return a;
  const Json& m = j.at("ancilla_map");
  a.original_qubits = get<std::size_t>(m, "original_qubits");
  a.classical_code_level = get<std::size_t>(m, "classical_code_level");
  if (a.original_qubits > a.protocol.registers.quantum_count) {
    throw ParseError("ancilla_map: original_qubits exceeds the register", 0, 0, "/ancilla_map/original_qubits");
  }
  for (const Json& q : get<Json>(m, "qubits")) {
    AncillaRecord r;
    r.qubit = get<std::size_t>(q, "qubit");
    r.pass = get<std::string>(q, "pass");
    r.origin_step = get<std::size_t>(q, "origin_step");
    r.role = get<std::string>(q, "role");
    if (q.contains("group")) r.group = get<std::size_t>(q, "group");
    r.basis = get<std::string>(q, "basis");
    a.ancilla_map.qubits.push_back(std::move(r));
  }
  for (const Json& g : get<Json>(m, "groups")) {
    a.ancilla_map.groups.push_back({get<std::size_t>(g, "group"), get<std::size_t>(g, "origin_step"),
                                    get<std::vector<std::size_t>>(g, "qubits"), get<std::size_t>(g, "outcomes")});
  }
  for (const Json& r : get<Json>(m, "rus")) {
    a.ancilla_map.rus.push_back({get<std::size_t>(r, "origin_step"), get<std::size_t>(r, "copies"),
                                 get<double>(r, "success_probability"), get<double>(r, "failure_probability"),
                                 get<std::size_t>(r, "loaded_flag"), get<std::vector<std::size_t>>(r, "dest")});
  }
  return a;
}

}  // namespace demeasure::passes
