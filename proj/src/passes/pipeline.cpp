#include <algorithm>
#include <charconv>
#include <chrono>
#include <set>
#include <string>

#include "common.hpp"
#include "demeasure/error.hpp"
#include "demeasure/passes.hpp"

namespace demeasure::passes {

namespace {

struct KnownPass {
  std::string_view name;
  std::vector<std::string_view> keys;
};

const std::vector<KnownPass>& known_passes() {
  static const std::vector<KnownPass> passes = {
      {"dilate", {}},        {"feedback", {}}, {"control-lift", {}},
      {"reset", {}},         {"rus-static", {"N"}}, {"dephase", {"at"}},
  };
  return passes;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::size_t copies_option(const PassSpec& spec, std::size_t fallback) {
  const auto it = spec.options.find("N");
  std::size_t n = fallback;
  if (it != spec.options.end()) {
    const std::string& text = it->second;
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw PassError("rus-static", "N must be an integer, got '" + text + "'");
    }
    if (value < 1) throw PassError("rus-static", "N must be ≥ 1");
    n = static_cast<std::size_t>(value);
  }
  if (n < 1) throw PassError("rus-static", "N must be ≥ 1");
  return n;
}

std::string dephase_placement(const PassSpec& spec) {
  const auto it = spec.options.find("at");
  if (it == spec.options.end()) return "end";
  if (it->second != "end" && it->second != "measure") {
    throw PassError("dephase", "option at must be 'end' or 'measure', got '" + it->second + "'");
  }
  return it->second;
}

// The protocol being rewritten, with each step's index in the source
// protocol so classical reads can find the write that precedes them.
struct State {
  ir::Protocol p;
  std::vector<std::size_t> origin;
  std::vector<std::vector<std::size_t>> readout;  // ancillas written by a dilation step
  AncillaMap map;
  std::size_t cap = 0;
};

std::vector<std::size_t> allocate(State& st, std::size_t count, const std::string& pass, std::size_t origin,
                                  const std::string& role, std::optional<std::size_t> group = std::nullopt) {
  const std::size_t first = st.p.registers.quantum_count;
  if (first + count > st.cap) {
    throw ResourceError(pass + ": compiled register would need " + std::to_string(first + count) +
                        " qubits, cap is " + std::to_string(st.cap));
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(first + i);
    st.map.qubits.push_back({first + i, pass, origin, role, group, "computational"});
  }
  st.p.registers.quantum_count += count;
  return out;
}

const GroupWrite& require_backing(const State& st, const std::string& pass, std::size_t group, std::size_t origin) {
  const GroupWrite* w = st.map.backing(group, origin);
  if (w == nullptr) {
    throw PassError(pass, "bit-group " + std::to_string(group) + " read by step " + std::to_string(origin) +
                              " has no ancilla backing (run dilate or rus-static first)");
  }
  return *w;
}

// Rewrites each step for which `fn` returns a replacement list.
template <typename Fn>
void rewrite(State& st, Fn&& fn) {
  std::vector<ir::Step> steps;
  std::vector<std::size_t> origin;
  std::vector<std::vector<std::size_t>> readout;
  for (std::size_t i = 0; i < st.p.steps.size(); ++i) {
    std::vector<std::size_t> produced_readout;
    std::optional<std::vector<ir::Step>> replacement = fn(st.p.steps[i], st.origin[i], produced_readout);
    if (!replacement) {
      steps.push_back(std::move(st.p.steps[i]));
      origin.push_back(st.origin[i]);
      readout.push_back(std::move(st.readout[i]));
      continue;
    }
    for (std::size_t k = 0; k < replacement->size(); ++k) {
      steps.push_back(std::move((*replacement)[k]));
      origin.push_back(st.origin[i]);
      readout.push_back(k == 0 ? produced_readout : std::vector<std::size_t>{});
    }
  }
  st.p.steps = std::move(steps);
  st.origin = std::move(origin);
  st.readout = std::move(readout);
}

using Replacement = std::optional<std::vector<ir::Step>>;

void run_dilate(State& st, const PassOptions& opts) {
  rewrite(st, [&](ir::Step& s, std::size_t origin, std::vector<std::size_t>& readout) -> Replacement {
    auto* m = std::get_if<ir::MeasureStep>(&s);
    if (m == nullptr) return std::nullopt;
    const auto& table = st.p.op_tables.at(m->op_table);
    Dilation dil = [&] {
      try {
        return dilate_measurement(table, Completion::seeded(opts.completion_seed));
      } catch (const InvariantError& e) {
        throw PassError("dilate", "step " + std::to_string(origin) + ": " + e.what());
      }
    }();
    const auto anc = allocate(st, dil.ancilla_qubits, "dilate", origin, "outcome", m->result);
    st.map.groups.push_back({m->result, origin, anc, dil.outcomes});
    ir::GateStep g{ir::Gate::literal(dil.unitary.matrix()), m->targets, {}, {}, {}};
    g.targets.insert(g.targets.end(), anc.begin(), anc.end());
    readout = anc;
    return std::vector<ir::Step>{std::move(g)};
  });
}

void run_feedback(State& st) {
  rewrite(st, [&](ir::Step& s, std::size_t origin, std::vector<std::size_t>&) -> Replacement {
    auto* f = std::get_if<ir::FeedbackStep>(&s);
    if (f == nullptr) return std::nullopt;
    const GroupWrite& w = require_backing(st, "feedback", f->source, origin);
    const std::size_t dim = std::size_t{1} << f->targets.size();
    std::vector<std::optional<ComplexMatrix>> by_outcome(w.outcomes);
    for (const auto& e : f->table) {
      if (e.outcome >= w.outcomes) {
        throw PassError("feedback", "step " + std::to_string(origin) + ": outcome " + std::to_string(e.outcome) +
                                        " is out of range");
      }
      by_outcome[e.outcome] = ir::gate_matrix(e.gate);
    }
    std::vector<ComplexMatrix> table;
    for (std::size_t n = 0; n < w.outcomes; ++n) {
      if (!by_outcome[n]) {
        throw PassError("feedback", "step " + std::to_string(origin) + ": incomplete feedback table (missing outcome " +
                                        std::to_string(n) + ")");
      }
      table.push_back(std::move(*by_outcome[n]));
    }
    const UnitaryMatrix lifted = lift_feedback(table, w.outcomes, dim);
    ir::GateStep g{ir::Gate::literal(lifted.matrix()), f->targets, {}, {}, {}};
    g.targets.insert(g.targets.end(), w.qubits.begin(), w.qubits.end());
    return std::vector<ir::Step>{std::move(g)};
  });
}

void run_control_lift(State& st) {
  rewrite(st, [&](ir::Step& s, std::size_t origin, std::vector<std::size_t>&) -> Replacement {
    auto* g = std::get_if<ir::GateStep>(&s);
    if (g == nullptr || !g->condition) return std::nullopt;
    const GroupWrite& w = require_backing(st, "control-lift", g->condition->group, origin);
    return std::vector<ir::Step>{coherent_control_lift(*g, w)};
  });
}

void run_reset(State& st, const PassOptions& opts) {
  rewrite(st, [&](ir::Step& s, std::size_t origin, std::vector<std::size_t>&) -> Replacement {
    auto* r = std::get_if<ir::ResetStep>(&s);
    if (r == nullptr) return std::nullopt;
    ResetSwap rs = [&] {
      try {
        return build_reset_swap(r->goal, std::nullopt, Completion::seeded(opts.completion_seed));
      } catch (const Error& e) {
        throw PassError("reset", "step " + std::to_string(origin) + ": " + e.what());
      }
    }();
    const auto aux = allocate(st, r->targets.size(), "reset", origin, "reset-auxiliary");
    ir::GateStep g{ir::Gate::literal(rs.swap.matrix()), r->targets, {}, {}, {}};
    g.targets.insert(g.targets.end(), aux.begin(), aux.end());
    return std::vector<ir::Step>{std::move(g)};
  });
}

void run_rus_static(State& st, const PassSpec& spec, const PassOptions& opts) {
  const std::size_t copies = copies_option(spec, opts.rus_copies);
  rewrite(st, [&](ir::Step& s, std::size_t origin, std::vector<std::size_t>&) -> Replacement {
    auto* b = std::get_if<ir::RusBlock>(&s);
    if (b == nullptr) return std::nullopt;
    const auto& check = st.p.op_tables.at(b->check_table);
    const std::size_t first = st.p.registers.quantum_count;
    RusUnrolled u = unroll_rus_static(*b, check, copies, first, Completion::seeded(opts.completion_seed));
    const std::size_t used = u.copies.back().flag + 1 - first;
    if (first + used > st.cap) {
      throw ResourceError("rus-static: " + std::to_string(copies) + " copies need " + std::to_string(first + used) +
                          " qubits, cap is " + std::to_string(st.cap));
    }
    for (const RusCopy& c : u.copies) {
      for (std::size_t q : c.workspace) st.map.qubits.push_back({q, "rus-static", origin, "rus-workspace", {}, "computational"});
      for (std::size_t q : c.check) st.map.qubits.push_back({q, "rus-static", origin, "rus-check", {}, "computational"});
      if (c.indicator) {
        st.map.qubits.push_back({*c.indicator, "rus-static", origin, "rus-indicator", {}, "computational"});
      }
      st.map.qubits.push_back({c.flag, "rus-static", origin, "rus-flag", b->result, "computational"});
    }
    st.p.registers.quantum_count = first + used;
    const std::size_t loaded = u.copies.back().flag;
    st.map.groups.push_back({b->result, origin, {loaded}, 2});
    st.map.rus.push_back({origin, copies, u.success_probability, u.failure_probability, loaded, b->dest});
    return std::move(u.steps);
  });
}

void run_dephase(State& st, const PassSpec& spec) {
  if (dephase_placement(spec) == "measure") {
    std::vector<ir::Step> steps;
    std::vector<std::size_t> origin;
    std::vector<std::vector<std::size_t>> readout;
    for (std::size_t i = 0; i < st.p.steps.size(); ++i) {
      steps.push_back(std::move(st.p.steps[i]));
      origin.push_back(st.origin[i]);
      readout.emplace_back();
      if (!st.readout[i].empty()) {
        steps.emplace_back(ir::DephaseStep{st.readout[i], std::nullopt});
        origin.push_back(st.origin[i]);
        readout.emplace_back();
      }
    }
    st.p.steps = std::move(steps);
    st.origin = std::move(origin);
    st.readout = std::move(readout);
    return;
  }
  std::vector<std::size_t> all;
  for (const auto& r : st.map.qubits) all.push_back(r.qubit);
  if (all.empty()) return;
  std::sort(all.begin(), all.end());
  st.p.steps.emplace_back(ir::DephaseStep{all, std::nullopt});
  st.origin.push_back(st.origin.empty() ? 0 : st.origin.back());
  st.readout.emplace_back();
}

void require_measurement_free(const State& st) {
  for (std::size_t i = 0; i < st.p.steps.size(); ++i) {
    const ir::Step& s = st.p.steps[i];
    std::string missing;
    if (std::holds_alternative<ir::MeasureStep>(s)) missing = "dilate";
    if (std::holds_alternative<ir::FeedbackStep>(s)) missing = "feedback";
    if (std::holds_alternative<ir::ResetStep>(s)) missing = "reset";
    if (std::holds_alternative<ir::RusBlock>(s)) missing = "rus-static";
    if (const auto* g = std::get_if<ir::GateStep>(&s); g != nullptr && g->condition) missing = "control-lift";
    if (!missing.empty()) {
      throw PassError("pipeline", std::string(ir::step_kind(s)) + " step from source step " +
                                      std::to_string(st.origin[i]) + " remains; enable pass '" + missing + "'");
    }
  }
}

}  // namespace

std::vector<PassSpec> default_pass_list() {
  return {{"dilate", {}}, {"feedback", {}}, {"control-lift", {}}, {"reset", {}}, {"rus-static", {}}};
}

std::vector<PassSpec> parse_pass_list(std::string_view text) {
  std::vector<PassSpec> out;
  if (trim(text).empty()) throw PassError("pipeline", "empty pass list");
  for (const std::string& entry : split(text, ',')) {
    const auto parts = split(entry, ':');
    PassSpec spec{parts.front(), {}};
    const auto known = std::find_if(known_passes().begin(), known_passes().end(),
                                    [&](const KnownPass& k) { return k.name == spec.name; });
    if (known == known_passes().end()) throw PassError("pipeline", "unknown pass '" + spec.name + "'");
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto eq = parts[i].find('=');
      if (eq == std::string::npos) throw PassError(spec.name, "option '" + parts[i] + "' is not key=value");
      const std::string key = trim(std::string_view(parts[i]).substr(0, eq));
      const std::string value = trim(std::string_view(parts[i]).substr(eq + 1));
      if (std::find(known->keys.begin(), known->keys.end(), key) == known->keys.end()) {
        throw PassError(spec.name, "unknown option '" + key + "'");
      }
      spec.options[key] = value;
    }
    if (spec.name == "rus-static") copies_option(spec, 1);
    if (spec.name == "dephase") dephase_placement(spec);
    out.push_back(std::move(spec));
  }
  return out;
}

CompiledArtifact compile(const ir::Protocol& p, const PassOptions& opts) {
  if (opts.rus_copies < 1) throw PassError("rus-static", "N must be ≥ 1");
  if (const auto diags = ir::validate(p); !diags.empty()) {
    throw PassError("validate", "input protocol is invalid: " + ir::format_diagnostic(diags.front()));
  }
  State st;
  st.p = p;
  st.origin.resize(p.steps.size());
  for (std::size_t i = 0; i < p.steps.size(); ++i) st.origin[i] = i;
  st.readout.resize(p.steps.size());
  st.cap = std::max(opts.max_qubits, p.registers.quantum_count);

  CompiledArtifact out;
  out.original_qubits = p.registers.quantum_count;
  out.classical_code_level = opts.classical_code_level;
  for (const PassSpec& spec : opts.passes) {
    const auto start = std::chrono::steady_clock::now();
    if (spec.name == "dilate") {
      run_dilate(st, opts);
    } else if (spec.name == "feedback") {
      run_feedback(st);
    } else if (spec.name == "control-lift") {
      run_control_lift(st);
    } else if (spec.name == "reset") {
      run_reset(st, opts);
    } else if (spec.name == "rus-static") {
      run_rus_static(st, spec, opts);
    } else if (spec.name == "dephase") {
      run_dephase(st, spec);
    } else {
      throw PassError("pipeline", "unknown pass '" + spec.name + "'");
    }
    const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
    out.timings.push_back({spec.name, elapsed.count()});
  }
  require_measurement_free(st);
  if (const auto diags = ir::validate(st.p); !diags.empty()) {
    throw PassError("pipeline", "compiled protocol fails validation: " + ir::format_diagnostic(diags.front()));
  }
  out.protocol = std::move(st.p);
  out.ancilla_map = std::move(st.map);
  return out;
}

}  // namespace demeasure::passes
