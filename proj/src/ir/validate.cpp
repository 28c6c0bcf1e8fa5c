#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "demeasure/ir.hpp"

namespace demeasure::ir {

double completeness_defect(const MeasurementOpSet& set) {
  ComplexMatrix sum(set.dim, set.dim);
  for (const auto& a : set.ops) {
    if (a.rows() != set.dim || a.cols() != set.dim) return INFINITY;
    sum += a.adjoint() * a;
  }
  return matrix_distance(sum, ComplexMatrix::identity(set.dim));
}

std::string_view step_kind(const Step& step) {
  static constexpr std::string_view kinds[] = {"gate", "measure", "feedback", "reset", "dephase", "rus"};
  return kinds[step.index()];
}

std::string format_diagnostic(const Diagnostic& d) {
  if (d.step) return "step " + std::to_string(*d.step) + ": " + d.reason;
  return d.reason;
}

namespace {

bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

class Validator {
 public:
  explicit Validator(const Protocol& p) : p_(p), group_outcomes_(p.registers.classical_count) {}

  std::vector<Diagnostic> run() {
    check_tables();
    for (std::size_t i = 0; i < p_.steps.size(); ++i) {
      step_ = i;
      std::visit([this](const auto& s) { check(s); }, p_.steps[i]);
    }
    return std::move(out_);
  }

 private:
  void report(std::string reason) { out_.push_back({step_, std::move(reason)}); }

  void check_tables() {
    for (const auto& [name, set] : p_.op_tables) {
      const std::string where = "op table '" + name + "': ";
      if (set.ops.empty()) {
        out_.push_back({std::nullopt, where + "needs at least one operator"});
        continue;
      }
      if (!is_power_of_two(set.dim)) {
        out_.push_back({std::nullopt, where + "dimension " + std::to_string(set.dim) + " is not a power of two"});
        continue;
      }
      bool shapes_ok = true;
      for (std::size_t n = 0; n < set.ops.size(); ++n) {
        const auto& a = set.ops[n];
        if (a.rows() != set.dim || a.cols() != set.dim) {
          out_.push_back({std::nullopt, where + "operator " + std::to_string(n) + " is not " +
                                            std::to_string(set.dim) + "x" + std::to_string(set.dim)});
          shapes_ok = false;
        } else if (!a.all_finite()) {
          out_.push_back({std::nullopt, where + "operator " + std::to_string(n) + " has non-finite entries"});
          shapes_ok = false;
        }
      }
      if (!shapes_ok) continue;
      const double defect = completeness_defect(set);
      if (!(defect <= kTolerances.completeness)) {
        out_.push_back({std::nullopt, where + "completeness violated (max |sum A^dag A - I| = " + fmt(defect) + ")"});
      }
    }
  }

  // Targets/controls within [0, limit), pairwise distinct.
  bool check_qubits(const std::vector<std::size_t>& qs, std::size_t limit, const std::string& what,
                    std::set<std::size_t>* used = nullptr) {
    std::set<std::size_t> local;
    std::set<std::size_t>& seen = used != nullptr ? *used : local;
    bool ok = true;
    for (std::size_t q : qs) {
      if (q >= limit) {
        report(what + " qubit " + std::to_string(q) + " out of range (register has " + std::to_string(limit) + ")");
        ok = false;
      } else if (!seen.insert(q).second) {
        report(what + " qubit " + std::to_string(q) + " repeated");
        ok = false;
      }
    }
    return ok;
  }

  bool check_unitary_gate(const Gate& gate, std::size_t arity, const std::string& what) {
    std::optional<ComplexMatrix> m;
    if (gate.is_literal()) {
      m = gate.matrix;
    } else {
      m = named_gate_matrix(gate.name);
      if (!m) {
        report(what + "unknown gate '" + gate.name + "'");
        return false;
      }
    }
    const std::size_t dim = std::size_t{1} << arity;
    if (m->rows() != dim || m->cols() != dim) {
      report(what + "gate is " + std::to_string(m->rows()) + "x" + std::to_string(m->cols()) + " but acts on " +
             std::to_string(arity) + " qubit(s)");
      return false;
    }
    if (!m->all_finite()) {
      report(what + "gate has non-finite entries");
      return false;
    }
    const double defect = unitarity_defect(*m);
    if (!(defect < kTolerances.unitarity)) {
      report(what + "gate is not unitary (defect " + fmt(defect) + ")");
      return false;
    }
    return true;
  }

  std::optional<std::size_t> read_group(std::size_t group, const std::string& what) {
    if (group >= p_.registers.classical_count) {
      report(what + " bit-group " + std::to_string(group) + " out of range");
      return std::nullopt;
    }
    if (!group_outcomes_[group]) {
      report(what + " bit-group " + std::to_string(group) + " is read before any step writes it");
      return std::nullopt;
    }
    return group_outcomes_[group];
  }

  void check_gate(const GateStep& s, std::size_t qubits, bool allow_condition, const std::string& prefix) {
    if (s.targets.empty()) report(prefix + "gate has no targets");
    std::set<std::size_t> used;
    check_qubits(s.targets, qubits, prefix + "target", &used);
    check_qubits(s.controls, qubits, prefix + "control", &used);
    if (s.control_values.size() != s.controls.size()) {
      report(prefix + "control_values must list one value per control");
    }
    for (int v : s.control_values)
      if (v != 0 && v != 1) report(prefix + "control value " + std::to_string(v) + " is not 0 or 1");
    if (!s.targets.empty()) check_unitary_gate(s.gate, s.targets.size(), prefix);
    if (s.condition) {
      if (!allow_condition) {
        report(prefix + "classical conditions are not allowed here");
      } else if (auto k = read_group(s.condition->group, prefix + "condition")) {
        if (s.condition->value >= *k) {
          report(prefix + "condition value " + std::to_string(s.condition->value) + " exceeds the " +
                 std::to_string(*k) + " outcomes of bit-group " + std::to_string(s.condition->group));
        }
      }
    }
  }

  void check(const GateStep& s) { check_gate(s, p_.registers.quantum_count, true, ""); }

  const MeasurementOpSet* table_for(const std::string& name, std::size_t arity) {
    auto it = p_.op_tables.find(name);
    if (it == p_.op_tables.end()) {
      report("unknown op table '" + name + "'");
      return nullptr;
    }
    if (arity >= 8 * sizeof(std::size_t) || it->second.dim != (std::size_t{1} << arity)) {
      report("op table '" + name + "' has dimension " + std::to_string(it->second.dim) + " but is applied to " +
             std::to_string(arity) + " qubit(s)");
      return nullptr;
    }
    return &it->second;
  }

  void write_group(std::size_t group, std::size_t outcomes, const std::string& what) {
    if (group >= p_.registers.classical_count) {
      report(what + " bit-group " + std::to_string(group) + " out of range");
      return;
    }
    group_outcomes_[group] = outcomes;
  }

  void check(const MeasureStep& s) {
    if (s.targets.empty()) report("measurement has no targets");
    check_qubits(s.targets, p_.registers.quantum_count, "target");
    const MeasurementOpSet* set = table_for(s.op_table, s.targets.size());
    write_group(s.result, set != nullptr ? set->outcomes() : 1, "result");
  }

  void check(const FeedbackStep& s) {
    if (s.targets.empty()) report("feedback has no targets");
    check_qubits(s.targets, p_.registers.quantum_count, "target");
    auto k = read_group(s.source, "source");
    std::set<std::size_t> covered;
    for (const auto& e : s.table) {
      const std::string prefix = "feedback outcome " + std::to_string(e.outcome) + ": ";
      if (k && e.outcome >= *k) report(prefix + "outcome out of range");
      if (!covered.insert(e.outcome).second) report(prefix + "listed twice");
      if (!s.targets.empty()) check_unitary_gate(e.gate, s.targets.size(), prefix);
    }
    if (k) {
      for (std::size_t n = 0; n < *k; ++n) {
        if (covered.count(n) == 0) report("incomplete feedback table (missing outcome " + std::to_string(n) + ")");
      }
    }
  }

  void check(const ResetStep& s) {
    if (s.targets.empty()) report("reset has no targets");
    check_qubits(s.targets, p_.registers.quantum_count, "target");
    const std::size_t dim = std::size_t{1} << s.targets.size();
    if (s.goal.rows() != dim || s.goal.cols() != 1) {
      report("reset goal must be a " + std::to_string(dim) + "x1 column");
      return;
    }
    if (!s.goal.all_finite()) {
      report("reset goal has non-finite entries");
      return;
    }
    const double norm = (s.goal.adjoint() * s.goal)(0, 0).real();
    if (std::abs(norm - 1.0) > kTolerances.normalization) report("reset goal is not normalized (norm^2 = " + fmt(norm) + ")");
  }

  void check(const DephaseStep& s) {
    if (s.targets.empty()) report("dephase has no targets");
    check_qubits(s.targets, p_.registers.quantum_count, "target");
    if (s.basis) {
      const std::size_t dim = std::size_t{1} << s.targets.size();
      if (s.basis->rows() != dim || s.basis->cols() != dim) {
        report("dephasing basis must be " + std::to_string(dim) + "x" + std::to_string(dim));
      } else if (!s.basis->all_finite() || !(unitarity_defect(*s.basis) < kTolerances.unitarity)) {
        report("dephasing basis is not unitary");
      }
    }
  }

  void check(const RusBlock& s) {
    if (s.workspace_qubits == 0) report("rus workspace must have at least one qubit");
    for (std::size_t j = 0; j < s.prepare.size(); ++j) {
      check_gate(s.prepare[j], s.workspace_qubits, false, "prepare step " + std::to_string(j) + ": ");
    }
    if (s.check_targets.empty()) report("rus check has no targets");
    std::set<std::size_t> local;
    check_qubits(s.check_targets, s.workspace_qubits, "rus check", &local);
    check_qubits(s.output, s.workspace_qubits, "rus output (must be disjoint from check)", &local);
    check_qubits(s.dest, p_.registers.quantum_count, "rus dest");
    if (s.output.empty()) report("rus output is empty");
    if (s.output.size() != s.dest.size()) report("rus output and dest sizes differ");
    const MeasurementOpSet* set = table_for(s.check_table, s.check_targets.size());
    if (s.success.empty()) report("rus block lists no success outcomes");
    std::set<std::size_t> seen;
    for (std::size_t n : s.success) {
      if (set != nullptr && n >= set->outcomes()) report("rus success outcome " + std::to_string(n) + " out of range");
      if (!seen.insert(n).second) report("rus success outcome " + std::to_string(n) + " repeated");
    }
    write_group(s.result, 2, "rus result");
  }

  const Protocol& p_;
  std::vector<std::optional<std::size_t>> group_outcomes_;
  std::optional<std::size_t> step_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const Protocol& p) {
  try {
    return Validator(p).run();
  } catch (const std::exception& e) {
    return {{std::nullopt, std::string("internal validation failure: ") + e.what()}};
  }
}

}  // namespace demeasure::ir
