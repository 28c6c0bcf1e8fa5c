#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "demeasure/linalg.hpp"

namespace demeasure::ir {

inline constexpr int kIrVersion = 1;

/// Quantum qubits and classical bit-groups. A bit-group holds one outcome
/// index (0..K-1) written by a measurement or a repeat-until-success block.
struct Register {
  std::size_t quantum_count = 0;
  std::size_t classical_count = 0;

  friend bool operator==(const Register&, const Register&) = default;
};

/// Measurement operators {A_n} on a d-dimensional system; outcome n is the
/// position of A_n in `ops`.
struct MeasurementOpSet {
  std::size_t dim = 0;
  std::vector<ComplexMatrix> ops;

  std::size_t outcomes() const { return ops.size(); }

  friend bool operator==(const MeasurementOpSet&, const MeasurementOpSet&) = default;
};

/// max |sum_n A_n^dag A_n - I|.
double completeness_defect(const MeasurementOpSet& set);

/// A named standard gate or, when `name == "matrix"`, a literal unitary.
struct Gate {
  std::string name;
  ComplexMatrix matrix;  // only meaningful for literal gates

  static Gate named(std::string name) { return {std::move(name), {}}; }
  static Gate literal(ComplexMatrix m) { return {"matrix", std::move(m)}; }
  bool is_literal() const { return name == "matrix"; }

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Matrix of a named gate, or nullopt for an unknown name.
std::optional<ComplexMatrix> named_gate_matrix(std::string_view name);
/// Resolves named and literal gates alike.
ComplexMatrix gate_matrix(const Gate& gate);
/// Names accepted by named_gate_matrix.
const std::vector<std::string>& named_gates();

struct ClassicalCondition {
  std::size_t group = 0;
  std::size_t value = 0;

  friend bool operator==(const ClassicalCondition&, const ClassicalCondition&) = default;
};

/// Unitary on `targets` (targets[0] is the most significant factor),
/// applied when every `controls[i]` is in state `control_values[i]` and,
/// if present, the classical condition holds.
struct GateStep {
  Gate gate;
  std::vector<std::size_t> targets;
  std::vector<std::size_t> controls;
  std::vector<int> control_values;
  std::optional<ClassicalCondition> condition;

  friend bool operator==(const GateStep&, const GateStep&) = default;
};

struct MeasureStep {
  std::string op_table;
  std::vector<std::size_t> targets;
  std::size_t result = 0;

  friend bool operator==(const MeasureStep&, const MeasureStep&) = default;
};

struct FeedbackEntry {
  std::size_t outcome = 0;
  Gate gate;

  friend bool operator==(const FeedbackEntry&, const FeedbackEntry&) = default;
};

/// Applies the gate listed for the outcome stored in bit-group `source`.
struct FeedbackStep {
  std::size_t source = 0;
  std::vector<std::size_t> targets;
  std::vector<FeedbackEntry> table;

  friend bool operator==(const FeedbackStep&, const FeedbackStep&) = default;
};

/// Puts `targets` into the pure state `goal` (a 2^k x 1 column).
struct ResetStep {
  std::vector<std::size_t> targets;
  ComplexMatrix goal;

  friend bool operator==(const ResetStep&, const ResetStep&) = default;
};

/// Removes coherences between the basis states of `targets`. The basis is
/// the computational one unless `basis` (columns = basis vectors) is given.
struct DephaseStep {
  std::vector<std::size_t> targets;
  std::optional<ComplexMatrix> basis;

  friend bool operator==(const DephaseStep&, const DephaseStep&) = default;
};

/// Repeat-until-success preparation. `prepare` runs on a private workspace
/// of `workspace_qubits` qubits initialised to |0...0>; the `check_targets`
/// are measured with `check_table`; on an outcome in `success` the
/// `output` workspace qubits are swapped into the main-register `dest`
/// qubits and bit-group `result` is set to 1. Otherwise the workspace is
/// discarded and the attempt repeated. All workspace indices are local.
struct RusBlock {
  std::size_t workspace_qubits = 0;
  std::vector<GateStep> prepare;
  std::string check_table;
  std::vector<std::size_t> check_targets;
  std::vector<std::size_t> success;
  std::vector<std::size_t> output;
  std::vector<std::size_t> dest;
  std::size_t result = 0;

  friend bool operator==(const RusBlock&, const RusBlock&) = default;
};

using Step = std::variant<GateStep, MeasureStep, FeedbackStep, ResetStep, DephaseStep, RusBlock>;

/// "gate", "measure", ... as used by the text format.
std::string_view step_kind(const Step& step);

struct Protocol {
  Register registers;
  std::map<std::string, MeasurementOpSet> op_tables;
  std::vector<Step> steps;
  std::map<std::string, std::string> metadata;

  friend bool operator==(const Protocol&, const Protocol&) = default;
};

struct Diagnostic {
  std::optional<std::size_t> step;  // nullopt for register / op-table problems
  std::string reason;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Every violated invariant, in document order. Never throws.
std::vector<Diagnostic> validate(const Protocol& p);

std::string format_diagnostic(const Diagnostic& d);

/// Parses the JSON text format. Throws ParseError.
Protocol parse_protocol(std::string_view text);

/// Canonical JSON text; byte-stable for equal protocols.
std::string serialize_protocol(const Protocol& p);

}  // namespace demeasure::ir
