#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "demeasure/ir.hpp"
#include "demeasure/linalg.hpp"

namespace demeasure::passes {

/// One entry of a pass list such as "rus-static:N=4".
struct PassSpec {
  std::string name;
  std::map<std::string, std::string> options;

  friend bool operator==(const PassSpec&, const PassSpec&) = default;
};

/// Parses "name[:key=value]*" entries separated by commas. Throws PassError
/// for unknown passes, unknown keys and malformed values.
std::vector<PassSpec> parse_pass_list(std::string_view text);

/// The pass list used when none is given: dilate, feedback, control-lift,
/// reset, rus-static.
std::vector<PassSpec> default_pass_list();

struct PassOptions {
  std::uint64_t completion_seed = 1;
  std::size_t rus_copies = 1;            // N; overridden by rus-static:N=...
  std::size_t classical_code_level = 0;  // recorded for downstream classical processing
  std::vector<PassSpec> passes = default_pass_list();
  std::size_t max_qubits = 20;  // register size allowed after compilation
};

/// V on system (x) ancilla with V(|j>|0>) = sum_n A_n|j> (x) |n>. The
/// ancilla occupies ceil(log2 K) qubits placed after the system qubits.
struct Dilation {
  UnitaryMatrix unitary;
  std::size_t outcomes = 0;
  std::size_t ancilla_qubits = 0;
};

Dilation dilate_measurement(const ir::MeasurementOpSet& opset, Completion completion);

/// W = sum_n U_n (x) |n><n| on system (x) ceil(log2 K)-qubit ancilla;
/// unused ancilla states get the identity. `table[n]` is U_n.
UnitaryMatrix lift_feedback(const std::vector<ComplexMatrix>& table, std::size_t outcomes, std::size_t dim);

/// Unitaries that swap a system's state into an auxiliary of the same
/// dimension and leave the system in `goal`.
struct ResetSwap {
  UnitaryMatrix correlate;  // U: |n>|0> -> |n>|n>
  UnitaryMatrix feedback;   // V: |n>|n> -> |psi>|n>
  UnitaryMatrix swap;       // S = V U
};

/// `basis` (columns) names the states |n>_s being correlated; the
/// computational basis when absent.
ResetSwap build_reset_swap(const ComplexMatrix& goal, const std::optional<ComplexMatrix>& basis,
                           Completion completion);

/// Where a classical bit-group lives after compilation.
struct GroupWrite {
  std::size_t group = 0;
  std::size_t origin_step = 0;  // step index in the source protocol
  std::vector<std::size_t> qubits;
  std::size_t outcomes = 0;

  friend bool operator==(const GroupWrite&, const GroupWrite&) = default;
};

struct AncillaRecord {
  std::size_t qubit = 0;
  std::string pass;
  std::size_t origin_step = 0;
  std::string role;  // outcome, reset-auxiliary, rus-workspace, rus-check, rus-indicator, rus-flag
  std::optional<std::size_t> group;
  std::string basis = "computational";

  friend bool operator==(const AncillaRecord&, const AncillaRecord&) = default;
};

struct RusRecord {
  std::size_t origin_step = 0;
  std::size_t copies = 0;
  double success_probability = 0.0;  // one copy
  double failure_probability = 0.0;  // (1 - p_s)^N
  std::size_t loaded_flag = 0;
  std::vector<std::size_t> dest;

  friend bool operator==(const RusRecord&, const RusRecord&) = default;
};

struct AncillaMap {
  std::vector<AncillaRecord> qubits;
  std::vector<GroupWrite> groups;
  std::vector<RusRecord> rus;

  /// Latest write to `group` by a step before `origin_step`.
  const GroupWrite* backing(std::size_t group, std::size_t origin_step) const;
  bool is_ancilla(std::size_t qubit) const;

  friend bool operator==(const AncillaMap&, const AncillaMap&) = default;
};

struct PassTiming {
  std::string pass;
  double milliseconds = 0.0;
};

struct CompiledArtifact {
  ir::Protocol protocol;
  AncillaMap ancilla_map;
  std::size_t original_qubits = 0;
  std::size_t classical_code_level = 0;
  std::vector<PassTiming> timings;

  /// Largest RUS copy count, i.e. the attempt budget of the equivalent
  /// dynamic protocol (1 when there are no RUS blocks).
  std::size_t rus_attempts() const;
};

/// Appends a dephasing step on `qubits`, which must all be ancillas.
/// Throws PassError otherwise.
CompiledArtifact insert_dephasing(CompiledArtifact artifact, const std::vector<std::size_t>& qubits,
                                  const std::optional<ComplexMatrix>& basis = std::nullopt);

/// Same step without the ancilla check; used to build negative controls.
ir::Protocol append_dephasing(ir::Protocol p, const std::vector<std::size_t>& qubits,
                              const std::optional<ComplexMatrix>& basis = std::nullopt);

/// Replaces the classical condition of `step` by quantum controls on the
/// ancillas in `backing` (outcome value encoded big-endian).
ir::GateStep coherent_control_lift(const ir::GateStep& step, const GroupWrite& backing);

/// Qubit layout of one statically unrolled RUS block.
struct RusCopy {
  std::vector<std::size_t> workspace;
  std::vector<std::size_t> check;      // dilation ancillas
  std::optional<std::size_t> indicator;  // only when several outcomes count as success
  std::size_t flag = 0;
};

struct RusUnrolled {
  std::vector<ir::Step> steps;
  std::vector<RusCopy> copies;
  double success_probability = 0.0;
  double failure_probability = 0.0;
};

/// N fixed copies of the block followed by a chain of conditional loads;
/// qubits are allocated from `first_free` upward.
RusUnrolled unroll_rus_static(const ir::RusBlock& block, const ir::MeasurementOpSet& check, std::size_t copies,
                              std::size_t first_free, Completion completion);

/// Runs the configured pipeline. Throws PassError (with the pass name) on
/// invalid input or options, ResourceError when the qubit cap is exceeded.
CompiledArtifact compile(const ir::Protocol& p, const PassOptions& opts);

/// Protocol document plus an "ancilla_map" section.
std::string serialize_artifact(const CompiledArtifact& a, bool include_timings = false);

/// Reads either an artifact or a bare protocol (empty map, original_qubits
/// = register size).
CompiledArtifact parse_artifact(std::string_view text);

}  // namespace demeasure::passes
