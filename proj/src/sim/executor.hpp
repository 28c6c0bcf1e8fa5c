#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "demeasure/ir.hpp"
#include "demeasure/sim.hpp"

namespace demeasure::sim::detail {

// physical: operators are unnormalized density matrices, pruned by trace.
// linear: operators are images of |i><j| under the branch map, pruned by
// their largest entry.
enum class Mode { physical, linear };

struct Run {
  std::vector<std::size_t> path;
  std::vector<std::optional<std::size_t>> classical;
  ComplexMatrix op;
  std::size_t num_qubits = 0;
  bool rus_failed = false;
};

inline constexpr std::size_t kNoGroup = std::numeric_limits<std::size_t>::max();

class Executor {
 public:
  Executor(const ir::Protocol& p, Mode mode, std::size_t max_rus, const SimLimits& limits);

  std::vector<Run> run(Run initial) const;

 private:
  void require_qubits(std::size_t n) const;
  bool negligible(const ComplexMatrix& op) const;
  void append_zero_qubits(Run& r, std::size_t count) const;
  void append_state(Run& r, const ComplexMatrix& state, std::size_t count) const;
  void trace_trailing(Run& r, std::size_t count) const;
  void apply_gate(Run& r, const ir::GateStep& g, std::size_t offset) const;
  std::vector<Run> measure(Run r, const ir::MeasurementOpSet& set, const std::vector<std::size_t>& targets,
                           std::size_t group) const;
  std::vector<Run> run_rus(Run r, const ir::RusBlock& block) const;
  std::vector<Run> step(Run r, const ir::Step& s) const;
  void check_branch_cap(std::size_t count) const;

  const ir::Protocol& p_;
  Mode mode_;
  std::size_t max_rus_;
  SimLimits limits_;
};

}  // namespace demeasure::sim::detail
