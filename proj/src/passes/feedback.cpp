#include <string>

#include "common.hpp"
#include "demeasure/error.hpp"
#include "demeasure/passes.hpp"

namespace demeasure::passes {

UnitaryMatrix lift_feedback(const std::vector<ComplexMatrix>& table, std::size_t outcomes, std::size_t dim) {
  if (table.size() < outcomes) {
    throw PassError("feedback", "incomplete feedback table (missing outcome " + std::to_string(table.size()) + ")");
  }
  if (table.size() > outcomes) throw PassError("feedback", "feedback table lists more outcomes than the measurement");
  const std::size_t span = std::size_t{1} << detail::ancilla_qubits_for(outcomes);
  ComplexMatrix w(dim * span, dim * span);
  for (std::size_t n = 0; n < span; ++n) {
    if (n >= outcomes) {
      for (std::size_t i = 0; i < dim; ++i) w(i * span + n, i * span + n) = 1.0;
      continue;
    }
    const ComplexMatrix& u = table[n];
    if (u.rows() != dim || u.cols() != dim) {
      throw PassError("feedback", "entry for outcome " + std::to_string(n) + " has the wrong dimension");
    }
    if (!(unitarity_defect(u) <= kTolerances.unitarity)) {
      throw PassError("feedback", "entry for outcome " + std::to_string(n) + " is not unitary");
    }
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) w(i * span + n, j * span + n) = u(i, j);
  }
  return UnitaryMatrix::checked(std::move(w));
}

ir::GateStep coherent_control_lift(const ir::GateStep& step, const GroupWrite& backing) {
  if (!step.condition) return step;
  if (step.condition->group != backing.group) {
    throw PassError("control-lift", "backing record is for a different bit-group");
  }
  if (step.condition->value >= backing.outcomes) {
    throw PassError("control-lift", "condition value " + std::to_string(step.condition->value) +
                                        " is not an outcome of bit-group " + std::to_string(backing.group));
  }
  ir::GateStep out = step;
  out.condition.reset();
  out.control_values.resize(out.controls.size(), 1);
  const auto bits = detail::bits_of(step.condition->value, backing.qubits.size());
  out.controls.insert(out.controls.end(), backing.qubits.begin(), backing.qubits.end());
  out.control_values.insert(out.control_values.end(), bits.begin(), bits.end());
  return out;
}

}  // namespace demeasure::passes
