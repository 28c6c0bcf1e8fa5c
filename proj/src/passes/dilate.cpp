#include <string>

#include "common.hpp"
#include "demeasure/error.hpp"
#include "demeasure/passes.hpp"

namespace demeasure::passes {

Dilation dilate_measurement(const ir::MeasurementOpSet& opset, Completion completion) {
  if (opset.ops.empty()) throw InvariantError("measurement has no outcomes");
  const double defect = ir::completeness_defect(opset);
  if (!(defect <= kTolerances.completeness)) {
    throw InvariantError("completeness violated (defect " + std::to_string(defect) + ")");
  }
  const std::size_t d = opset.dim;
  const std::size_t k = opset.outcomes();
  const std::size_t a = detail::ancilla_qubits_for(k);
  if (a == 0) return {UnitaryMatrix::checked(opset.ops.front()), 1, 0};

  const std::size_t span = std::size_t{1} << a;
  std::vector<std::pair<std::size_t, ComplexMatrix>> fixed;
  for (std::size_t j = 0; j < d; ++j) {
    ComplexMatrix column(d * span, 1);
    for (std::size_t n = 0; n < k; ++n)
      for (std::size_t i = 0; i < d; ++i) column(i * span + n, 0) = opset.ops[n](i, j);
    fixed.emplace_back(j * span, std::move(column));
  }
  return {complete_columns(d * span, fixed, completion), k, a};
}

}  // namespace demeasure::passes
