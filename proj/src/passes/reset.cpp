#include <cmath>
#include <string>

#include "demeasure/error.hpp"
#include "demeasure/passes.hpp"

namespace demeasure::passes {

ResetSwap build_reset_swap(const ComplexMatrix& goal, const std::optional<ComplexMatrix>& basis,
                           Completion completion) {
  if (goal.cols() != 1 || goal.rows() == 0) throw DimensionError("reset goal must be a column vector");
  const std::size_t d = goal.rows();
  const double norm = (goal.adjoint() * goal)(0, 0).real();
  if (!(std::abs(norm - 1.0) <= kTolerances.normalization)) {
    throw InvariantError("goal state is not normalized (norm^2 = " + std::to_string(norm) + ")");
  }

  // Correlate: for system state n the auxiliary labels 0 and n are swapped,
  // which is the identity-completed U of the measure-and-correct reset.
  ComplexMatrix u(d * d, d * d);
  for (std::size_t s = 0; s < d; ++s)
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t image = a == 0 ? s : (a == s ? 0 : a);
      u(s * d + image, s * d + a) = 1.0;
    }
  if (basis) {
    if (basis->rows() != d || basis->cols() != d) throw DimensionError("reset basis has the wrong dimension");
    const UnitaryMatrix b = UnitaryMatrix::checked(*basis);
    u = u * kron(b.matrix().adjoint(), ComplexMatrix::identity(d));
  }

  // Feedback: block-diagonal in the auxiliary, block n any unitary with
  // |n> -> |psi>.
  ComplexMatrix v(d * d, d * d);
  for (std::size_t n = 0; n < d; ++n) {
    const UnitaryMatrix wn = complete_columns(d, {{n, goal}}, completion);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) v(i * d + n, j * d + n) = wn.matrix()(i, j);
  }
  UnitaryMatrix correlate = UnitaryMatrix::checked(u);
  UnitaryMatrix feedback = UnitaryMatrix::checked(v);
  UnitaryMatrix swap = UnitaryMatrix::checked(v * u);
  return {std::move(correlate), std::move(feedback), std::move(swap)};
}

}  // namespace demeasure::passes
