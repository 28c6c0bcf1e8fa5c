#pragma once

#include <cstddef>
#include <vector>

#include "demeasure/linalg.hpp"

namespace demeasure::passes::detail {

/// Qubits needed to hold `outcomes` distinct ancilla states.
inline std::size_t ancilla_qubits_for(std::size_t outcomes) {
  std::size_t a = 0;
  while ((std::size_t{1} << a) < outcomes) ++a;
  return a;
}

/// Big-endian bits of `value` over `width` qubits.
inline std::vector<int> bits_of(std::size_t value, std::size_t width) {
  std::vector<int> out(width);
  for (std::size_t i = 0; i < width; ++i) out[i] = static_cast<int>((value >> (width - 1 - i)) & 1U);
  return out;
}

/// Permutation matrix sending basis state i to perm[i].
inline ComplexMatrix permutation_matrix(const std::vector<std::size_t>& perm) {
  ComplexMatrix m(perm.size(), perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) m(perm[i], i) = 1.0;
  return m;
}

}  // namespace demeasure::passes::detail
