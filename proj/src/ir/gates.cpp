#include <cmath>
#include <numbers>

#include "demeasure/error.hpp"
#include "demeasure/ir.hpp"

namespace demeasure::ir {

namespace {

ComplexMatrix permutation(std::size_t dim, const std::vector<std::size_t>& image) {
  ComplexMatrix m(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) m(image[col], col) = 1.0;
  return m;
}

ComplexMatrix controlled(const ComplexMatrix& u) {
  ComplexMatrix m = ComplexMatrix::identity(2 * u.rows());
  m.set_block(u.rows(), u.rows(), u);
  return m;
}

}  // namespace

const std::vector<std::string>& named_gates() {
  static const std::vector<std::string> names{"I",  "X",    "Y",  "Z",  "H",    "S",   "SDG", "T",
                                              "TDG", "CNOT", "CX", "CZ", "SWAP", "CCX", "CSWAP"};
  return names;
}

std::optional<ComplexMatrix> named_gate_matrix(std::string_view name) {
  using namespace std::complex_literals;
  const double r = 1.0 / std::numbers::sqrt2;
  if (name == "I") return ComplexMatrix::identity(2);
  if (name == "X") return ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
  if (name == "Y") return ComplexMatrix::from_rows({{0.0, -1i}, {1i, 0.0}});
  if (name == "Z") return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
  if (name == "H") return ComplexMatrix::from_rows({{r, r}, {r, -r}});
  if (name == "S") return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, 1i}});
  if (name == "SDG") return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1i}});
  if (name == "T") return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, std::polar(1.0, std::numbers::pi / 4)}});
  if (name == "TDG") return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, std::polar(1.0, -std::numbers::pi / 4)}});
  if (name == "CNOT" || name == "CX") return controlled(*named_gate_matrix("X"));
  if (name == "CZ") return controlled(*named_gate_matrix("Z"));
  if (name == "SWAP") return permutation(4, {0, 2, 1, 3});
  if (name == "CCX") return controlled(controlled(*named_gate_matrix("X")));
  if (name == "CSWAP") return controlled(*named_gate_matrix("SWAP"));
  return std::nullopt;
}

ComplexMatrix gate_matrix(const Gate& gate) {
  if (gate.is_literal()) return gate.matrix;
  auto m = named_gate_matrix(gate.name);
  if (!m) throw InvariantError("unknown gate '" + gate.name + "'");
  return *m;
}

}  // namespace demeasure::ir
