#include <cstring>
#include <string>

#include "demeasure/error.hpp"
#include "demeasure/kernels.hpp"
#include "demeasure/sim.hpp"

namespace demeasure::sim {

namespace {

std::size_t bit_of(std::size_t qubit, std::size_t n) { return std::size_t{1} << (n - 1 - qubit); }

// Rows of `buf` (2^n rows of `row_len` complex values) are regrouped by
// the target bits and each group is replaced by U applied to it.
void left_multiply_rows(Complex* buf, std::size_t n, std::size_t row_len, const ComplexMatrix& u,
                        std::span<const std::size_t> targets, std::span<const std::size_t> controls,
                        std::span<const int> control_values) {
  const std::size_t k = targets.size();
  const std::size_t group = std::size_t{1} << k;
  if (u.rows() != group || u.cols() != group) {
    throw DimensionError("operator is " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) + " but acts on " +
                         std::to_string(k) + " qubit(s)");
  }
  std::size_t target_mask = 0;
  std::vector<std::size_t> offset(group, 0);
  for (std::size_t t = 0; t < k; ++t) {
    if (targets[t] >= n) throw DimensionError("target qubit out of range");
    target_mask |= bit_of(targets[t], n);
  }
  for (std::size_t a = 0; a < group; ++a)
    for (std::size_t t = 0; t < k; ++t)
      if ((a >> (k - 1 - t)) & 1U) offset[a] |= bit_of(targets[t], n);
  std::size_t control_mask = 0;
  std::size_t control_pattern = 0;
  for (std::size_t c = 0; c < controls.size(); ++c) {
    if (controls[c] >= n) throw DimensionError("control qubit out of range");
    control_mask |= bit_of(controls[c], n);
    const int value = c < control_values.size() ? control_values[c] : 1;
    if (value != 0) control_pattern |= bit_of(controls[c], n);
  }

  const auto& kern = kernels::active();
  std::vector<Complex> scratch(group * row_len);
  const std::size_t dim = std::size_t{1} << n;
  for (std::size_t base = 0; base < dim; ++base) {
    if ((base & target_mask) != 0 || (base & control_mask) != control_pattern) continue;
    std::fill(scratch.begin(), scratch.end(), Complex(0.0));
    for (std::size_t a = 0; a < group; ++a) {
      double* dst = reinterpret_cast<double*>(scratch.data() + a * row_len);
      for (std::size_t b = 0; b < group; ++b) {
        const Complex w = u(a, b);
        if (w == Complex(0.0)) continue;
        const double* src = reinterpret_cast<const double*>(buf + (base | offset[b]) * row_len);
        kern.caxpy(dst, src, w.real(), w.imag(), row_len);
      }
    }
    for (std::size_t a = 0; a < group; ++a) {
      std::memcpy(static_cast<void*>(buf + (base | offset[a]) * row_len), scratch.data() + a * row_len,
                  row_len * sizeof(Complex));
    }
  }
}

}  // namespace

void left_multiply(ComplexMatrix& op, std::size_t num_qubits, const ComplexMatrix& u,
                   std::span<const std::size_t> targets, std::span<const std::size_t> controls,
                   std::span<const int> control_values) {
  if (op.rows() != (std::size_t{1} << num_qubits)) throw DimensionError("left_multiply: operator dimension mismatch");
  left_multiply_rows(op.raw(), num_qubits, op.cols(), u, targets, controls, control_values);
}

void conjugate(ComplexMatrix& op, std::size_t num_qubits, const ComplexMatrix& u, std::span<const std::size_t> targets,
               std::span<const std::size_t> controls, std::span<const int> control_values) {
  if (!op.square()) throw DimensionError("conjugate: operator must be square");
  // U op U^dag = U (U op^dag)^dag.
  ComplexMatrix a = op.adjoint();
  left_multiply(a, num_qubits, u, targets, controls, control_values);
  op = a.adjoint();
  left_multiply(op, num_qubits, u, targets, controls, control_values);
}

void dephase(ComplexMatrix& op, std::size_t num_qubits, std::span<const std::size_t> targets) {
  std::size_t mask = 0;
  for (std::size_t t : targets) {
    if (t >= num_qubits) throw DimensionError("dephase: target out of range");
    mask |= bit_of(t, num_qubits);
  }
  for (std::size_t r = 0; r < op.rows(); ++r)
    for (std::size_t c = 0; c < op.cols(); ++c)
      if (((r ^ c) & mask) != 0) op(r, c) = 0.0;
}

ComplexMatrix reduced_density(const StateVector& psi, std::size_t num_qubits, std::span<const std::size_t> keep) {
  if (psi.size() != (std::size_t{1} << num_qubits)) throw DimensionError("reduced_density: vector length mismatch");
  std::vector<bool> kept(num_qubits, false);
  for (std::size_t q : keep) {
    if (q >= num_qubits || kept[q]) throw DimensionError("reduced_density: bad keep list");
    kept[q] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t q = 0; q < num_qubits; ++q)
    if (!kept[q]) rest.push_back(q);
  auto offsets = [num_qubits](std::span<const std::size_t> qs) {
    std::vector<std::size_t> out(std::size_t{1} << qs.size(), 0);
    for (std::size_t a = 0; a < out.size(); ++a)
      for (std::size_t t = 0; t < qs.size(); ++t)
        if ((a >> (qs.size() - 1 - t)) & 1U) out[a] |= bit_of(qs[t], num_qubits);
    return out;
  };
  const auto ko = offsets(keep);
  const auto ro = offsets(rest);
  // M[a][r] = psi[a, r]; rho = M M^dag.
  ComplexMatrix m(ko.size(), ro.size());
  for (std::size_t a = 0; a < ko.size(); ++a)
    for (std::size_t r = 0; r < ro.size(); ++r) m(a, r) = psi[ko[a] | ro[r]];
  return m * m.adjoint();
}

}  // namespace demeasure::sim
