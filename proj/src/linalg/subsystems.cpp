#include <Eigen/Eigenvalues>
#include <algorithm>
#include <string>

#include "demeasure/error.hpp"
#include "demeasure/linalg.hpp"

namespace demeasure {

namespace {

// Offsets (within an n-qubit index) of every assignment to `qubits`,
// qubits[0] being the most significant bit of the assignment.
std::vector<std::size_t> offsets_for(std::span<const std::size_t> qubits, std::size_t n) {
  std::vector<std::size_t> out(std::size_t{1} << qubits.size(), 0);
  for (std::size_t a = 0; a < out.size(); ++a) {
    std::size_t off = 0;
    for (std::size_t t = 0; t < qubits.size(); ++t) {
      const std::size_t bit = (a >> (qubits.size() - 1 - t)) & 1U;
      off |= bit << (n - 1 - qubits[t]);
    }
    out[a] = off;
  }
  return out;
}

void check_qubit_list(std::span<const std::size_t> qubits, std::size_t n, const char* what) {
  std::vector<bool> seen(n, false);
  for (std::size_t q : qubits) {
    if (q >= n) throw DimensionError(std::string(what) + ": qubit " + std::to_string(q) + " out of range");
    if (seen[q]) throw DimensionError(std::string(what) + ": repeated qubit " + std::to_string(q));
    seen[q] = true;
  }
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& state, std::size_t dim_a, std::size_t dim_b,
                            Subsystem keep) {
  if (!state.square() || state.rows() != dim_a * dim_b) {
    throw DimensionError("partial_trace: state is " + std::to_string(state.rows()) + "x" +
                         std::to_string(state.cols()) + ", expected " +
                         std::to_string(dim_a * dim_b) + " square");
  }
  if (keep == Subsystem::A) {
    ComplexMatrix out(dim_a, dim_a);
    for (std::size_t i = 0; i < dim_a; ++i)
      for (std::size_t j = 0; j < dim_a; ++j) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < dim_b; ++k) s += state(i * dim_b + k, j * dim_b + k);
        out(i, j) = s;
      }
    return out;
  }
  ComplexMatrix out(dim_b, dim_b);
  for (std::size_t k = 0; k < dim_b; ++k)
    for (std::size_t l = 0; l < dim_b; ++l) {
      Complex s = 0.0;
      for (std::size_t i = 0; i < dim_a; ++i) s += state(i * dim_b + k, i * dim_b + l);
      out(k, l) = s;
    }
  return out;
}

ComplexMatrix reduce_qubits(const ComplexMatrix& op, std::size_t num_qubits,
                            std::span<const std::size_t> keep) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (!op.square() || op.rows() != dim) throw DimensionError("reduce_qubits: operator dimension mismatch");
  check_qubit_list(keep, num_qubits, "reduce_qubits");
  std::vector<std::size_t> rest;
  for (std::size_t q = 0; q < num_qubits; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) rest.push_back(q);
  const auto keep_off = offsets_for(keep, num_qubits);
  const auto rest_off = offsets_for(rest, num_qubits);
  ComplexMatrix out(keep_off.size(), keep_off.size());
  for (std::size_t a = 0; a < keep_off.size(); ++a)
    for (std::size_t b = 0; b < keep_off.size(); ++b) {
      Complex s = 0.0;
      for (std::size_t r : rest_off) s += op(keep_off[a] | r, keep_off[b] | r);
      out(a, b) = s;
    }
  return out;
}

ComplexMatrix permute_qubits(const ComplexMatrix& op, std::size_t num_qubits,
                             std::span<const std::size_t> order) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (order.size() != num_qubits) throw DimensionError("permute_qubits: order must list every qubit");
  check_qubit_list(order, num_qubits, "permute_qubits");
  if (op.rows() != dim || (op.cols() != dim && op.cols() != 1)) {
    throw DimensionError("permute_qubits: operator dimension mismatch");
  }
  // new index i (qubit k = old qubit order[k]) -> old index.
  const auto old_index = offsets_for(order, num_qubits);
  ComplexMatrix out(op.rows(), op.cols());
  if (op.cols() == 1) {
    for (std::size_t i = 0; i < dim; ++i) out(i, 0) = op(old_index[i], 0);
    return out;
  }
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) out(i, j) = op(old_index[i], old_index[j]);
  return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  if (!m.square()) throw DimensionError("hermitian_eigenvalues: matrix not square");
  const auto n = static_cast<Eigen::Index>(m.rows());
  Eigen::MatrixXcd e(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) e(r, c) = m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(e, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw InvariantError("eigenvalue solver did not converge");
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

}  // namespace demeasure
