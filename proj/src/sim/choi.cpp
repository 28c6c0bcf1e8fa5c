#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "demeasure/error.hpp"
#include "demeasure/parallel.hpp"
#include "demeasure/sim.hpp"
#include "executor.hpp"

namespace demeasure::sim {

namespace {

std::vector<std::size_t> complement(const std::vector<std::size_t>& system, std::size_t n) {
  std::vector<bool> used(n, false);
  for (std::size_t q : system) {
    if (q >= n) throw DimensionError("channel system qubit " + std::to_string(q) + " out of range");
    if (used[q]) throw DimensionError("channel system qubit " + std::to_string(q) + " listed twice");
    used[q] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t q = 0; q < n; ++q)
    if (!used[q]) rest.push_back(q);
  return rest;
}

bool gates_only(const ir::Protocol& p) {
  return std::all_of(p.steps.begin(), p.steps.end(), [](const ir::Step& s) {
    const auto* g = std::get_if<ir::GateStep>(&s);
    return (g != nullptr && !g->condition) || std::holds_alternative<ir::DephaseStep>(s);
  });
}

std::size_t dephased_qubits(const ir::Protocol& p) {
  std::size_t count = 0;
  for (const ir::Step& s : p.steps)
    if (const auto* d = std::get_if<ir::DephaseStep>(&s)) count += d->targets.size();
  return count;
}

// Layout is (register, environment, reference). Each dephased qubit is
// copied onto its own environment qubit, which purifies the dephasing.
// Reference qubits hold the input index; the reduced state on
// (reference, system) is J itself since the input is left unnormalized.
ChoiMatrix pure_choi(const ir::Protocol& p, const std::vector<std::size_t>& system, const SimLimits& limits) {
  const std::size_t n = p.registers.quantum_count;
  const std::size_t e = dephased_qubits(p);
  const std::size_t s = system.size();
  const std::size_t total = n + e + s;
  if (total > limits.max_pure_qubits()) {
    throw ResourceError("pure-state Choi needs " + std::to_string(total) + " qubits, cap is " +
                        std::to_string(limits.max_pure_qubits()));
  }
  const std::size_t d = std::size_t{1} << s;
  ComplexMatrix psi(std::size_t{1} << total, 1);
  for (std::size_t i = 0; i < d; ++i) {
    std::size_t index = i;  // reference bits
    for (std::size_t k = 0; k < s; ++k)
      if ((i >> (s - 1 - k)) & 1U) index |= std::size_t{1} << (total - 1 - system[k]);
    psi(index, 0) = 1.0;
  }
  const ComplexMatrix x = ir::gate_matrix(ir::Gate::named("X"));
  const std::vector<int> one{1};
  std::size_t env = n;
  for (const ir::Step& st : p.steps) {
    if (const auto* g = std::get_if<ir::GateStep>(&st)) {
      left_multiply(psi, total, ir::gate_matrix(g->gate), g->targets, g->controls, g->control_values);
      continue;
    }
    const auto& dp = std::get<ir::DephaseStep>(st);
    if (dp.basis) left_multiply(psi, total, dp.basis->adjoint(), dp.targets);
    for (std::size_t q : dp.targets) {
      const std::vector<std::size_t> target{env++};
      const std::vector<std::size_t> control{q};
      left_multiply(psi, total, x, target, control, one);
    }
    if (dp.basis) left_multiply(psi, total, *dp.basis, dp.targets);
  }
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < s; ++k) keep.push_back(n + e + k);
  keep.insert(keep.end(), system.begin(), system.end());
  StateVector v(psi.data().begin(), psi.data().end());
  return {d, reduced_density(v, total, keep)};
}

}  // namespace

ChoiMatrix channel_choi(const ir::Protocol& p, const ChannelSpec& spec, const SimLimits& limits) {
  const std::size_t n = p.registers.quantum_count;
  const auto rest = complement(spec.system, n);
  const std::size_t s = spec.system.size();
  const std::size_t d = std::size_t{1} << s;
  const std::size_t de = std::size_t{1} << rest.size();

  if (!spec.force_density && !spec.environment && gates_only(p) &&
      (n + dephased_qubits(p) + s <= limits.max_pure_qubits() || n > limits.max_qubits)) {
    return pure_choi(p, spec.system, limits);
  }

  ComplexMatrix env;
  if (spec.environment) {
    env = *spec.environment;
    if (env.rows() != de || env.cols() != de) throw DimensionError("environment state has the wrong dimension");
  } else {
    env = ComplexMatrix(de, de);
    env(0, 0) = 1.0;
  }
  if (n > limits.max_qubits) {
    throw ResourceError("density simulation needs " + std::to_string(n) + " qubits, cap is " +
                        std::to_string(limits.max_qubits));
  }

  // Composite order is (system, rest); position k holds register qubit layout[k].
  std::vector<std::size_t> layout(spec.system);
  layout.insert(layout.end(), rest.begin(), rest.end());
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[layout[k]] = k;

  const detail::Executor ex(p, detail::Mode::linear, spec.max_rus, limits);
  ComplexMatrix j(d * d, d * d);
  parallel_for(d * d, limits.threads, [&](std::size_t idx) {
    const std::size_t a = idx / d;
    const std::size_t b = idx % d;
    ComplexMatrix input(d, d);
    input(a, b) = 1.0;
    ComplexMatrix start = permute_qubits(kron(input, env), n, order);
    detail::Run r{{}, std::vector<std::optional<std::size_t>>(p.registers.classical_count), std::move(start), n,
                  false};
    ComplexMatrix image(d, d);
    for (const auto& leaf : ex.run(std::move(r))) image += reduce_qubits(leaf.op, leaf.num_qubits, spec.system);
    j.set_block(a * d, b * d, image);
  });
  return {d, std::move(j)};
}

ComplexMatrix apply_choi(const ChoiMatrix& choi, const ComplexMatrix& rho) {
  const std::size_t d = choi.d;
  if (rho.rows() != d || rho.cols() != d) throw DimensionError("apply_choi: input dimension mismatch");
  const std::size_t out = choi.m.rows() / d;
  ComplexMatrix result(out, out);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      if (rho(i, k) == Complex(0.0)) continue;
      result += rho(i, k) * choi.m.block(i * out, k * out, out, out);
    }
  return result;
}

ChoiMatrix choi_from_kraus(const std::vector<ComplexMatrix>& kraus) {
  if (kraus.empty()) throw DimensionError("choi_from_kraus: no operators");
  const std::size_t d = kraus.front().cols();
  const std::size_t out = kraus.front().rows();
  ComplexMatrix j(d * out, d * out);
  for (const auto& k : kraus) {
    if (k.cols() != d || k.rows() != out) throw DimensionError("choi_from_kraus: inconsistent operator shapes");
    for (std::size_t a = 0; a < d; ++a) {
      const ComplexMatrix ca = k.col(a);
      for (std::size_t b = 0; b < d; ++b) {
        const ComplexMatrix cb = k.col(b);
        for (std::size_t r = 0; r < out; ++r)
          for (std::size_t c = 0; c < out; ++c) j(a * out + r, b * out + c) += ca(r, 0) * std::conj(cb(c, 0));
      }
    }
  }
  return {d, std::move(j)};
}

Verdict compare_channels(const ChoiMatrix& a, const ChoiMatrix& b, double tol) {
  if (a.d != b.d) throw DimensionError("compare_channels: input dimensions differ");
  const double dist = matrix_distance(a.m, b.m);
  return {dist, tol, dist <= tol};
}

std::vector<std::string> choi_defects(const ChoiMatrix& choi) {
  std::vector<std::string> out;
  const double herm = hermiticity_defect(choi.m);
  if (herm > kTolerances.channel) out.push_back("not Hermitian (defect " + std::to_string(herm) + ")");
  const std::size_t d = choi.d;
  const std::size_t o = choi.m.rows() / d;
  // Trace preservation: the output partial trace must be the identity.
  double tp = 0.0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      Complex t = 0.0;
      for (std::size_t r = 0; r < o; ++r) t += choi.m(a * o + r, b * o + r);
      tp = std::max(tp, std::abs(t - (a == b ? 1.0 : 0.0)));
    }
  if (tp > kTolerances.channel) out.push_back("not trace preserving (defect " + std::to_string(tp) + ")");
  if (herm <= kTolerances.channel) {
    ComplexMatrix sym = choi.m + choi.m.adjoint();
    sym *= 0.5;
    const double lo = hermitian_eigenvalues(sym).front();
    if (lo < -kTolerances.channel) out.push_back("not completely positive (eigenvalue " + std::to_string(lo) + ")");
  }
  return out;
}

}  // namespace demeasure::sim
