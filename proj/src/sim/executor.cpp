#include <algorithm>
#include <cmath>
#include <string>

#include "demeasure/error.hpp"
#include "demeasure/sim.hpp"
#include "executor.hpp"

namespace demeasure::sim {

DensityState DensityState::ground(std::size_t n) {
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix m(dim, dim);
  m(0, 0) = 1.0;
  return {n, std::move(m)};
}

DensityState DensityState::from_matrix(std::size_t n, ComplexMatrix m) {
  const std::size_t dim = std::size_t{1} << n;
  if (m.rows() != dim || m.cols() != dim) throw DimensionError("density matrix dimension does not match qubit count");
  return {n, std::move(m)};
}

namespace detail {

namespace {

std::vector<std::size_t> shifted(const std::vector<std::size_t>& qs, std::size_t by) {
  std::vector<std::size_t> out(qs);
  for (auto& q : out) q += by;
  return out;
}

const ComplexMatrix& swap_gate() {
  static const ComplexMatrix s = *ir::named_gate_matrix("SWAP");
  return s;
}

}  // namespace

Executor::Executor(const ir::Protocol& p, Mode mode, std::size_t max_rus, const SimLimits& limits)
    : p_(p), mode_(mode), max_rus_(max_rus), limits_(limits) {
  if (max_rus_ == 0) throw Error("max_rus must be at least 1");
}

void Executor::require_qubits(std::size_t n) const {
  if (n > limits_.max_qubits) {
    throw ResourceError("density simulation needs " + std::to_string(n) + " qubits, cap is " +
                        std::to_string(limits_.max_qubits));
  }
}

bool Executor::negligible(const ComplexMatrix& op) const {
  if (mode_ == Mode::physical) return op.trace().real() < kTolerances.branch_cutoff;
  double mx = 0.0;
  for (const Complex& z : op.data()) mx = std::max(mx, std::abs(z));
  return mx < kTolerances.branch_cutoff;
}

void Executor::append_zero_qubits(Run& r, std::size_t count) const {
  require_qubits(r.num_qubits + count);
  const std::size_t dim = std::size_t{1} << count;
  ComplexMatrix zero(dim, dim);
  zero(0, 0) = 1.0;
  r.op = kron(r.op, zero);
  r.num_qubits += count;
}

void Executor::append_state(Run& r, const ComplexMatrix& state, std::size_t count) const {
  require_qubits(r.num_qubits + count);
  r.op = kron(r.op, state);
  r.num_qubits += count;
}

void Executor::trace_trailing(Run& r, std::size_t count) const {
  const std::size_t keep = r.num_qubits - count;
  r.op = partial_trace(r.op, std::size_t{1} << keep, std::size_t{1} << count, Subsystem::A);
  r.num_qubits = keep;
}

void Executor::apply_gate(Run& r, const ir::GateStep& g, std::size_t offset) const {
  if (g.condition) {
    const auto& value = r.classical.at(g.condition->group);
    if (!value) throw Error("condition reads an unwritten bit-group");
    if (*value != g.condition->value) return;
  }
  conjugate(r.op, r.num_qubits, ir::gate_matrix(g.gate), shifted(g.targets, offset), shifted(g.controls, offset),
            g.control_values);
}

std::vector<Run> Executor::measure(Run r, const ir::MeasurementOpSet& set, const std::vector<std::size_t>& targets,
                                   std::size_t group) const {
  std::vector<Run> children;
  for (std::size_t n = 0; n < set.ops.size(); ++n) {
    Run child = r;
    conjugate(child.op, child.num_qubits, set.ops[n], targets);
    if (negligible(child.op)) continue;
    child.path.push_back(n);
    if (group != kNoGroup) child.classical.at(group) = n;
    children.push_back(std::move(child));
  }
  return children;
}

void Executor::check_branch_cap(std::size_t count) const {
  if (count > limits_.max_branches) {
    throw ResourceError("branch count " + std::to_string(count) + " exceeds cap " + std::to_string(limits_.max_branches));
  }
}

std::vector<Run> Executor::run_rus(Run r, const ir::RusBlock& block) const {
  const ir::MeasurementOpSet& set = p_.op_tables.at(block.check_table);
  const std::size_t w = block.workspace_qubits;
  std::vector<Run> done;
  std::vector<Run> pending{std::move(r)};
  for (std::size_t attempt = 0; attempt < max_rus_ && !pending.empty(); ++attempt) {
    std::vector<Run> next;
    for (Run& q : pending) {
      const std::size_t base = q.num_qubits;
      append_zero_qubits(q, w);
      for (const auto& g : block.prepare) apply_gate(q, g, base);
      for (Run& child : measure(std::move(q), set, shifted(block.check_targets, base), kNoGroup)) {
        const std::size_t outcome = child.path.back();
        const bool ok = std::find(block.success.begin(), block.success.end(), outcome) != block.success.end();
        if (ok) {
          for (std::size_t i = 0; i < block.output.size(); ++i) {
            const std::size_t pair[2] = {block.output[i] + base, block.dest[i]};
            conjugate(child.op, child.num_qubits, swap_gate(), pair);
          }
        }
        trace_trailing(child, w);
        if (ok) {
          child.classical.at(block.result) = 1;
          done.push_back(std::move(child));
        } else {
          next.push_back(std::move(child));
        }
      }
      check_branch_cap(done.size() + next.size());
    }
    pending = std::move(next);
  }
  for (Run& q : pending) {
    q.classical.at(block.result) = 0;
    q.rus_failed = true;
    done.push_back(std::move(q));
  }
  return done;
}

std::vector<Run> Executor::step(Run r, const ir::Step& s) const {
  std::vector<Run> out;
  std::visit(
      [&](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, ir::GateStep>) {
          apply_gate(r, st, 0);
          out.push_back(std::move(r));
        } else if constexpr (std::is_same_v<T, ir::MeasureStep>) {
          out = measure(std::move(r), p_.op_tables.at(st.op_table), st.targets, st.result);
        } else if constexpr (std::is_same_v<T, ir::FeedbackStep>) {
          const auto& value = r.classical.at(st.source);
          if (!value) throw Error("feedback reads an unwritten bit-group");
          const auto it = std::find_if(st.table.begin(), st.table.end(),
                                       [&](const ir::FeedbackEntry& e) { return e.outcome == *value; });
          if (it == st.table.end()) throw Error("incomplete feedback table");
          conjugate(r.op, r.num_qubits, ir::gate_matrix(it->gate), st.targets);
          out.push_back(std::move(r));
        } else if constexpr (std::is_same_v<T, ir::ResetStep>) {
          const std::size_t base = r.num_qubits;
          const std::size_t t = st.targets.size();
          append_state(r, st.goal * st.goal.adjoint(), t);
          for (std::size_t i = 0; i < t; ++i) {
            const std::size_t pair[2] = {st.targets[i], base + i};
            conjugate(r.op, r.num_qubits, swap_gate(), pair);
          }
          trace_trailing(r, t);
          out.push_back(std::move(r));
        } else if constexpr (std::is_same_v<T, ir::DephaseStep>) {
          if (st.basis) conjugate(r.op, r.num_qubits, st.basis->adjoint(), st.targets);
          dephase(r.op, r.num_qubits, st.targets);
          if (st.basis) conjugate(r.op, r.num_qubits, *st.basis, st.targets);
          out.push_back(std::move(r));
        } else {
          out = run_rus(std::move(r), st);
        }
      },
      s);
  return out;
}

std::vector<Run> Executor::run(Run initial) const {
  require_qubits(initial.num_qubits);
  std::vector<Run> runs{std::move(initial)};
  for (const ir::Step& s : p_.steps) {
    std::vector<Run> next;
    for (Run& r : runs) {
      for (Run& child : step(std::move(r), s)) next.push_back(std::move(child));
    }
    check_branch_cap(next.size());
    runs = std::move(next);
  }
  return runs;
}

}  // namespace detail

namespace {

void require_unitary_protocol(const ir::Protocol& p, bool allow_dephase) {
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const ir::Step& s = p.steps[i];
    const auto* g = std::get_if<ir::GateStep>(&s);
    const bool ok = (g != nullptr && !g->condition) || (allow_dephase && std::holds_alternative<ir::DephaseStep>(s));
    if (!ok) {
      throw Error("step " + std::to_string(i) + " (" + std::string(ir::step_kind(s)) +
                  ") is not allowed in a measurement-free execution");
    }
  }
}

}  // namespace

DensityState run_unitary(const ir::Protocol& p, const DensityState& initial, const SimLimits& limits) {
  require_unitary_protocol(p, true);
  if (initial.num_qubits != p.registers.quantum_count) throw DimensionError("initial state qubit count mismatch");
  detail::Executor ex(p, detail::Mode::linear, 1, limits);
  detail::Run r{{}, std::vector<std::optional<std::size_t>>(p.registers.classical_count), initial.m, initial.num_qubits,
                false};
  auto runs = ex.run(std::move(r));
  return {runs.front().num_qubits, std::move(runs.front().op)};
}

StateVector run_unitary_pure(const ir::Protocol& p, StateVector initial, const SimLimits& limits) {
  require_unitary_protocol(p, false);
  const std::size_t n = p.registers.quantum_count;
  if (n > limits.max_pure_qubits()) {
    throw ResourceError("pure-state simulation needs " + std::to_string(n) + " qubits, cap is " +
                        std::to_string(limits.max_pure_qubits()));
  }
  if (initial.size() != (std::size_t{1} << n)) throw DimensionError("initial vector length mismatch");
  const std::size_t dim = initial.size();
  ComplexMatrix psi(dim, 1, std::move(initial));
  for (const ir::Step& s : p.steps) {
    const auto& g = std::get<ir::GateStep>(s);
    left_multiply(psi, n, ir::gate_matrix(g.gate), g.targets, g.controls, g.control_values);
  }
  return StateVector(psi.data().begin(), psi.data().end());
}

std::vector<Branch> enumerate_branches(const ir::Protocol& p, const DensityState& initial, std::size_t max_rus,
                                       const SimLimits& limits) {
  if (initial.num_qubits != p.registers.quantum_count) throw DimensionError("initial state qubit count mismatch");
  detail::Executor ex(p, detail::Mode::physical, max_rus, limits);
  detail::Run r{{}, std::vector<std::optional<std::size_t>>(p.registers.classical_count), initial.m, initial.num_qubits,
                false};
  std::vector<Branch> out;
  for (auto& run : ex.run(std::move(r))) {
    const double prob = run.op.trace().real();
    run.op *= 1.0 / prob;
    out.push_back({std::move(run.path), prob, {run.num_qubits, std::move(run.op)}, std::move(run.classical),
                   run.rus_failed});
  }
  return out;
}

DensityState ensemble_state(const std::vector<Branch>& branches) {
  if (branches.empty()) throw Error("ensemble_state: no branches");
  DensityState out{branches.front().state.num_qubits, ComplexMatrix(branches.front().state.m.rows(),
                                                                    branches.front().state.m.cols())};
  for (const auto& b : branches) out.m += Complex(b.probability) * b.state.m;
  return out;
}

}  // namespace demeasure::sim
