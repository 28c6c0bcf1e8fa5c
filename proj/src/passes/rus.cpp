#include <algorithm>
#include <cmath>
#include <string>

#include "common.hpp"
#include "demeasure/error.hpp"
#include "demeasure/passes.hpp"
#include "demeasure/sim.hpp"

namespace demeasure::passes {

namespace {

bool contains(const std::vector<std::size_t>& v, std::size_t x) { return std::find(v.begin(), v.end(), x) != v.end(); }

std::vector<std::size_t> mapped(const std::vector<std::size_t>& local, const std::vector<std::size_t>& to) {
  std::vector<std::size_t> out;
  out.reserve(local.size());
  for (std::size_t q : local) out.push_back(to.at(q));
  return out;
}

double success_probability(const ir::RusBlock& block, const ir::MeasurementOpSet& check) {
  const std::size_t w = block.workspace_qubits;
  ComplexMatrix psi(std::size_t{1} << w, 1);
  psi(0, 0) = 1.0;
  for (const auto& g : block.prepare) {
    sim::left_multiply(psi, w, ir::gate_matrix(g.gate), g.targets, g.controls, g.control_values);
  }
  double p = 0.0;
  for (std::size_t n : block.success) {
    ComplexMatrix branch = psi;
    sim::left_multiply(branch, w, check.ops.at(n), block.check_targets);
    for (const Complex& z : branch.data()) p += std::norm(z);
  }
  return std::clamp(p, 0.0, 1.0);
}

// X on the flag tensored with the exchange of two m-qubit registers.
ComplexMatrix flag_and_swap(std::size_t m) {
  const std::size_t half = std::size_t{1} << m;
  const std::size_t dim = 2 * half * half;
  std::vector<std::size_t> perm(dim);
  for (std::size_t f = 0; f < 2; ++f)
    for (std::size_t a = 0; a < half; ++a)
      for (std::size_t b = 0; b < half; ++b) perm[(f * half + a) * half + b] = ((1 - f) * half + b) * half + a;
  return detail::permutation_matrix(perm);
}

// Flips the last qubit iff the leading a-qubit value is a success outcome.
ComplexMatrix indicator_gate(std::size_t a, const std::vector<std::size_t>& success) {
  const std::size_t span = std::size_t{1} << a;
  std::vector<std::size_t> perm(2 * span);
  for (std::size_t v = 0; v < span; ++v)
    for (std::size_t bit = 0; bit < 2; ++bit) perm[v * 2 + bit] = v * 2 + (contains(success, v) ? 1 - bit : bit);
  return detail::permutation_matrix(perm);
}

}  // namespace

RusUnrolled unroll_rus_static(const ir::RusBlock& block, const ir::MeasurementOpSet& check, std::size_t copies,
                              std::size_t first_free, Completion completion) {
  if (copies == 0) throw PassError("rus-static", "N must be ≥ 1");
  if (block.output.size() != block.dest.size()) throw PassError("rus-static", "output and dest sizes differ");
  const Dilation dil = dilate_measurement(check, completion);
  const std::size_t a = dil.ancilla_qubits;
  const std::size_t m = block.output.size();
  const bool single = block.success.size() == 1;
  const bool use_indicator = !single && a > 0;

  RusUnrolled out;
  out.success_probability = success_probability(block, check);
  out.failure_probability = std::pow(1.0 - out.success_probability, static_cast<double>(copies));

  std::size_t next = first_free;
  for (std::size_t k = 0; k < copies; ++k) {
    RusCopy c;
    for (std::size_t i = 0; i < block.workspace_qubits; ++i) c.workspace.push_back(next++);
    for (std::size_t i = 0; i < a; ++i) c.check.push_back(next++);
    if (use_indicator) c.indicator = next++;
    c.flag = next++;

    for (const auto& g : block.prepare) {
      ir::GateStep s = g;
      s.targets = mapped(g.targets, c.workspace);
      s.controls = mapped(g.controls, c.workspace);
      out.steps.emplace_back(std::move(s));
    }
    ir::GateStep v{ir::Gate::literal(dil.unitary.matrix()), mapped(block.check_targets, c.workspace), {}, {}, {}};
    v.targets.insert(v.targets.end(), c.check.begin(), c.check.end());
    out.steps.emplace_back(std::move(v));
    if (use_indicator) {
      ir::GateStep ind{ir::Gate::literal(indicator_gate(a, block.success)), c.check, {}, {}, {}};
      ind.targets.push_back(*c.indicator);
      out.steps.emplace_back(std::move(ind));
    }
    out.copies.push_back(std::move(c));
  }

  const ComplexMatrix load = flag_and_swap(m);
  for (std::size_t k = 0; k < copies; ++k) {
    const RusCopy& c = out.copies[k];
    if (k > 0) out.steps.emplace_back(ir::GateStep{ir::Gate::named("CNOT"), {out.copies[k - 1].flag, c.flag}, {}, {}, {}});
    ir::GateStep s{ir::Gate::literal(load), {c.flag}, {}, {}, {}};
    const auto outputs = mapped(block.output, c.workspace);
    s.targets.insert(s.targets.end(), outputs.begin(), outputs.end());
    s.targets.insert(s.targets.end(), block.dest.begin(), block.dest.end());
    if (a == 0) {
      // Single-outcome check: it either always or never succeeds.
      if (!contains(block.success, 0)) continue;
    } else if (use_indicator) {
      s.controls.push_back(*c.indicator);
      s.control_values.push_back(1);
    } else {
      const auto bits = detail::bits_of(block.success.front(), a);
      s.controls.insert(s.controls.end(), c.check.begin(), c.check.end());
      s.control_values.insert(s.control_values.end(), bits.begin(), bits.end());
    }
    if (k > 0) {
      s.controls.push_back(out.copies[k - 1].flag);
      s.control_values.push_back(0);
    }
    out.steps.emplace_back(std::move(s));
  }
  return out;
}

}  // namespace demeasure::passes
