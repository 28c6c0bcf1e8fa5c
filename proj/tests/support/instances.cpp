#include "instances.hpp"

#include <cmath>
#include <numbers>

#include "demeasure/passes.hpp"
#include "demeasure/random.hpp"
#include "oracles.hpp"

namespace demeasure::testing {

std::size_t qubits_for(std::size_t dim) {
  std::size_t q = 0;
  while ((std::size_t{1} << q) < dim) ++q;
  return q;
}

ir::MeasurementOpSet random_opset(std::size_t d, std::size_t k, std::uint64_t seed) {
  const ComplexMatrix u = random_unitary(d * k, seed).matrix();
  ir::MeasurementOpSet set{d, {}};
  for (std::size_t n = 0; n < k; ++n) set.ops.push_back(u.block(n * d, 0, d, d));
  return set;
}

std::vector<ComplexMatrix> random_feedback_table(std::size_t d, std::size_t k, std::uint64_t seed) {
  std::vector<ComplexMatrix> table;
  for (std::size_t n = 0; n < k; ++n) table.push_back(random_unitary(d, seed * 31 + n + 1).matrix());
  return table;
}

ComplexMatrix random_pure(std::size_t d, std::uint64_t seed) {
  SeededStream rng(seed, 17);
  ComplexMatrix v(d, 1);
  double norm = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    v(i, 0) = Complex(rng.normal(), rng.normal());
    norm += std::norm(v(i, 0));
  }
  v *= 1.0 / std::sqrt(norm);
  return v;
}

ir::Protocol measure_feedback_protocol(const ir::MeasurementOpSet& opset, const std::vector<ComplexMatrix>& table) {
  const std::size_t q = qubits_for(opset.dim);
  ir::Protocol p;
  p.registers = {q, 1};
  p.op_tables["m"] = opset;
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < q; ++i) targets.push_back(i);
  p.steps.push_back(ir::MeasureStep{"m", targets, 0});
  if (!table.empty()) {
    ir::FeedbackStep fb{0, targets, {}};
    for (std::size_t n = 0; n < table.size(); ++n) fb.table.push_back({n, ir::Gate::literal(table[n])});
    p.steps.push_back(fb);
  }
  return p;
}

ChoiMatrix direct_choi(const ir::MeasurementOpSet& opset, const std::vector<ComplexMatrix>& table) {
  std::vector<ComplexMatrix> kraus;
  for (std::size_t n = 0; n < opset.ops.size(); ++n) {
    kraus.push_back(table.empty() ? opset.ops[n] : table[n] * opset.ops[n]);
  }
  return oracle::kraus_choi(kraus);
}

std::vector<Instance> instance_suite(std::size_t count, std::uint64_t base_seed) {
  std::vector<Instance> out;
  const std::size_t dims[] = {2, 4};
  const std::size_t ks[] = {2, 3, 4};
  for (std::size_t i = 0; i < count; ++i) {
    Instance inst;
    inst.d = dims[i % 2];
    inst.k = ks[(i / 2) % 3];
    inst.seed = base_seed + i;
    inst.opset = random_opset(inst.d, inst.k, inst.seed);
    inst.table = random_feedback_table(inst.d, inst.k, inst.seed + 1000);
    out.push_back(std::move(inst));
  }
  return out;
}

ComplexMatrix ry(double angle) {
  const double c = std::cos(angle / 2);
  const double s = std::sin(angle / 2);
  return ComplexMatrix::from_rows({{c, -s}, {s, c}});
}

ir::Protocol random_protocol(std::uint64_t seed) {
  SeededStream rng(seed, 3);
  auto qubit = [&] { return static_cast<std::size_t>(rng.below(3)); };
  ir::Protocol p;
  p.registers = {3, 2};
  p.metadata["name"] = "random-" + std::to_string(seed);
  p.op_tables["z"] = {2, {ComplexMatrix::from_rows({{1, 0}, {0, 0}}), ComplexMatrix::from_rows({{0, 0}, {0, 1}})}};
  p.op_tables["w"] = random_opset(2, 3, seed);

  const std::size_t a = qubit();
  const std::size_t b = (a + 1 + rng.below(2)) % 3;
  p.steps.push_back(ir::GateStep{ir::Gate::named("H"), {a}, {}, {}, {}});
  p.steps.push_back(ir::GateStep{ir::Gate::literal(random_unitary(4, seed + 5).matrix()), {a, b}, {}, {}, {}});
  p.steps.push_back(ir::GateStep{ir::Gate::named("X"), {b}, {a}, {static_cast<int>(rng.below(2))}, {}});
  p.steps.push_back(ir::MeasureStep{"w", {a}, 0});
  ir::FeedbackStep fb{0, {a}, {}};
  fb.table.push_back({0, ir::Gate::named("I")});
  fb.table.push_back({1, ir::Gate::named("X")});
  fb.table.push_back({2, ir::Gate::literal(random_unitary(2, seed + 9).matrix())});
  p.steps.push_back(fb);
  p.steps.push_back(ir::GateStep{ir::Gate::named("Z"), {b}, {}, {}, ir::ClassicalCondition{0, 1}});
  p.steps.push_back(ir::ResetStep{{qubit()}, random_pure(2, seed + 11)});
  if (rng.bernoulli(0.5)) {
    p.steps.push_back(ir::DephaseStep{{qubit()}, std::nullopt});
  } else {
    p.steps.push_back(ir::DephaseStep{{qubit()}, random_unitary(2, seed + 13).matrix()});
  }
  ir::RusBlock rus;
  rus.workspace_qubits = 2;
  rus.prepare.push_back(ir::GateStep{ir::Gate::literal(ry(rng.uniform() * 3.0)), {0}, {}, {}, {}});
  rus.prepare.push_back(ir::GateStep{ir::Gate::named("CNOT"), {0, 1}, {}, {}, {}});
  rus.check_table = "z";
  rus.check_targets = {1};
  rus.success = {0};
  rus.output = {0};
  rus.dest = {qubit()};
  rus.result = 1;
  p.steps.push_back(rus);
  return p;
}

ir::Protocol reset_protocol() {
  ir::Protocol p;
  p.registers = {1, 1};
  p.op_tables["z"] = {2, {ComplexMatrix::from_rows({{1, 0}, {0, 0}}), ComplexMatrix::from_rows({{0, 0}, {0, 1}})}};
  p.steps.push_back(ir::MeasureStep{"z", {0}, 0});
  p.steps.push_back(ir::FeedbackStep{0, {0}, {{0, ir::Gate::named("I")}, {1, ir::Gate::named("X")}}});
  return p;
}

ir::Protocol rus_protocol(double theta, double phi) {
  ir::Protocol p;
  p.registers = {1, 1};
  p.op_tables["z"] = {2, {ComplexMatrix::from_rows({{1, 0}, {0, 0}}), ComplexMatrix::from_rows({{0, 0}, {0, 1}})}};
  ir::RusBlock rus;
  rus.workspace_qubits = 2;
  rus.prepare.push_back(ir::GateStep{ir::Gate::literal(ry(theta)), {0}, {}, {}, {}});
  rus.prepare.push_back(ir::GateStep{ir::Gate::named("CNOT"), {0, 1}, {}, {}, {}});
  rus.prepare.push_back(ir::GateStep{ir::Gate::literal(ry(phi)), {1}, {}, {}, {}});
  rus.check_table = "z";
  rus.check_targets = {1};
  rus.success = {0};
  rus.output = {0};
  rus.dest = {0};
  rus.result = 0;
  p.steps.push_back(rus);
  return p;
}

}  // namespace demeasure::testing

namespace demeasure::testing {

RusComparison compare_rus(const ir::Protocol& p, std::size_t copies) {
  passes::PassOptions opts;
  opts.passes = passes::parse_pass_list("rus-static:N=" + std::to_string(copies));
  const passes::CompiledArtifact a = passes::compile(p, opts);
  const passes::RusRecord& rec = a.ancilla_map.rus.at(0);
  RusComparison out;
  out.success_probability = rec.success_probability;
  out.declared_failure = rec.failure_probability;
  out.compiled_qubits = a.protocol.registers.quantum_count;
  out.compiled_steps = a.protocol.steps.size();

  const std::size_t n = a.protocol.registers.quantum_count;
  sim::StateVector psi(std::size_t{1} << n, 0.0);
  psi[0] = 1.0;
  psi = sim::run_unitary_pure(a.protocol, psi, {.max_qubits = 16});
  std::vector<std::size_t> keep = rec.dest;
  keep.push_back(rec.loaded_flag);
  const ComplexMatrix joint = sim::reduced_density(psi, n, keep);
  const std::size_t r = std::size_t{1} << rec.dest.size();
  ComplexMatrix loaded(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) loaded(i, j) = joint(2 * i + 1, 2 * j + 1);
  const double p_loaded = loaded.trace().real();
  out.static_unloaded = 1.0 - p_loaded;

  const auto branches = sim::enumerate_branches(p, sim::DensityState::ground(p.registers.quantum_count), copies);
  ComplexMatrix dyn(r, r);
  double p_success = 0.0;
  for (const auto& b : branches) {
    if (b.rus_failed) {
      out.dynamic_failed += b.probability;
      continue;
    }
    dyn += b.probability * reduce_qubits(b.state.m, b.state.num_qubits, rec.dest);
    p_success += b.probability;
  }
  if (p_loaded > 1e-14 && p_success > 1e-14) {
    out.state_distance = matrix_distance((1.0 / p_loaded) * loaded, (1.0 / p_success) * dyn);
  }
  return out;
}

}  // namespace demeasure::testing
