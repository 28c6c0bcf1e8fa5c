// One PASS/FAIL line per acceptance criterion. Run without arguments for
// all criteria or with --criterion k for one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "demeasure/cli.hpp"
#include "demeasure/ftclassical.hpp"
#include "demeasure/passes.hpp"
#include "demeasure/sim.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace demeasure;
namespace t = demeasure::testing;
namespace ft = demeasure::ftclassical;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<std::size_t> range(std::size_t n) {
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(i);
  return v;
}

unsigned threads() { return std::max(1U, std::thread::hardware_concurrency()); }

ft::McConfig mc(std::size_t trials, std::uint64_t seed) {
  ft::McConfig c;
  c.trials = trials;
  c.seed = seed;
  c.threads = threads();
  return c;
}

const std::vector<t::Instance>& suite() {
  static const std::vector<t::Instance> s = t::instance_suite(100, 2024);
  return s;
}

Outcome equivalence() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (const auto& inst : suite()) {
    const auto a = passes::compile(t::measure_feedback_protocol(inst.opset, inst.table), {});
    const auto j = sim::channel_choi(a.protocol, {range(t::qubits_for(inst.d))});
    worst = std::max(worst, sim::compare_channels(j, t::direct_choi(inst.opset, inst.table)).distance);
  }
  const double secs = seconds_since(start);
  return {worst < 1e-10 && secs < 60, fmt("max Choi distance %.3e over %zu instances (< 1e-10), %.1f s (< 60 s)", worst,
                                          suite().size(), secs)};
}

Outcome born_rule() {
  double worst = 0.0;
  for (const auto& inst : suite()) {
    const auto a = passes::compile(t::measure_feedback_protocol(inst.opset, inst.table), {});
    const auto* write = a.ancilla_map.backing(0, a.protocol.steps.size() + 1000);
    if (write == nullptr) return {false, "no ancilla backs the measurement result"};
    const std::size_t q = t::qubits_for(inst.d);
    const std::size_t n = a.protocol.registers.quantum_count;
    for (std::uint64_t r = 0; r < 20; ++r) {
      const ComplexMatrix rho = random_density(inst.d, inst.seed * 100 + r);
      ComplexMatrix zeros(std::size_t{1} << (n - q), std::size_t{1} << (n - q));
      zeros(0, 0) = 1.0;
      const auto out = sim::run_unitary(a.protocol, sim::DensityState::from_matrix(n, kron(rho, zeros)));
      const ComplexMatrix marginal = reduce_qubits(out.m, n, write->qubits);
      const auto born = t::oracle::born_probabilities(inst.opset.ops, rho);
      for (std::size_t k = 0; k < marginal.rows(); ++k) {
        const double want = k < born.size() ? born[k] : 0.0;
        worst = std::max(worst, std::abs(marginal(k, k).real() - want));
      }
    }
  }
  return {worst < 1e-10, fmt("max |P_n - Tr[A_n^dag A_n rho]| = %.3e over %zu instances x 20 states (< 1e-10)", worst,
                             suite().size())};
}

Outcome reset_swap() {
  double worst_state = 0.0;
  double worst_spectrum = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const std::size_t d = 2 + i % 3;
    SeededStream rng(77, i);
    std::vector<Complex> probs(d);
    double total = 0.0;
    for (auto& p : probs) {
      p = rng.uniform() + 0.01;
      total += p.real();
    }
    for (auto& p : probs) p /= total;
    const ComplexMatrix rho = ComplexMatrix::diagonal(probs);
    const ComplexMatrix goal = t::random_pure(d, 500 + i);
    const auto rs = passes::build_reset_swap(goal, std::nullopt, Completion::seeded(i + 1));
    const ComplexMatrix zero = ComplexMatrix::basis(d, 0) * ComplexMatrix::basis(d, 0).adjoint();
    const ComplexMatrix out = rs.swap.matrix() * kron(rho, zero) * rs.swap.matrix().adjoint();
    worst_state = std::max(worst_state, matrix_distance(out, kron(goal * goal.adjoint(), rho)));
    const auto aux = hermitian_eigenvalues(partial_trace(out, d, d, Subsystem::B));
    const auto in = hermitian_eigenvalues(rho);
    for (std::size_t k = 0; k < d; ++k) worst_spectrum = std::max(worst_spectrum, std::abs(aux[k] - in[k]));
  }
  return {worst_state < 1e-10 && worst_spectrum < 1e-10,
          fmt("max final-state error %.3e, max spectrum error %.3e over 20 inputs, d in {2,3,4} (< 1e-10)", worst_state,
              worst_spectrum)};
}

Outcome dephasing() {
  double worst = 0.0;
  for (const auto& inst : suite()) {
    const auto a = passes::compile(t::measure_feedback_protocol(inst.opset, inst.table), {});
    std::vector<std::size_t> ancillas;
    for (const auto& r : a.ancilla_map.qubits) ancillas.push_back(r.qubit);
    const auto sys = range(t::qubits_for(inst.d));
    const auto before = sim::channel_choi(a.protocol, {sys});
    const auto after = sim::channel_choi(passes::insert_dephasing(a, ancillas).protocol, {sys});
    worst = std::max(worst, sim::compare_channels(before, after).distance);
  }
  ir::Protocol h;
  h.registers = {1, 0};
  h.steps.push_back(ir::GateStep{ir::Gate::named("H"), {0}, {}, {}, {}});
  const double control = sim::compare_channels(sim::channel_choi(h, {{0}}),
                                               sim::channel_choi(passes::append_dephasing(h, {0}), {{0}}))
                             .distance;
  return {worst < 1e-10 && control > 1e-2,
          fmt("ancilla dephasing max change %.3e (< 1e-10); system-dephasing control on H changes %.3f (> 1e-2)", worst,
              control)};
}

Outcome static_rus() {
  const auto start = Clock::now();
  double worst_prob = 0.0;
  double worst_state = 0.0;
  const double thetas[] = {std::numbers::pi, std::numbers::pi / 2, 0.0};
  const double ps[] = {0.25, 0.5, 0.75};
  for (int i = 0; i < 3; ++i) {
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto c = t::compare_rus(t::rus_protocol(thetas[i], std::numbers::pi / 3), n);
      const double fail = std::pow(1.0 - ps[i], static_cast<double>(n));
      worst_prob = std::max({worst_prob, std::abs(c.static_unloaded - fail), std::abs(c.declared_failure - fail),
                             std::abs(c.dynamic_failed - fail)});
      worst_state = std::max(worst_state, c.state_distance);
    }
  }
  const double secs = seconds_since(start);
  return {worst_prob < 1e-10 && worst_state < 1e-10 && secs < 30,
          fmt("p_s in {1/4,1/2,3/4}, N in 1..4: max |P(not loaded) - (1-p_s)^N| = %.3e, max state distance %.3e "
              "(< 1e-10), %.1f s (< 30 s)",
              worst_prob, worst_state, secs)};
}

Outcome encoding() {
  const auto start = Clock::now();
  const double p = 0.01;
  const auto e4 = ft::estimate_encoding_error(ft::GateErrorModel::uniform(p), 4, mc(1000000, 6));
  const auto e1 = ft::estimate_encoding_error(ft::GateErrorModel::uniform(p), 1, mc(1000000, 61));
  const double exact1 = t::oracle::encoding_error(1, ft::GateErrorModel::uniform(p));
  const double ratio = e4.mean / p;
  const bool band = ratio >= 0.35 && ratio <= 0.70;
  const bool oracle = std::abs(e1.mean - exact1) <= 3 * e1.std_error;
  const double secs = seconds_since(start);
  return {band && oracle && secs < 120,
          fmt("n=4: mean/p = %.4f +- %.4f (band [0.35, 0.70]); n=1: %.3e vs exact %.3e (3 sigma = %.1e); %.1f s", ratio,
              e4.std_error / p, e1.mean, exact1, 3 * e1.std_error, secs)};
}

Outcome steady_and_feedback() {
  const auto start = Clock::now();
  const double p = 0.004;
  const auto m = ft::GateErrorModel::uniform(p);
  const auto q = ft::estimate_steady_state_error(m, 3, 20, mc(1000000, 7));
  const auto f = ft::estimate_feedback_error(m, 3, 20, mc(1000000, 71));
  const double rq = q.mean / p;
  const double rf = f.mean / p;
  const bool ok_q = rq >= 0.3 && rq <= 0.8;
  const bool ok_f = rf >= 1.2 && rf <= 1.9;
  const double secs = seconds_since(start);
  return {ok_q && ok_f && secs < 300,
          fmt("steady q/p = %.4f +- %.4f (band [0.3, 0.8]: %s); feedback/p = %.4f +- %.4f (band [1.2, 1.9]: %s); %.1f s",
              rq, q.std_error / p, ok_q ? "in" : "OUT", rf, f.std_error / p, ok_f ? "in" : "OUT", secs)};
}

Outcome threshold() {
  const std::vector<double> grid{0.01, 0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4};
  const auto th = ft::estimate_threshold(1, grid, 1, mc(200000, 8), 4);
  if (!th.found) return {false, "no crossing: " + th.diagnostic};
  const bool bracket = th.crossing >= 0.02 && th.crossing <= 0.15;
  const double low = th.crossing / 2;
  const auto m = ft::GateErrorModel::uniform(low);
  const auto e1 = ft::estimate_logical_error(m, 1, 10, mc(1000000, 81));
  const auto e2 = ft::estimate_logical_error(m, 2, 10, mc(1000000, 82));
  const auto e3 = ft::estimate_logical_error(m, 3, 10, mc(1000000, 83));
  const double s12 = e1.mean / e2.mean;
  const double s23 = e2.mean / e3.mean;
  const bool suppress = s12 >= 5 && s23 >= 5;
  return {bracket && suppress,
          fmt("crossing p* = %.4f +- %.4f (bracket [0.02, 0.15]: %s); at p*/2 = %.4f, 10 rounds: e1/e2 = %.2f, "
              "e2/e3 = %.2f (need >= 5: %s)",
              th.crossing, th.resolution, bracket ? "in" : "OUT", low, s12, s23, suppress ? "yes" : "NO")};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("demeasure_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string fixtures = DEMEASURE_FIXTURES;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::vector<std::vector<std::string>> commands{
      {"compile", "--in", fixtures + "/bell_rus.ir", "--out", (dir / "c.ir").string(), "--rus-copies", "3", "--seed",
       "5"},
      {"verify", "--original", fixtures + "/bell_rus.ir", "--compiled", (dir / "c.ir").string()},
      {"mc", "encoding", "--p", "0.01", "--n", "3", "--trials", "100000", "--seed", "9"},
      {"mc", "steady", "--p", "0.01", "--n", "2", "--trials", "50000", "--seed", "9"},
      {"mc", "feedback", "--p", "0.01", "--n", "2", "--trials", "50000", "--seed", "9", "--coords", "1,2"},
      {"mc", "threshold", "--n", "1", "--trials", "20000", "--seed", "9", "--bisections", "2"},
  };
  std::size_t compared = 0;
  for (const auto& base : commands) {
    std::string reference;
    std::string reference_out;
    for (const char* threads : {"1", "3", "1"}) {
      auto args = base;
      const fs::path report = dir / "r.json";
      args.insert(args.end(), {"--threads", threads, "--report", report.string()});
      std::ostringstream out;
      std::ostringstream err;
      const int code = cli::run(args, out, err);
      if (code != 0) {
        fs::remove_all(dir);
        return {false, "command " + base[0] + " exited " + std::to_string(code) + ": " + err.str()};
      }
      const std::string text = slurp(report);
      if (reference.empty()) {
        reference = text;
        reference_out = out.str();
      } else if (text != reference || out.str() != reference_out) {
        fs::remove_all(dir);
        return {false, "report of '" + base[0] + " " + base[1] + "' differs between runs"};
      }
      ++compared;
    }
  }
  fs::remove_all(dir);
  return {true, fmt("%zu commands x 3 runs (threads 1, 3, 1): reports and output byte-identical", commands.size())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"measurement-elimination equivalence", equivalence},
      {"Born-rule agreement", born_rule},
      {"reset/swap", reset_swap},
      {"dephasing invariance", dephasing},
      {"static repeat-until-success", static_rus},
      {"encoding error band", encoding},
      {"steady-state and feedback error bands", steady_and_feedback},
      {"threshold bracket and suppression", threshold},
      {"determinism", determinism},
  };
  std::size_t only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::strtoul(argv[++i], nullptr, 10);
    } else {
      std::cerr << "usage: acceptance [--criterion k]\n";
      return 2;
    }
  }
  if (only > criteria.size()) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  bool all = true;
  for (std::size_t k = 1; k <= criteria.size(); ++k) {
    if (only != 0 && k != only) continue;
    Outcome o;
    try {
      o = criteria[k - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << " (" << criteria[k - 1].first
              << "): " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
