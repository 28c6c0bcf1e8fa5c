#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "demeasure/cli.hpp"
#include "demeasure/error.hpp"
#include "demeasure/ftclassical.hpp"
#include "demeasure/ir_json.hpp"
#include "demeasure/passes.hpp"
#include "demeasure/sim.hpp"
#include "demeasure/version.hpp"

namespace demeasure::cli {

using ir::Json;

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

namespace {

// Failure with a chosen exit code; message already formatted.
struct Exit {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kInputError, "cannot read input file '" + path + "'"};
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Exit{kInputError, "cannot write output file '" + path + "'"};
  out << text;
  if (!out) throw Exit{kInputError, "failed writing '" + path + "'"};
}

struct Common {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::size_t max_qubits = 10;
  std::size_t max_branches = 4096;
  bool timing = false;
  std::string report_path;
};

void add_common(CLI::App* cmd, Common& c, bool with_seed = true) {
  if (with_seed) cmd->add_option("--seed", c.seed, "Random seed (falls back to DEMEASURE_SEED)");
  cmd->add_option("--threads", c.threads, "Worker threads; results do not depend on it")->check(CLI::Range(1U, 1024U));
  cmd->add_option("--max-qubits", c.max_qubits, "Density-matrix qubit cap")->capture_default_str();
  cmd->add_option("--max-branches", c.max_branches, "Branch cap for measurement trees")->capture_default_str();
  cmd->add_flag("--timing", c.timing, "Include per-pass timings in reports");
  cmd->add_option("--report", c.report_path, "Write a JSON run report to this file");
}

std::uint64_t resolve_seed(const Common& c, std::ostream& err) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("DEMEASURE_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw Exit{kInputError, "DEMEASURE_SEED is not an unsigned integer: '" + std::string(s) + "'"};
    }
    return v;
  }
  std::random_device rd;
  const std::uint64_t v = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "demeasure: no --seed given; using seed " << v << "\n";
  return v;
}

sim::SimLimits limits_of(const Common& c) {
  sim::SimLimits l;
  l.max_qubits = c.max_qubits;
  l.max_branches = c.max_branches;
  l.threads = c.threads;
  return l;
}

struct Report {
  Json command = Json::object();
  Json inputs = Json::array();
  Json passes = Json::array();
  Json verdicts = Json::array();
  Json estimates = Json::array();

  void input(const std::string& path, const std::string& bytes) {
    inputs.push_back(Json{{"path", path}, {"fnv1a64", fnv1a_hex(bytes)}});
  }

  Json to_json() const {
    Json j = Json::object();
    j["tool_version"] = kToolVersion;
    j["ir_version"] = ir::kIrVersion;
    j["command"] = command;
    j["inputs"] = inputs;
    j["passes"] = passes;
    j["verdicts"] = verdicts;
    j["estimates"] = estimates;
    return j;
  }
};

void emit_report(const Common& c, const Report& r) {
  if (!c.report_path.empty()) write_file(c.report_path, ir::dump_json(r.to_json()));
}

std::string describe_parse_error(const std::string& path, const ParseError& e) {
  std::string where = path;
  if (e.line() > 0) where += ":" + std::to_string(e.line()) + ":" + std::to_string(e.column());
  return where + ": " + e.what();
}

ir::Protocol load_protocol(const std::string& path, Report& report, std::ostream& err) {
  const std::string text = read_file(path);
  report.input(path, text);
  ir::Protocol p;
  try {
    p = ir::parse_protocol(text);
  } catch (const ParseError& e) {
    throw Exit{kInputError, describe_parse_error(path, e)};
  }
  const auto diags = ir::validate(p);
  if (!diags.empty()) {
    for (const auto& d : diags) err << path << ": " << ir::format_diagnostic(d) << "\n";
    throw Exit{kInputError, path + ": protocol failed validation (" + std::to_string(diags.size()) + " problem(s))"};
  }
  return p;
}

// ---- compile ---------------------------------------------------------------

struct CompileArgs {
  Common common;
  std::string in;
  std::string out;
  std::string passes;
  std::size_t rus_copies = 1;
  std::size_t code_level = 0;
};

int cmd_compile(const CompileArgs& a, std::ostream& out, std::ostream& err) {
  Report report;
  const ir::Protocol p = load_protocol(a.in, report, err);
  passes::PassOptions opts;
  opts.completion_seed = resolve_seed(a.common, err);
  opts.rus_copies = a.rus_copies;
  opts.classical_code_level = a.code_level;
  // Gate-only artifacts are verified on state vectors, which allow twice
  // the density-matrix qubit count.
  opts.max_qubits = 2 * a.common.max_qubits;
  if (!a.passes.empty()) opts.passes = passes::parse_pass_list(a.passes);
  const passes::CompiledArtifact art = passes::compile(p, opts);
  write_file(a.out, passes::serialize_artifact(art, a.common.timing));

  report.command = Json{{"name", "compile"},
                        {"passes", a.passes.empty() ? "default" : a.passes},
                        {"seed", opts.completion_seed},
                        {"rus_copies", opts.rus_copies},
                        {"code_level", opts.classical_code_level},
                        {"max_qubits", a.common.max_qubits}};
  for (std::size_t i = 0; i < opts.passes.size(); ++i) {
    Json entry{{"name", opts.passes[i].name}, {"options", opts.passes[i].options}};
    if (a.common.timing) entry["milliseconds"] = art.timings[i].milliseconds;
    report.passes.push_back(std::move(entry));
  }
  emit_report(a.common, report);

  out << "compiled " << a.in << " -> " << a.out << ": " << art.protocol.steps.size() << " steps on "
      << art.protocol.registers.quantum_count << " qubits (" << art.ancilla_map.qubits.size() << " ancillas)\n";
  for (const auto& r : art.ancilla_map.rus) {
    out << "rus block at step " << r.origin_step << ": " << r.copies << " copies, p_success = " << r.success_probability
        << ", declared failure probability = " << r.failure_probability << "\n";
  }
  if (a.common.timing) {
    for (const auto& t : art.timings) out << "  " << t.pass << ": " << t.milliseconds << " ms\n";
  }
  return kOk;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
  Common common;
  std::string original;
  std::string compiled;
  double tol = kTolerances.channel;
  std::optional<std::size_t> max_rus;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  Report report;
  const ir::Protocol orig = load_protocol(a.original, report, err);
  const std::string ctext = read_file(a.compiled);
  report.input(a.compiled, ctext);
  passes::CompiledArtifact art;
  try {
    art = passes::parse_artifact(ctext);
  } catch (const ParseError& e) {
    throw Exit{kInputError, describe_parse_error(a.compiled, e)};
  }
  if (const auto diags = ir::validate(art.protocol); !diags.empty()) {
    for (const auto& d : diags) err << a.compiled << ": " << ir::format_diagnostic(d) << "\n";
    throw Exit{kInputError, a.compiled + ": protocol failed validation"};
  }
  if (art.original_qubits != orig.registers.quantum_count) {
    throw Exit{kInputError, "compiled protocol was built for " + std::to_string(art.original_qubits) +
                                " system qubits, original has " + std::to_string(orig.registers.quantum_count)};
  }
  if (!(a.tol >= 0.0)) throw Exit{kInputError, "--tol must be non-negative"};

  const sim::SimLimits limits = limits_of(a.common);
  std::vector<std::size_t> system(art.original_qubits);
  for (std::size_t i = 0; i < system.size(); ++i) system[i] = i;
  sim::ChannelSpec so{system, std::nullopt, a.max_rus.value_or(art.rus_attempts()), false};
  sim::ChannelSpec sc{system, std::nullopt, 1, false};
  const ChoiMatrix j_orig = sim::channel_choi(orig, so, limits);
  const ChoiMatrix j_comp = sim::channel_choi(art.protocol, sc, limits);
  if (j_orig.m.rows() != j_comp.m.rows()) throw Exit{kInputError, "channels act on different dimensions"};
  const sim::Verdict v = sim::compare_channels(j_orig, j_comp, a.tol);

  report.command = Json{{"name", "verify"},
                        {"tol", a.tol},
                        {"max_rus", so.max_rus},
                        {"max_qubits", a.common.max_qubits},
                        {"max_branches", a.common.max_branches}};
  report.verdicts.push_back(Json{{"name", "channel"},
                                 {"metric", "max-entry Choi distance"},
                                 {"distance", v.distance},
                                 {"tolerance", v.tolerance},
                                 {"pass", v.pass}});
  emit_report(a.common, report);

  out << (v.pass ? "PASS" : "FAIL") << ": Choi distance " << v.distance << (v.pass ? " <= " : " > ") << "tolerance "
      << v.tolerance << "\n";
  return v.pass ? kOk : kVerifyFailed;
}

// ---- mc --------------------------------------------------------------------

struct McArgs {
  Common common;
  std::string estimator;
  double p = 0.0;
  std::optional<double> p2;
  std::optional<double> p1;
  std::size_t n = 3;
  std::size_t trials = 100000;
  std::optional<std::size_t> rounds;
  std::optional<int> encoded;
  std::vector<std::size_t> coords;
  std::vector<double> grid;
  std::size_t bisections = 4;
  std::string pattern = "uniform";
};

Json estimate_json(const std::string& name, const Json& params, const ftclassical::McEstimate& e) {
  return Json{{"estimator", name},
              {"params", params},
              {"mean", e.mean},
              {"stderr", e.std_error},
              {"trials", e.trials},
              {"seed", e.seed}};
}

int cmd_mc(const McArgs& a, std::ostream& out, std::ostream& err) {
  namespace ft = ftclassical;
  static const std::vector<std::string> names = {"encoding", "steady", "logical", "threshold", "feedback"};
  if (std::find(names.begin(), names.end(), a.estimator) == names.end()) {
    throw Exit{kInputError, "unknown estimator '" + a.estimator + "' (expected encoding, steady, logical, threshold or feedback)"};
  }
  ft::GateErrorModel model{a.p, a.p2.value_or(a.p), a.p1.value_or(a.p), ft::FailurePattern::uniform};
  if (a.pattern == "single") {
    model.pattern = ft::FailurePattern::single_bit;
  } else if (a.pattern != "uniform") {
    throw Exit{kInputError, "--pattern must be 'uniform' or 'single'"};
  }
  if (a.estimator == "threshold" && (a.pattern != "uniform" || a.p2 || a.p1)) {
    throw Exit{kInputError, "threshold sweeps p3 = p2 = p1 with the uniform pattern; drop --pattern, --p2 and --p1"};
  }
  ft::McConfig cfg;
  cfg.trials = a.trials;
  cfg.seed = resolve_seed(a.common, err);
  cfg.threads = a.common.threads;
  if (a.encoded) {
    if (*a.encoded != 0 && *a.encoded != 1) throw Exit{kInputError, "--encoded must be 0 or 1"};
    cfg.encoded = static_cast<std::uint8_t>(*a.encoded);
  }
  Report report;
  Json params{{"p3", model.p3}, {"p2", model.p2}, {"p1", model.p1}, {"pattern", a.pattern}, {"n", a.n}};
  if (a.encoded) params["encoded"] = *a.encoded;

  std::size_t rounds = 0;
  try {
    if (a.estimator == "encoding") {
      const auto e = ft::estimate_encoding_error(model, a.n, cfg);
      report.estimates.push_back(estimate_json("encoding", params, e));
    } else if (a.estimator == "steady") {
      rounds = a.rounds.value_or(20);
      params["rounds"] = rounds;
      report.estimates.push_back(
          estimate_json("steady", params, ft::estimate_steady_state_error(model, a.n, rounds, cfg)));
    } else if (a.estimator == "logical") {
      rounds = a.rounds.value_or(10);
      params["rounds"] = rounds;
      report.estimates.push_back(estimate_json("logical", params, ft::estimate_logical_error(model, a.n, rounds, cfg)));
    } else if (a.estimator == "feedback") {
      rounds = a.rounds.value_or(20);
      params["rounds"] = rounds;
      if (!a.coords.empty()) params["coords"] = a.coords;
      report.estimates.push_back(
          estimate_json("feedback", params, ft::estimate_feedback_error(model, a.n, rounds, cfg, a.coords)));
    } else {
      rounds = a.rounds.value_or(1);
      std::vector<double> grid = a.grid;
      if (grid.empty()) grid = {0.01, 0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4};
      const auto t = ft::estimate_threshold(a.n, grid, rounds, cfg, a.bisections);
      Json tp{{"n", a.n}, {"n_plus_1", a.n + 1}, {"rounds", rounds}, {"grid", grid}, {"bisections", a.bisections}};
      Json est{{"estimator", "threshold"}, {"params", tp}, {"found", t.found}};
      if (t.found) {
        est["crossing"] = t.crossing;
        est["resolution"] = t.resolution;
      } else {
        est["diagnostic"] = t.diagnostic;
      }
      Json curve = Json::array();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        curve.push_back(Json{{"p", grid[i]},
                             {"lower", t.lower[i].mean},
                             {"lower_stderr", t.lower[i].std_error},
                             {"higher", t.higher[i].mean},
                             {"higher_stderr", t.higher[i].std_error}});
      }
      est["curve"] = std::move(curve);
      est["trials"] = cfg.trials;
      est["seed"] = cfg.seed;
      report.estimates.push_back(std::move(est));
    }
  } catch (const InvariantError& e) {
    throw Exit{kInputError, std::string("mc ") + a.estimator + ": " + e.what()};
  } catch (const DimensionError& e) {
    throw Exit{kInputError, std::string("mc ") + a.estimator + ": " + e.what()};
  }

  report.command = Json{{"name", "mc"}, {"estimator", a.estimator}, {"trials", cfg.trials}, {"seed", cfg.seed}};
  emit_report(a.common, report);

  const Json& e = report.estimates.back();
  if (a.estimator == "threshold") {
    if (e["found"].get<bool>()) {
      out << "threshold n=" << a.n << " vs n=" << a.n + 1 << ": p* = " << e["crossing"].get<double>() << " +- "
          << e["resolution"].get<double>() << "\n";
    } else {
      out << "threshold n=" << a.n << " vs n=" << a.n + 1 << ": " << e["diagnostic"].get<std::string>() << "\n";
    }
  } else {
    const double mean = e["mean"].get<double>();
    const double se = e["stderr"].get<double>();
    out << a.estimator << ": " << mean << " +- " << se;
    if (a.p > 0.0) out << " (mean/p = " << mean / a.p << " +- " << se / a.p << ")";
    out << ", " << cfg.trials << " trials, seed " << cfg.seed << "\n";
  }
  return kOk;
}

// ---- report ----------------------------------------------------------------

int cmd_report(const std::string& path, std::ostream& out) {
  const std::string text = read_file(path);
  Json j;
  try {
    j = ir::parse_json_text(text);
  } catch (const ParseError& e) {
    throw Exit{kInputError, describe_parse_error(path, e)};
  }
  if (j.is_object() && j.contains("tool_version") && j.contains("command")) {
    out << "run report (tool " << j["tool_version"].get<std::string>() << ")\n";
    out << "command: " << j["command"].dump() << "\n";
    for (const auto& i : j.value("inputs", Json::array()))
      out << "input: " << i.value("path", "?") << " fnv1a64=" << i.value("fnv1a64", "?") << "\n";
    for (const auto& p : j.value("passes", Json::array())) {
      out << "pass: " << p.value("name", "?");
      if (p.contains("milliseconds")) out << " (" << p["milliseconds"].get<double>() << " ms)";
      out << "\n";
    }
    for (const auto& v : j.value("verdicts", Json::array())) {
      out << "verdict " << v.value("name", "?") << ": " << (v.value("pass", false) ? "PASS" : "FAIL")
          << " distance=" << v.value("distance", 0.0) << " tol=" << v.value("tolerance", 0.0) << "\n";
    }
    for (const auto& e : j.value("estimates", Json::array())) {
      out << "estimate " << e.value("estimator", "?") << ": ";
      if (e.contains("mean")) {
        out << e["mean"].get<double>() << " +- " << e["stderr"].get<double>();
      } else if (e.value("found", false)) {
        out << "p* = " << e["crossing"].get<double>() << " +- " << e["resolution"].get<double>();
      } else {
        out << e.value("diagnostic", "no result");
      }
      out << "\n";
    }
    return kOk;
  }
  passes::CompiledArtifact art;
  try {
    art = passes::parse_artifact(text);
  } catch (const ParseError& e) {
    throw Exit{kInputError, describe_parse_error(path, e)};
  }
  std::map<std::string, std::size_t> kinds;
  for (const auto& s : art.protocol.steps) ++kinds[std::string(ir::step_kind(s))];
  out << "protocol: " << art.protocol.registers.quantum_count << " qubits, " << art.protocol.registers.classical_count
      << " bit-groups, " << art.protocol.steps.size() << " steps\n";
  for (const auto& [k, n] : kinds) out << "  " << k << ": " << n << "\n";
  if (!art.ancilla_map.qubits.empty()) {
    out << "system qubits: " << art.original_qubits << ", ancillas: " << art.ancilla_map.qubits.size() << "\n";
    for (const auto& r : art.ancilla_map.qubits) {
      out << "  qubit " << r.qubit << ": " << r.role << " (pass " << r.pass << ", source step " << r.origin_step;
      if (r.group) out << ", bit-group " << *r.group;
      out << ")\n";
    }
  }
  const auto diags = ir::validate(art.protocol);
  out << (diags.empty() ? "valid\n" : "INVALID\n");
  for (const auto& d : diags) out << "  " << ir::format_diagnostic(d) << "\n";
  return diags.empty() ? kOk : kInputError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compile measurement-based quantum protocols into measurement-free circuits, verify them, and run "
               "fault-tolerant classical Monte Carlo experiments.",
               "demeasure"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CompileArgs ca;
  auto* compile = app.add_subcommand("compile", "Rewrite a protocol into a measurement-free artifact");
  compile->add_option("--in", ca.in, "Input protocol")->required();
  compile->add_option("--out", ca.out, "Output artifact")->required();
  compile->add_option("--passes", ca.passes, "Comma-separated pass list, e.g. dilate,feedback,rus-static:N=4");
  compile->add_option("--rus-copies", ca.rus_copies, "Default copy count for rus-static")->capture_default_str();
  compile->add_option("--code-level", ca.code_level, "Classical repetition-code level to record")->capture_default_str();
  add_common(compile, ca.common);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Compare the channels of an original protocol and its compilation");
  verify->add_option("--original", va.original, "Measurement-based protocol")->required();
  verify->add_option("--compiled", va.compiled, "Compiled artifact or protocol")->required();
  verify->add_option("--tol", va.tol, "Max-entry Choi distance tolerance")->capture_default_str();
  verify->add_option("--max-rus", va.max_rus, "RUS attempts for the original (default: copies in the artifact)");
  add_common(verify, va.common, false);

  McArgs ma;
  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate for the fault-tolerant classical layer");
  mc->add_option("estimator", ma.estimator, "encoding | steady | logical | threshold | feedback")->required();
  mc->add_option("--p", ma.p, "3-bit gate failure probability")->capture_default_str();
  mc->add_option("--p2", ma.p2, "2-bit gate failure probability (default: --p)");
  mc->add_option("--p1", ma.p1, "1-bit gate failure probability (default: --p)");
  mc->add_option("--n", ma.n, "Code level (3^n bits)")->capture_default_str();
  mc->add_option("--trials", ma.trials, "Monte Carlo trials")->capture_default_str();
  mc->add_option("--rounds", ma.rounds, "Correction rounds");
  mc->add_option("--encoded", ma.encoded, "Fix the encoded value (default: alternate 0 and 1)");
  mc->add_option("--coords", ma.coords, "Feedback code-bit coordinates")->delimiter(',');
  mc->add_option("--grid", ma.grid, "Threshold p grid")->delimiter(',');
  mc->add_option("--bisections", ma.bisections, "Threshold refinement steps")->capture_default_str();
  mc->add_option("--pattern", ma.pattern, "Failure pattern: uniform | single")->capture_default_str();
  add_common(mc, ma.common);

  std::string report_in;
  auto* report = app.add_subcommand("report", "Summarize a run report, artifact or protocol");
  report->add_option("file", report_in, "JSON file")->required();

  std::vector<const char*> argv{"demeasure"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*compile) return cmd_compile(ca, out, err);
    if (*verify) return cmd_verify(va, out, err);
    if (*mc) return cmd_mc(ma, out, err);
    return cmd_report(report_in, out);
  } catch (const Exit& e) {
    err << "demeasure: " << e.message << "\n";
    return e.code;
  } catch (const PassError& e) {
    err << "demeasure: pass error: " << e.what() << "\n";
    return kPassError;
  } catch (const ResourceError& e) {
    err << "demeasure: resource cap: " << e.what() << "\n";
    return kResourceCap;
  } catch (const ParseError& e) {
    err << "demeasure: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "demeasure: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace demeasure::cli
