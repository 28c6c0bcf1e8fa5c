#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "demeasure/random.hpp"

namespace demeasure::ftclassical {

/// Which nonzero flip pattern a failed gate XORs onto its outputs.
enum class FailurePattern {
  uniform,     // every nonzero pattern equally likely
  single_bit,  // exactly one output flipped, chosen uniformly
};

/// Independent gate failures. A failed k-bit gate applies its ideal
/// action and then XORs a nonzero k-bit pattern onto its outputs.
struct GateErrorModel {
  double p3 = 0.0;
  double p2 = 0.0;
  double p1 = 0.0;
  FailurePattern pattern = FailurePattern::uniform;

  /// p3 = p2 = p1 = p.
  static GateErrorModel uniform(double p) { return {p, p, p, FailurePattern::uniform}; }
  /// Throws InvariantError unless every probability lies in [0, 1].
  void check() const;
};

/// Draws the flip pattern of a failed `width`-bit gate (1 <= width <= 3).
unsigned draw_pattern(SeededStream& rng, FailurePattern pattern, unsigned width);

/// 3^n-bit repetition code on a ternary hypercube. Bit i has coordinates
/// c_1..c_n with i = sum_d c_d 3^(d-1); triples along dimension d are the
/// bits that differ only in c_d.
struct HypercubeCode {
  std::size_t n = 0;
  std::vector<std::uint8_t> bits;

  static HypercubeCode filled(std::size_t n, std::uint8_t bit);
  std::size_t size() const { return bits.size(); }
  static std::size_t index(const std::vector<std::size_t>& coords);
  static std::vector<std::size_t> coords(std::size_t index, std::size_t n);

  friend bool operator==(const HypercubeCode&, const HypercubeCode&) = default;
};

inline constexpr std::size_t kMaxCodeLevel = 7;

using Triple = std::array<std::uint8_t, 3>;

/// Copies `in` onto two fresh zeros.
Triple amp_gate(std::uint8_t in, SeededStream& rng, const GateErrorModel& model);

/// Majority-counting gate followed by an AMP of its majority line; two
/// independently failing 3-bit gates.
Triple majority_organ(const Triple& in, SeededStream& rng, const GateErrorModel& model);

/// Depth-n AMP tree; the root gate fans out along dimension n, the last
/// level along dimension 1. Throws InvariantError for n > kMaxCodeLevel.
HypercubeCode encode_cascade(std::uint8_t bit, std::size_t n, SeededStream& rng, const GateErrorModel& model);

/// Majority organs on every triple along dimension 1, then 2, ..., n.
HypercubeCode correction_sweep(const HypercubeCode& code, SeededStream& rng, const GateErrorModel& model);

/// Majority over all 3^n bits.
std::uint8_t logical_readout(const HypercubeCode& code);

/// Majority over one representative (c_1 = 0) of each dimension-1 triple.
std::uint8_t triple_group_readout(const HypercubeCode& code);

/// Second operand of a transversal gate: none, another code, or a constant.
using Operand = std::variant<std::monostate, HypercubeCode, std::uint8_t>;

/// "not" (1-bit gates, p1), "and" = maj(a, b, 0), "or" = maj(a, b, 1),
/// "maj" = maj(a, b, c) for a constant c. Majority gates are 3-bit gates
/// whose majority line may be flipped by a failure. Throws Error for
/// unknown names and mismatched operands.
HypercubeCode transversal_gate(std::string_view gate, const HypercubeCode& a, const Operand& b, SeededStream& rng,
                               const GateErrorModel& model, std::uint8_t constant = 0);

/// Bitwise AMP: three copies of `a`.
std::array<HypercubeCode, 3> transversal_fanout(const HypercubeCode& a, SeededStream& rng,
                                                const GateErrorModel& model);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard error of the mean
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Trial t encodes 0 when t is even and 1 when odd, unless `encoded`
/// fixes the value. Trials run in batches of kLanes with one random
/// stream per batch, so results do not depend on `threads`.
struct McConfig {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::optional<std::uint8_t> encoded;
};

inline constexpr std::size_t kLanes = 256;

/// P(majority readout of a freshly encoded code != encoded bit).
McEstimate estimate_encoding_error(const GateErrorModel& model, std::size_t n, const McConfig& cfg);

/// Fraction of wrong code bits after `rounds` noisy sweeps from a clean
/// code. Requires rounds >= 20.
McEstimate estimate_steady_state_error(const GateErrorModel& model, std::size_t n, std::size_t rounds,
                                       const McConfig& cfg);

/// P(majority readout wrong) after `rounds` noisy sweeps from a clean code.
McEstimate estimate_logical_error(const GateErrorModel& model, std::size_t n, std::size_t rounds,
                                  const McConfig& cfg);

/// One code bit (at `coords`, default all zeros) of a steady-state code
/// controls a noisy 2-bit gate copying it onto a fresh target; the
/// estimate is P(target != encoded value).
McEstimate estimate_feedback_error(const GateErrorModel& model, std::size_t n, std::size_t rounds,
                                   const McConfig& cfg, const std::vector<std::size_t>& coords = {});

struct ThresholdEstimate {
  bool found = false;
  double crossing = 0.0;
  double resolution = 0.0;  // half-width of the final bracket
  std::vector<double> grid;
  std::vector<McEstimate> lower;   // logical error at n
  std::vector<McEstimate> higher;  // logical error at n + 1
  std::string diagnostic;
};

/// Crossing of the logical-error curves for codes n and n+1 (memory
/// workload, `rounds` sweeps, p3 = p2 = p1 = p): the first grid interval
/// where the larger code stops winning, refined by `bisections` steps.
ThresholdEstimate estimate_threshold(std::size_t n, const std::vector<double>& grid, std::size_t rounds,
                                     const McConfig& cfg, std::size_t bisections = 4);

}  // namespace demeasure::ftclassical
