#include <string>

#include "demeasure/error.hpp"
#include "demeasure/ftclassical.hpp"

namespace demeasure::ftclassical {

namespace {

std::size_t pow3(std::size_t n) {
  std::size_t v = 1;
  for (std::size_t i = 0; i < n; ++i) v *= 3;
  return v;
}

std::uint8_t maj(std::uint8_t a, std::uint8_t b, std::uint8_t c) { return static_cast<std::uint8_t>((a + b + c) >= 2); }

// Applies a 3-bit gate's noise to its outputs in place.
void noisy3(Triple& out, SeededStream& rng, const GateErrorModel& model) {
  if (!rng.bernoulli(model.p3)) return;
  const unsigned pattern = draw_pattern(rng, model.pattern, 3);
  for (unsigned j = 0; j < 3; ++j) out[j] ^= static_cast<std::uint8_t>((pattern >> j) & 1U);
}

void require_same_shape(const HypercubeCode& a, const HypercubeCode& b) {
  if (a.n != b.n || a.bits.size() != b.bits.size()) throw DimensionError("transversal gate: codes differ in size");
}

}  // namespace

void GateErrorModel::check() const {
  for (double p : {p3, p2, p1}) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvariantError("gate failure probability " + std::to_string(p) + " not in [0, 1]");
  }
}

unsigned draw_pattern(SeededStream& rng, FailurePattern pattern, unsigned width) {
  if (pattern == FailurePattern::single_bit) return 1U << rng.below(width);
  return 1U + static_cast<unsigned>(rng.below((1U << width) - 1));
}

HypercubeCode HypercubeCode::filled(std::size_t n, std::uint8_t bit) {
  if (n > kMaxCodeLevel) throw InvariantError("code level " + std::to_string(n) + " exceeds " + std::to_string(kMaxCodeLevel));
  return {n, std::vector<std::uint8_t>(pow3(n), bit)};
}

std::size_t HypercubeCode::index(const std::vector<std::size_t>& coords) {
  std::size_t i = 0;
  std::size_t stride = 1;
  for (std::size_t c : coords) {
    if (c > 2) throw DimensionError("hypercube coordinate must be 0, 1 or 2");
    i += c * stride;
    stride *= 3;
  }
  return i;
}

std::vector<std::size_t> HypercubeCode::coords(std::size_t index, std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t d = 0; d < n; ++d) {
    out[d] = index % 3;
    index /= 3;
  }
  return out;
}

Triple amp_gate(std::uint8_t in, SeededStream& rng, const GateErrorModel& model) {
  Triple out{in, in, in};
  noisy3(out, rng, model);
  return out;
}

Triple majority_organ(const Triple& in, SeededStream& rng, const GateErrorModel& model) {
  // Counting gate: line 0 carries the majority, the other lines are
  // discarded; only line 0 of its failure pattern matters.
  Triple counted{maj(in[0], in[1], in[2]), in[1], in[2]};
  noisy3(counted, rng, model);
  return amp_gate(counted[0], rng, model);
}

HypercubeCode encode_cascade(std::uint8_t bit, std::size_t n, SeededStream& rng, const GateErrorModel& model) {
  HypercubeCode code = HypercubeCode::filled(n, 0);
  code.bits[0] = bit;
  for (std::size_t d = n; d >= 1; --d) {
    const std::size_t s = pow3(d - 1);
    for (std::size_t i = 0; i < code.size(); i += 3 * s) {
      const Triple t = amp_gate(code.bits[i], rng, model);
      code.bits[i] = t[0];
      code.bits[i + s] = t[1];
      code.bits[i + 2 * s] = t[2];
    }
  }
  return code;
}

HypercubeCode correction_sweep(const HypercubeCode& code, SeededStream& rng, const GateErrorModel& model) {
  HypercubeCode out = code;
  for (std::size_t d = 1; d <= code.n; ++d) {
    const std::size_t s = pow3(d - 1);
    for (std::size_t block = 0; block < out.size(); block += 3 * s) {
      for (std::size_t i = block; i < block + s; ++i) {
        const Triple t = majority_organ({out.bits[i], out.bits[i + s], out.bits[i + 2 * s]}, rng, model);
        out.bits[i] = t[0];
        out.bits[i + s] = t[1];
        out.bits[i + 2 * s] = t[2];
      }
    }
  }
  return out;
}

std::uint8_t logical_readout(const HypercubeCode& code) {
  std::size_t ones = 0;
  for (std::uint8_t b : code.bits) ones += b;
  return static_cast<std::uint8_t>(2 * ones > code.size());
}

std::uint8_t triple_group_readout(const HypercubeCode& code) {
  if (code.n == 0) return code.bits.at(0);
  std::size_t ones = 0;
  std::size_t reps = 0;
  for (std::size_t i = 0; i < code.size(); i += 3) {
    ones += code.bits[i];
    ++reps;
  }
  return static_cast<std::uint8_t>(2 * ones > reps);
}

HypercubeCode transversal_gate(std::string_view gate, const HypercubeCode& a, const Operand& b, SeededStream& rng,
                               const GateErrorModel& model, std::uint8_t constant) {
  HypercubeCode out = a;
  if (gate == "not") {
    if (!std::holds_alternative<std::monostate>(b)) throw Error("transversal not takes one operand");
    for (auto& bit : out.bits) {
      bit ^= 1U;
      if (rng.bernoulli(model.p1)) bit ^= 1U;
    }
    return out;
  }
  std::uint8_t third = 0;
  if (gate == "and") {
    third = 0;
  } else if (gate == "or") {
    third = 1;
  } else if (gate == "maj") {
    third = constant & 1U;
  } else {
    throw Error("unknown transversal gate '" + std::string(gate) + "'");
  }
  if (std::holds_alternative<std::monostate>(b)) throw Error("transversal " + std::string(gate) + " needs two operands");
  const HypercubeCode* other = std::get_if<HypercubeCode>(&b);
  if (other != nullptr) require_same_shape(a, *other);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint8_t y = other != nullptr ? other->bits[i] : (std::get<std::uint8_t>(b) & 1U);
    Triple t{maj(a.bits[i], y, third), y, third};
    noisy3(t, rng, model);
    out.bits[i] = t[0];
  }
  return out;
}

std::array<HypercubeCode, 3> transversal_fanout(const HypercubeCode& a, SeededStream& rng,
                                                const GateErrorModel& model) {
  std::array<HypercubeCode, 3> out{a, a, a};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Triple t = amp_gate(a.bits[i], rng, model);
    for (std::size_t k = 0; k < 3; ++k) out[k].bits[i] = t[k];
  }
  return out;
}

}  // namespace demeasure::ftclassical
