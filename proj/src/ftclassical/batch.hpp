#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "demeasure/ftclassical.hpp"

namespace demeasure::ftclassical::detail {

inline constexpr std::size_t kWords = kLanes / 64;
using Lanes = std::array<std::uint64_t, kWords>;

/// Bernoulli(p) trials consumed as one long sequence. Instead of one
/// uniform draw per trial, the gap to the next failure is drawn from the
/// geometric distribution, so cost scales with the number of failures.
class FailureSkipper {
 public:
  explicit FailureSkipper(double p) : p_(p), log_q_(p > 0.0 && p < 1.0 ? std::log1p(-p) : 0.0) {}

  /// Calls on_fail(k) for each failing trial k in [0, count).
  template <typename F>
  void failures(SeededStream& rng, std::size_t count, F&& on_fail) {
    if (p_ <= 0.0) return;
    std::size_t pos = 0;
    while (true) {
      if (!primed_) {
        gap_ = draw(rng);
        primed_ = true;
      }
      if (gap_ >= count - pos) {
        gap_ -= count - pos;
        return;
      }
      pos += gap_;
      primed_ = false;
      on_fail(pos);
      ++pos;
    }
  }

 private:
  std::uint64_t draw(SeededStream& rng) const {
    if (p_ >= 1.0) return 0;
    const double g = std::floor(std::log(rng.uniform_open_low()) / log_q_);
    if (!(g < 1e18)) return std::numeric_limits<std::uint64_t>::max() / 2;
    return static_cast<std::uint64_t>(g);
  }

  double p_;
  double log_q_;
  std::uint64_t gap_ = 0;
  bool primed_ = false;
};

/// kLanes independent trials of one 3^n-bit code, bit-sliced: bit i of
/// every lane lives in words [i*kWords, (i+1)*kWords).
class CodeBatch {
 public:
  CodeBatch(std::size_t n, const GateErrorModel& model, SeededStream& rng);

  std::size_t size() const { return size_; }
  std::uint64_t* bit(std::size_t i) { return words_.data() + i * kWords; }
  const std::uint64_t* bit(std::size_t i) const { return words_.data() + i * kWords; }

  /// Every bit of lane l set to bit l of `value`.
  void fill(const Lanes& value);
  /// Noisy AMP cascade from `value`.
  void encode(const Lanes& value);
  /// One noisy correction sweep over all dimensions.
  void sweep();
  /// Lanes whose majority readout differs from `value`.
  Lanes readout_errors(const Lanes& value) const;
  /// Per-lane number of bits differing from `value`.
  std::array<std::uint32_t, kLanes> wrong_bits(const Lanes& value) const;
  /// A noisy 2-bit gate copies code bit `index` onto a fresh target;
  /// returns the target lanes.
  Lanes copy_out(std::size_t index);

 private:
  void amp(std::size_t i, std::size_t j, std::size_t k);

  std::size_t n_;
  std::size_t size_;
  GateErrorModel model_;
  SeededStream& rng_;
  FailureSkipper gate3_;
  FailureSkipper gate2_;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> scratch_;
};

inline void flip_lane(std::uint64_t* w, std::size_t lane) { w[lane / 64] ^= std::uint64_t{1} << (lane % 64); }

}  // namespace demeasure::ftclassical::detail
