#include <algorithm>
#include <cstring>

#include "batch.hpp"
#include "demeasure/kernels.hpp"

namespace demeasure::ftclassical::detail {

namespace {

std::size_t pow3(std::size_t n) {
  std::size_t v = 1;
  for (std::size_t i = 0; i < n; ++i) v *= 3;
  return v;
}

}  // namespace

CodeBatch::CodeBatch(std::size_t n, const GateErrorModel& model, SeededStream& rng)
    : n_(n),
      size_(pow3(n)),
      model_(model),
      rng_(rng),
      gate3_(model.p3),
      gate2_(model.p2),
      words_(size_ * kWords, 0),
      scratch_(size_ * kWords, 0) {}

void CodeBatch::fill(const Lanes& value) {
  for (std::size_t i = 0; i < size_; ++i) std::copy(value.begin(), value.end(), bit(i));
}

void CodeBatch::amp(std::size_t i, std::size_t j, std::size_t k) {
  std::memcpy(bit(j), bit(i), kWords * sizeof(std::uint64_t));
  std::memcpy(bit(k), bit(i), kWords * sizeof(std::uint64_t));
  gate3_.failures(rng_, kLanes, [&](std::size_t lane) {
    const unsigned pattern = draw_pattern(rng_, model_.pattern, 3);
    if (pattern & 1U) flip_lane(bit(i), lane);
    if (pattern & 2U) flip_lane(bit(j), lane);
    if (pattern & 4U) flip_lane(bit(k), lane);
  });
}

void CodeBatch::encode(const Lanes& value) {
  std::fill(words_.begin(), words_.end(), 0);
  std::copy(value.begin(), value.end(), bit(0));
  for (std::size_t d = n_; d >= 1; --d) {
    const std::size_t s = pow3(d - 1);
    for (std::size_t i = 0; i < size_; i += 3 * s) amp(i, i + s, i + 2 * s);
  }
}

void CodeBatch::sweep() {
  const auto& kern = kernels::active();
  for (std::size_t d = 1; d <= n_; ++d) {
    const std::size_t s = pow3(d - 1);
    for (std::size_t block = 0; block < size_; block += 3 * s) {
      std::uint64_t* m = scratch_.data();
      kern.majority3(bit(block), bit(block + s), bit(block + 2 * s), m, s * kWords);
      for (std::size_t t = 0; t < s; ++t) {
        std::uint64_t* mt = m + t * kWords;
        // Counting gate: only its majority line survives.
        gate3_.failures(rng_, kLanes, [&](std::size_t lane) {
          if (draw_pattern(rng_, model_.pattern, 3) & 1U) flip_lane(mt, lane);
        });
        std::memcpy(bit(block + t), mt, kWords * sizeof(std::uint64_t));
        amp(block + t, block + t + s, block + t + 2 * s);
      }
    }
  }
}

std::array<std::uint32_t, kLanes> CodeBatch::wrong_bits(const Lanes& value) const {
  // Vertical counters: plane j holds bit j of every lane's count.
  constexpr std::size_t kPlanes = 13;
  std::array<Lanes, kPlanes> planes{};
  for (std::size_t i = 0; i < size_; ++i) {
    const std::uint64_t* b = bit(i);
    for (std::size_t w = 0; w < kWords; ++w) {
      std::uint64_t carry = b[w] ^ value[w];
      for (std::size_t j = 0; carry != 0 && j < kPlanes; ++j) {
        const std::uint64_t next = planes[j][w] & carry;
        planes[j][w] ^= carry;
        carry = next;
      }
    }
  }
  std::array<std::uint32_t, kLanes> out{};
  for (std::size_t lane = 0; lane < kLanes; ++lane) {
    std::uint32_t c = 0;
    for (std::size_t j = 0; j < kPlanes; ++j) c |= static_cast<std::uint32_t>((planes[j][lane / 64] >> (lane % 64)) & 1U) << j;
    out[lane] = c;
  }
  return out;
}

Lanes CodeBatch::readout_errors(const Lanes& value) const {
  const auto counts = wrong_bits(value);
  Lanes out{};
  for (std::size_t lane = 0; lane < kLanes; ++lane)
    if (2 * counts[lane] > size_) out[lane / 64] |= std::uint64_t{1} << (lane % 64);
  return out;
}

Lanes CodeBatch::copy_out(std::size_t index) {
  Lanes target{};
  std::copy(bit(index), bit(index) + kWords, target.begin());
  gate2_.failures(rng_, kLanes, [&](std::size_t lane) {
    const unsigned pattern = draw_pattern(rng_, model_.pattern, 2);
    if (pattern & 1U) flip_lane(bit(index), lane);
    if (pattern & 2U) flip_lane(target.data(), lane);
  });
  return target;
}

}  // namespace demeasure::ftclassical::detail
