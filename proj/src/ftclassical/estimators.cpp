#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "batch.hpp"
#include "demeasure/error.hpp"
#include "demeasure/parallel.hpp"

namespace demeasure::ftclassical {

namespace {

using detail::CodeBatch;
using detail::kWords;
using detail::Lanes;

struct Tally {
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;
};

Lanes valid_lanes(std::size_t count) {
  Lanes out{};
  for (std::size_t lane = 0; lane < count; ++lane) out[lane / 64] |= std::uint64_t{1} << (lane % 64);
  return out;
}

Lanes encoded_lanes(const McConfig& cfg) {
  Lanes v{};
  const std::uint64_t word = cfg.encoded ? (*cfg.encoded ? ~std::uint64_t{0} : 0) : 0xAAAAAAAAAAAAAAAAULL;
  v.fill(word);
  return v;
}

Tally bernoulli_tally(const Lanes& hits, const Lanes& valid) {
  Tally t;
  for (std::size_t w = 0; w < kWords; ++w) t.sum += static_cast<std::uint64_t>(std::popcount(hits[w] & valid[w]));
  t.sum_sq = t.sum;
  return t;
}

void check_common(const GateErrorModel& model, std::size_t n, const McConfig& cfg) {
  model.check();
  if (n > kMaxCodeLevel) throw InvariantError("code level " + std::to_string(n) + " exceeds " + std::to_string(kMaxCodeLevel));
  if (cfg.trials == 0) throw InvariantError("trials must be positive");
  if (cfg.encoded && *cfg.encoded > 1) throw InvariantError("encoded value must be 0 or 1");
}

// Runs `body` on every batch with its own stream and combines integer
// tallies in batch order; `scale` divides each per-trial score.
template <typename Body>
McEstimate run_batches(const McConfig& cfg, double scale, Body&& body) {
  const std::size_t batches = (cfg.trials + kLanes - 1) / kLanes;
  std::vector<Tally> tallies(batches);
  parallel_for(batches, cfg.threads, [&](std::size_t b) {
    SeededStream rng(cfg.seed, b);
    const std::size_t lanes = std::min(kLanes, cfg.trials - b * kLanes);
    tallies[b] = body(rng, valid_lanes(lanes), lanes);
  });
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;
  for (const Tally& t : tallies) {
    sum += t.sum;
    sum_sq += t.sum_sq;
  }
  const double n = static_cast<double>(cfg.trials);
  const double mean = static_cast<double>(sum) / scale / n;
  double se = 0.0;
  if (cfg.trials > 1) {
    const double second = static_cast<double>(sum_sq) / (scale * scale);
    const double var = std::max(0.0, (second - n * mean * mean) / (n - 1.0));
    se = std::sqrt(var / n);
  }
  return {mean, se, cfg.trials, cfg.seed};
}

}  // namespace

McEstimate estimate_encoding_error(const GateErrorModel& model, std::size_t n, const McConfig& cfg) {
  check_common(model, n, cfg);
  if (cfg.trials < 10000) throw InvariantError("encoding estimate needs at least 10^4 trials");
  const Lanes value = encoded_lanes(cfg);
  return run_batches(cfg, 1.0, [&](SeededStream& rng, const Lanes& valid, std::size_t) {
    CodeBatch code(n, model, rng);
    code.encode(value);
    return bernoulli_tally(code.readout_errors(value), valid);
  });
}

McEstimate estimate_steady_state_error(const GateErrorModel& model, std::size_t n, std::size_t rounds,
                                       const McConfig& cfg) {
  check_common(model, n, cfg);
  if (rounds < 20) throw InvariantError("steady-state estimate needs at least 20 rounds of burn-in");
  const Lanes value = encoded_lanes(cfg);
  const double size = static_cast<double>(HypercubeCode::filled(n, 0).size());
  return run_batches(cfg, size, [&](SeededStream& rng, const Lanes&, std::size_t lanes) {
    CodeBatch code(n, model, rng);
    code.fill(value);
    for (std::size_t r = 0; r < rounds; ++r) code.sweep();
    const auto wrong = code.wrong_bits(value);
    Tally t;
    for (std::size_t lane = 0; lane < lanes; ++lane) {
      t.sum += wrong[lane];
      t.sum_sq += static_cast<std::uint64_t>(wrong[lane]) * wrong[lane];
    }
    return t;
  });
}

McEstimate estimate_logical_error(const GateErrorModel& model, std::size_t n, std::size_t rounds,
                                  const McConfig& cfg) {
  check_common(model, n, cfg);
  if (rounds < 1) throw InvariantError("logical-error estimate needs at least one round");
  const Lanes value = encoded_lanes(cfg);
  return run_batches(cfg, 1.0, [&](SeededStream& rng, const Lanes& valid, std::size_t) {
    CodeBatch code(n, model, rng);
    code.fill(value);
    for (std::size_t r = 0; r < rounds; ++r) code.sweep();
    return bernoulli_tally(code.readout_errors(value), valid);
  });
}

McEstimate estimate_feedback_error(const GateErrorModel& model, std::size_t n, std::size_t rounds,
                                   const McConfig& cfg, const std::vector<std::size_t>& coords) {
  check_common(model, n, cfg);
  if (rounds < 20) throw InvariantError("feedback estimate needs at least 20 rounds of burn-in");
  std::vector<std::size_t> c = coords;
  if (c.empty()) c.assign(n, 0);
  if (c.size() != n) throw DimensionError("feedback coordinate needs one entry per code dimension");
  const std::size_t index = HypercubeCode::index(c);
  const Lanes value = encoded_lanes(cfg);
  return run_batches(cfg, 1.0, [&](SeededStream& rng, const Lanes& valid, std::size_t) {
    CodeBatch code(n, model, rng);
    code.fill(value);
    for (std::size_t r = 0; r < rounds; ++r) code.sweep();
    Lanes target = code.copy_out(index);
    for (std::size_t w = 0; w < kWords; ++w) target[w] ^= value[w];
    return bernoulli_tally(target, valid);
  });
}

ThresholdEstimate estimate_threshold(std::size_t n, const std::vector<double>& grid, std::size_t rounds,
                                     const McConfig& cfg, std::size_t bisections) {
  if (grid.size() < 2) throw InvariantError("threshold grid needs at least two points");
  if (!std::is_sorted(grid.begin(), grid.end())) throw InvariantError("threshold grid must be ascending");
  if (grid.front() > 0.01 || grid.back() < 0.15) throw InvariantError("threshold grid must span [0.01, 0.15]");
  ThresholdEstimate out;
  out.grid = grid;
  auto point = [&](double p) {
    const GateErrorModel m = GateErrorModel::uniform(p);
    return std::pair{estimate_logical_error(m, n, rounds, cfg), estimate_logical_error(m, n + 1, rounds, cfg)};
  };
  for (double p : grid) {
    auto [lo, hi] = point(p);
    out.lower.push_back(lo);
    out.higher.push_back(hi);
  }
  auto larger_wins = [](const McEstimate& small, const McEstimate& large) { return large.mean < small.mean; };
  std::size_t cross = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (larger_wins(out.lower[i - 1], out.higher[i - 1]) && !larger_wins(out.lower[i], out.higher[i])) {
      cross = i;
      break;
    }
  }
  if (cross == 0) {
    out.diagnostic = larger_wins(out.lower.front(), out.higher.front())
                         ? "no crossing in grid: the larger code wins at every grid point"
                         : "no crossing in grid: the larger code does not win at the smallest grid point";
    return out;
  }
  double lo = grid[cross - 1];
  double hi = grid[cross];
  for (std::size_t k = 0; k < bisections; ++k) {
    const double mid = 0.5 * (lo + hi);
    auto [a, b] = point(mid);
    (larger_wins(a, b) ? lo : hi) = mid;
  }
  out.found = true;
  out.crossing = 0.5 * (lo + hi);
  out.resolution = 0.5 * (hi - lo);
  return out;
}

}  // namespace demeasure::ftclassical
