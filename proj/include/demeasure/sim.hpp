#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "demeasure/ir.hpp"
#include "demeasure/linalg.hpp"

namespace demeasure::sim {

/// Resource caps. Density matrices are limited to `max_qubits` qubits;
/// pure-state paths, which need the square root of the memory, may use
/// up to twice as many.
struct SimLimits {
  std::size_t max_qubits = 10;
  std::size_t max_branches = 4096;
  unsigned threads = 1;

  std::size_t max_pure_qubits() const { return 2 * max_qubits; }
};

/// n-qubit density operator; qubit 0 is the most significant factor.
struct DensityState {
  std::size_t num_qubits = 0;
  ComplexMatrix m;

  /// |0...0><0...0| on n qubits.
  static DensityState ground(std::size_t n);
  /// Checks dimension only; physical invariants are the caller's business.
  static DensityState from_matrix(std::size_t n, ComplexMatrix m);
};

using StateVector = std::vector<Complex>;

/// One leaf of the measurement tree. `probability` is the joint probability
/// of the whole outcome path; leaves sum to one.
struct Branch {
  std::vector<std::size_t> outcome_path;
  double probability = 0.0;
  DensityState state;  // normalized
  std::vector<std::optional<std::size_t>> classical;
  bool rus_failed = false;  // some repeat-until-success block ran out of attempts
};

/// Conjugates by each gate and applies dephasing steps. Throws Error when
/// the protocol contains measurements, feedback, resets, RUS blocks or
/// classically conditioned gates.
DensityState run_unitary(const ir::Protocol& p, const DensityState& initial, const SimLimits& limits = {});

/// State-vector execution of a gate-only protocol.
StateVector run_unitary_pure(const ir::Protocol& p, StateVector initial, const SimLimits& limits = {});

/// Exhaustive branch tree. RUS blocks are retried up to `max_rus` times;
/// paths that never succeed are kept with `rus_failed` set. Branches with
/// probability below the cutoff are pruned.
std::vector<Branch> enumerate_branches(const ir::Protocol& p, const DensityState& initial, std::size_t max_rus,
                                       const SimLimits& limits = {});

/// sum_b P_b rho_b.
DensityState ensemble_state(const std::vector<Branch>& branches);

/// Which qubits form the channel's system. Every other qubit starts in
/// |0> unless `environment` (a density operator over the non-system
/// qubits in ascending order) is given.
struct ChannelSpec {
  std::vector<std::size_t> system;
  std::optional<ComplexMatrix> environment;
  std::size_t max_rus = 1;
  bool force_density = false;  // disable the pure-state fast path
};

/// Choi matrix of the channel the protocol induces on `spec.system`,
/// built column by column from inputs |i><j|, branches summed.
ChoiMatrix channel_choi(const ir::Protocol& p, const ChannelSpec& spec, const SimLimits& limits = {});

/// E(rho) recovered from a Choi matrix.
ComplexMatrix apply_choi(const ChoiMatrix& choi, const ComplexMatrix& rho);

/// Choi of a channel given by Kraus operators: sum_k K rho K^dag.
ChoiMatrix choi_from_kraus(const std::vector<ComplexMatrix>& kraus);

struct Verdict {
  double distance = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Max-entry Choi distance; pass iff distance <= tol.
Verdict compare_channels(const ChoiMatrix& a, const ChoiMatrix& b, double tol = kTolerances.channel);

/// Hermiticity, trace and positivity checks on a Choi matrix; empty when valid.
std::vector<std::string> choi_defects(const ChoiMatrix& choi);

// Lower-level operations on n-qubit operators, shared with the compiler
// and the tests.

/// op -> U op U^dag with U acting on `targets`, conditioned on `controls`
/// being in `control_values` (a controlled-U on the full register).
void conjugate(ComplexMatrix& op, std::size_t num_qubits, const ComplexMatrix& u, std::span<const std::size_t> targets,
               std::span<const std::size_t> controls = {}, std::span<const int> control_values = {});

/// op -> U op with the same conventions; `op` may be a state vector.
void left_multiply(ComplexMatrix& op, std::size_t num_qubits, const ComplexMatrix& u,
                   std::span<const std::size_t> targets, std::span<const std::size_t> controls = {},
                   std::span<const int> control_values = {});

/// Removes coherences between computational basis states of `targets`.
void dephase(ComplexMatrix& op, std::size_t num_qubits, std::span<const std::size_t> targets);

/// Reduced density operator of a pure state on the listed qubits.
ComplexMatrix reduced_density(const StateVector& psi, std::size_t num_qubits, std::span<const std::size_t> keep);

}  // namespace demeasure::sim
