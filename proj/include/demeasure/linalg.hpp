#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace demeasure {

using Complex = std::complex<double>;

/// Numerical tolerances shared by the compiler, the simulator and the
/// verifier. Defaults are the values every component assumes unless told
/// otherwise.
struct Tolerances {
  double unitarity = 1e-10;       // max |U^dag U - I|
  double orthonormality = 1e-10;  // isometry input to completion
  double completeness = 1e-12;    // max |sum A^dag A - I|
  double channel = 1e-10;         // Choi max-entry distance
  double normalization = 1e-10;   // |<psi|psi> - 1|, trace of states
  double branch_cutoff = 1e-14;   // branches below this probability are pruned
};

inline constexpr Tolerances kTolerances{};

/// Dense complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
  /// Column vector (n x 1).
  static ComplexMatrix column(std::span<const Complex> entries);
  /// Column vector |index> of dimension n.
  static ComplexMatrix basis(std::size_t n, std::size_t index);
  /// Diagonal matrix.
  static ComplexMatrix diagonal(std::span<const Complex> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }
  Complex* raw() { return data_.data(); }
  const Complex* raw() const { return data_.data(); }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conj() const;
  Complex trace() const;
  ComplexMatrix col(std::size_t j) const;
  /// Sub-block [r0, r0+nr) x [c0, c0+nc).
  ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b);
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(Complex s);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Max absolute entrywise difference. Throws DimensionError on shape mismatch.
double matrix_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// max |m^dag m - I|.
double unitarity_defect(const ComplexMatrix& m);
/// max |m - m^dag|.
double hermiticity_defect(const ComplexMatrix& m);

/// Square matrix known to satisfy |U^dag U - I|_max < tolerance.
class UnitaryMatrix {
 public:
  /// Throws InvariantError when `m` is not unitary within `tol`.
  static UnitaryMatrix checked(ComplexMatrix m, double tol = kTolerances.unitarity);

  const ComplexMatrix& matrix() const { return m_; }
  std::size_t dim() const { return m_.rows(); }

  friend bool operator==(const UnitaryMatrix&, const UnitaryMatrix&) = default;

 private:
  explicit UnitaryMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

/// Channel representation J = sum_ij |i><j| (x) E(|i><j|), input factor first.
struct ChoiMatrix {
  std::size_t d = 0;
  ComplexMatrix m;
};

/// How the free columns of a partial isometry are filled in.
struct Completion {
  enum class Kind { canonical, seeded };
  Kind kind = Kind::seeded;
  std::uint64_t seed = 1;

  /// Candidates are the standard basis vectors e_0, e_1, ... in order.
  static Completion canonical() { return {Kind::canonical, 0}; }
  /// Candidates are Gaussian random vectors drawn from `seed`.
  static Completion seeded(std::uint64_t seed) { return {Kind::seeded, seed}; }
};

/// Extends the c orthonormal columns of `iso` (D x c, c <= D) to a D x D
/// unitary whose first c columns equal `iso`. Remaining columns come from
/// Gram-Schmidt against candidate vectors, orthogonalized twice.
UnitaryMatrix complete_to_unitary(const ComplexMatrix& iso, Completion completion);

/// As complete_to_unitary, but the prescribed columns are placed at given
/// column indices; the completion fills the remaining indices in order.
UnitaryMatrix complete_columns(std::size_t dim,
                               const std::vector<std::pair<std::size_t, ComplexMatrix>>& fixed,
                               Completion completion);

/// Haar-like random unitary (Gram-Schmidt of Gaussian vectors).
UnitaryMatrix random_unitary(std::size_t dim, std::uint64_t seed);

enum class Subsystem { A, B };

/// Partial trace of a (d_a*d_b)-dimensional operator, keeping `keep`.
ComplexMatrix partial_trace(const ComplexMatrix& state, std::size_t dim_a, std::size_t dim_b,
                            Subsystem keep);

/// Reduced operator on the listed qubits (in the given order) of an
/// n-qubit operator. Qubit 0 is the most significant tensor factor.
ComplexMatrix reduce_qubits(const ComplexMatrix& op, std::size_t num_qubits,
                            std::span<const std::size_t> keep);

/// Reorders tensor factors: qubit `order[k]` of `op` becomes qubit k.
ComplexMatrix permute_qubits(const ComplexMatrix& op, std::size_t num_qubits,
                             std::span<const std::size_t> order);

/// Ascending eigenvalues of a Hermitian matrix.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

/// Random density matrix G G^dag / Tr, G with Gaussian entries.
ComplexMatrix random_density(std::size_t dim, std::uint64_t seed);

}  // namespace demeasure
