#include <cmath>
#include <set>
#include <string>

#include "demeasure/error.hpp"
#include "demeasure/linalg.hpp"
#include "demeasure/random.hpp"

namespace demeasure {

namespace {

using Vec = std::vector<Complex>;

Complex inner(const Vec& a, const Vec& b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm2(const Vec& v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return s;
}

// Classical Gram-Schmidt, applied twice.
void orthogonalize(Vec& v, const std::vector<Vec>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vec& q : basis) {
      const Complex c = inner(q, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
    }
  }
}

void check_orthonormal(const std::vector<Vec>& cols) {
  for (std::size_t a = 0; a < cols.size(); ++a) {
    for (std::size_t b = a; b < cols.size(); ++b) {
      const Complex g = inner(cols[a], cols[b]);
      const Complex expected = a == b ? 1.0 : 0.0;
      if (std::abs(g - expected) > kTolerances.orthonormality) {
        throw InvariantError("completion input columns are not orthonormal (<" + std::to_string(a) +
                             "|" + std::to_string(b) + "> deviates by " +
                             std::to_string(std::abs(g - expected)) + ")");
      }
    }
  }
}

}  // namespace

UnitaryMatrix complete_columns(std::size_t dim,
                               const std::vector<std::pair<std::size_t, ComplexMatrix>>& fixed,
                               Completion completion) {
  if (fixed.size() > dim) throw DimensionError("more fixed columns than dimension");
  std::set<std::size_t> taken;
  std::vector<Vec> basis;
  basis.reserve(dim);
  for (const auto& [index, column] : fixed) {
    if (index >= dim) throw DimensionError("fixed column index out of range");
    if (!taken.insert(index).second) throw DimensionError("duplicate fixed column index");
    if (column.rows() != dim || column.cols() != 1) {
      throw DimensionError("fixed column must be " + std::to_string(dim) + "x1");
    }
    if (!column.all_finite()) throw InvariantError("fixed column has non-finite entries");
    basis.emplace_back(column.data().begin(), column.data().end());
  }
  check_orthonormal(basis);

  const std::size_t need = dim - fixed.size();
  std::vector<Vec> fresh;
  fresh.reserve(need);
  if (completion.kind == Completion::Kind::canonical) {
    // Any candidate skipped here has residual below 0.5/dim against the
    // final span, which bounds the missing dimension below 1.
    const double threshold = 0.5 / static_cast<double>(dim);
    for (std::size_t k = 0; k < dim && fresh.size() < need; ++k) {
      Vec v(dim, 0.0);
      v[k] = 1.0;
      orthogonalize(v, basis);
      const double n2 = norm2(v);
      if (n2 <= threshold) continue;
      const double inv = 1.0 / std::sqrt(n2);
      for (Complex& z : v) z *= inv;
      basis.push_back(v);
      fresh.push_back(std::move(v));
    }
    if (fresh.size() != need) throw InvariantError("canonical completion ran out of candidates");
  } else {
    SeededStream rng(completion.seed, dim);
    while (fresh.size() < need) {
      Vec v(dim);
      for (Complex& z : v) {
        const double re = rng.normal();
        const double im = rng.normal();
        z = Complex(re, im);
      }
      const double before = norm2(v);
      orthogonalize(v, basis);
      const double n2 = norm2(v);
      if (n2 <= 1e-6 * before) continue;
      const double inv = 1.0 / std::sqrt(n2);
      for (Complex& z : v) z *= inv;
      basis.push_back(v);
      fresh.push_back(std::move(v));
    }
  }

  ComplexMatrix u(dim, dim);
  for (const auto& [index, column] : fixed)
    for (std::size_t r = 0; r < dim; ++r) u(r, index) = column(r, 0);
  std::size_t next = 0;
  for (std::size_t c = 0; c < dim; ++c) {
    if (taken.count(c) != 0) continue;
    for (std::size_t r = 0; r < dim; ++r) u(r, c) = fresh[next][r];
    ++next;
  }
  return UnitaryMatrix::checked(std::move(u));
}

UnitaryMatrix complete_to_unitary(const ComplexMatrix& iso, Completion completion) {
  if (iso.cols() > iso.rows()) throw DimensionError("isometry has more columns than rows");
  std::vector<std::pair<std::size_t, ComplexMatrix>> fixed;
  fixed.reserve(iso.cols());
  for (std::size_t j = 0; j < iso.cols(); ++j) fixed.emplace_back(j, iso.col(j));
  return complete_columns(iso.rows(), fixed, completion);
}

UnitaryMatrix random_unitary(std::size_t dim, std::uint64_t seed) {
  return complete_columns(dim, {}, Completion::seeded(seed));
}

ComplexMatrix random_density(std::size_t dim, std::uint64_t seed) {
  SeededStream rng(seed, 0x6465'6e73ULL);
  ComplexMatrix g(dim, dim);
  for (Complex& z : g.data()) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = Complex(re, im);
  }
  ComplexMatrix rho = g * g.adjoint();
  rho *= 1.0 / rho.trace().real();
  return rho;
}

}  // namespace demeasure
