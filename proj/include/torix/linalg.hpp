#pragma once

#include <optional>
#include <vector>

#include "torix/types.hpp"

namespace torix::linalg {

/// Smith normal form U * A * V = D with U, V unimodular. `u_inv` is kept in
/// step with `u` so callers can lift along the cokernel projection without a
/// second inversion.
///
/// Pivoting: the nonzero entry of least absolute value in the active
/// submatrix, ties broken by lowest row, then lowest column.
struct SmithForm {
  IntMatrix d;
  IntMatrix u;
  IntMatrix u_inv;
  IntMatrix v;
  IntVec invariants;  // nonzero diagonal entries, all positive
};

SmithForm smith_normal_form(const IntMatrix& a);

std::int64_t determinant(const IntMatrix& a);

/// Inverse of a square matrix with determinant +-1.
IntMatrix inverse_unimodular(const IntMatrix& a);

/// Primitive generator of the kernel of an (n-1) x n integer matrix of full
/// rank, from signed maximal minors. Returns nullopt if the rank is deficient.
std::optional<IntVec> kernel_vector(const IntMatrix& a);

/// Exact solution of a square system; nullopt when singular.
std::optional<std::vector<Rational>> solve(const IntMatrix& a, const IntVec& b);

/// Dense double solve with partial pivoting; nullopt when (numerically)
/// singular.
std::optional<std::vector<double>> solve(std::vector<std::vector<double>> a,
                                         std::vector<double> b);

/// True iff the rows are a basis of a saturated sublattice, i.e. they can be
/// completed to a Z-basis.
bool rows_extend_to_basis(const IntMatrix& rows);

std::int64_t gcd(std::int64_t a, std::int64_t b);
std::int64_t gcd(const IntVec& v);

}  // namespace torix::linalg
