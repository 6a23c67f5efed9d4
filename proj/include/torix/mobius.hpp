#pragma once

#include <string>
#include <utility>
#include <vector>

#include "torix/fan.hpp"

namespace torix {

/// Nonzero values mu_p(A) of the Moebius function at d = p^{1_A}; they do not
/// depend on p. Sorted by (|A|, mask), the empty set first.
struct MobiusLocalTable {
  std::vector<std::pair<RaySet, int>> entries;

  int at(RaySet a) const;
  /// coeffs[j] = sum over |A| = j of mu_p(A); local density = sum_j coeffs[j] p^-j.
  std::vector<BigInt> density_coefficients(int m) const;
  /// "1 - 2/p^2 + 1/p^4"
  std::string density_polynomial(int m) const;
};

/// At most 20 primitive collections (2^20 families); beyond that, Budget.
MobiusLocalTable mobius_table(const Fan& f);
MobiusLocalTable mobius_table(const std::vector<RaySet>& collections);

/// Signed count of families of primitive collections with union A; 1 for A = {}.
int mobius_local(const Fan& f, RaySet a);

/// mu(d) = prod_p mu_p({rho : p | d_rho}), zero unless every d_rho is squarefree.
int mobius_value(const Fan& f, const std::vector<std::int64_t>& d);
int mobius_value(const MobiusLocalTable& table, const std::vector<std::int64_t>& d);

/// sum_A mu_p(A) p^-|A|, checked against (1 - 1/p)^t #X(F_p) / p^n; a mismatch
/// is an Internal error.
Rational local_density(const Fan& f, const BigInt& p);
Rational local_density(const Fan& f, const MobiusLocalTable& table, const BigInt& p);

bool is_prime(std::int64_t p);

}  // namespace torix
