// Brute-force oracles shared by the unit and acceptance tests. They avoid
// the enumerator's bounds and pruning on purpose.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "torix/constant.hpp"
#include "torix/mobius.hpp"
#include "torix/torsor.hpp"

namespace torix::testing {

inline Constraint constraint(IntVec divisor, Bound lo, Bound hi, bool hi_inclusive = false) {
  Constraint c;
  c.divisor = std::move(divisor);
  c.min = lo;
  c.max = hi;
  c.max_inclusive = hi_inclusive;
  return c;
}

inline Region single(std::vector<Constraint> cons) {
  Polyhedron p;
  p.constraints = std::move(cons);
  return Region{{p}};
}

/// Calls f on every y in [-R, R]^m.
inline void for_each_in_cube(int m, std::int64_t R, const std::function<void(const IntVec&)>& f) {
  IntVec y(static_cast<std::size_t>(m), -R);
  for (;;) {
    f(y);
    int i = 0;
    while (i < m && y[i] == R) y[i++] = -R;
    if (i == m) return;
    ++y[i];
  }
}

struct BruteCount {
  BigInt torsor = 0;
  BigInt torus = 0;
};

/// Torsor points in the cube with height in D_B; membership through the
/// section gcds rather than primitive collections.
inline BruteCount brute_force_count(const Variety& v, const CompiledRegion& region,
                                    const GrowthSpec* gs, std::int64_t R,
                                    const HeightOptions& opts = {}) {
  BruteCount out;
  for_each_in_cube(v.m(), R, [&](const IntVec& y) {
    if (std::all_of(y.begin(), y.end(), [](auto x) { return x == 0; })) return;
    if (!is_torsor_point_via_sections(v.sections, y)) return;
    if (!in_region(v, multi_height(v.sections, y), region, gs, opts)) return;
    ++out.torsor;
    if (std::none_of(y.begin(), y.end(), [](auto x) { return x == 0; })) ++out.torus;
  });
  return out;
}

/// #{y in F_p^m : the zero support of y contains no primitive collection}.
inline std::int64_t zero_support_count(const std::vector<RaySet>& collections, int m, int p) {
  std::int64_t count = 0;
  std::vector<int> y(static_cast<std::size_t>(m), 0);
  for (;;) {
    std::uint64_t zeros = 0;
    for (int r = 0; r < m; ++r)
      if (y[r] == 0) zeros |= std::uint64_t{1} << r;
    bool ok = true;
    for (auto c : collections)
      if ((c.mask() & ~zeros) == 0) ok = false;
    count += ok;
    int i = 0;
    while (i < m && y[i] == p - 1) y[i++] = 0;
    if (i == m) return count;
    ++y[i];
  }
}

/// sum over d of mu(d) N_d(B), d ranging over the vectors with mu(d) != 0 and
/// d_rho <= floor(bound_rho). Each d is built prime by prime from the local
/// table.
inline BigInt mobius_inversion_sum(const Variety& v, const CompiledRegion& region,
                                   const GrowthSpec* gs, const EnumOptions& opts = {},
                                   std::size_t* terms = nullptr) {
  const MobiusLocalTable table = mobius_table(v.primitive_collections);
  const auto bounds = coordinate_bounds(v, region, gs);
  const int m = v.m();
  std::vector<std::int64_t> cap(static_cast<std::size_t>(m));
  std::int64_t top = 1;
  for (int r = 0; r < m; ++r) {
    cap[r] = static_cast<std::int64_t>(std::floor(bounds[r] * (1 + 1e-9) + 1e-9));
    top = std::max(top, cap[r]);
  }
  std::vector<std::int64_t> primes;
  for (std::int64_t p = 2; p <= top; ++p)
    if (is_prime(p)) primes.push_back(p);

  BigInt total = 0;
  std::size_t used = 0;
  std::vector<std::int64_t> d(static_cast<std::size_t>(m), 1);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int sign) {
    if (i == primes.size()) {
      total += sign * count_sublattice(v, d, region, gs, opts);
      ++used;
      return;
    }
    const std::int64_t p = primes[i];
    for (const auto& [a, mu] : table.entries) {
      bool fits = true;
      for (int r : a.indices())
        if (d[r] > cap[r] / p) fits = false;
      if (!fits) continue;
      for (int r : a.indices()) d[r] *= p;
      rec(i + 1, sign * mu);
      for (int r : a.indices()) d[r] /= p;
    }
  };
  rec(0, 1);
  if (terms) *terms = used;
  return total;
}

}  // namespace torix::testing
