#include "torix/sections.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "torix/linalg.hpp"

namespace torix {

std::vector<IntVec> monomial_basis_from_lift(const PicardData& pd, const IntVec& c0) {
  const int n = pd.n;
  const int m = pd.m;
  if (static_cast<int>(c0.size()) != m)
    throw Error(ErrorCode::InvalidArgument, "lift has wrong length");

  // Vertices of { x in R^n : <x, u_rho> >= -c0_rho } from every n-subset of
  // tight constraints; exact over Q.
  std::vector<std::int64_t> lo(static_cast<std::size_t>(n), std::numeric_limits<std::int64_t>::max());
  std::vector<std::int64_t> hi(static_cast<std::size_t>(n), std::numeric_limits<std::int64_t>::min());
  bool any_vertex = false;
  std::vector<int> pick(static_cast<std::size_t>(n));
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == n) {
      IntMatrix a(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
      IntVec b(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        for (int c = 0; c < n; ++c) a(i, c) = pd.beta_star(pick[i], c);
        b[i] = -c0[pick[i]];
      }
      const auto x = linalg::solve(a, b);
      if (!x) return;
      for (int r = 0; r < m; ++r) {
        Rational s = c0[r];
        for (int c = 0; c < n; ++c) s += (*x)[c] * pd.beta_star(r, c);
        if (s < 0) return;
      }
      any_vertex = true;
      for (int c = 0; c < n; ++c) {
        const BigInt num = numerator((*x)[c]);
        const BigInt den = denominator((*x)[c]);
        BigInt fl = num / den;
        if (num < 0 && fl * den != num) fl -= 1;
        BigInt ce = fl * den == num ? fl : fl + 1;
        lo[c] = std::min(lo[c], fl.convert_to<std::int64_t>());
        hi[c] = std::max(hi[c], ce.convert_to<std::int64_t>());
      }
      return;
    }
    for (int i = start; i < m; ++i) {
      pick[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);

  std::vector<IntVec> out;
  if (!any_vertex) return out;
  IntVec x(lo.begin(), lo.end());
  for (;;) {
    IntVec c(c0);
    bool ok = true;
    for (int r = 0; r < m && ok; ++r) {
      for (int k = 0; k < n; ++k) c[r] += x[k] * pd.beta_star(r, k);
      ok = c[r] >= 0;
    }
    if (ok) out.push_back(std::move(c));
    int pos = n - 1;
    while (pos >= 0 && x[pos] == hi[pos]) {
      x[pos] = lo[pos];
      --pos;
    }
    if (pos < 0) break;
    ++x[pos];
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<IntVec> monomial_basis(const PicardData& pd, const IntVec& cls) {
  return monomial_basis_from_lift(pd, pd.lift_class(cls));
}

SectionBasis build_section_basis(const PicardData& pd, std::vector<IntVec> basis) {
  const std::size_t t = static_cast<std::size_t>(pd.t);
  if (basis.size() != t)
    throw Error(ErrorCode::InvalidArgument, "section basis needs t classes");
  SectionBasis sb;
  IntMatrix cols(t, t);
  for (std::size_t k = 0; k < t; ++k)
    for (std::size_t i = 0; i < t; ++i) cols(i, k) = basis[k][i];
  sb.to_ample = linalg::inverse_unimodular(cols);
  for (const auto& cls : basis) {
    auto mons = monomial_basis(pd, cls);
    if (mons.size() < 2)
      throw Error(ErrorCode::Internal, "ample class with fewer than two sections");
    sb.monomials.push_back(std::move(mons));
  }
  sb.basis = std::move(basis);
  return sb;
}

SectionBasis build_section_basis(const PicardData& pd) {
  return build_section_basis(pd, ample_basis(pd));
}

}  // namespace torix
