#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "support.hpp"

using namespace torix;

TEST_SUITE("sections") {
  TEST_CASE("projective space monomials") {
    const auto p2 = compute_picard(builtin_fan("P2"));
    CHECK(monomial_basis(p2, {1}) == std::vector<IntVec>{{0, 0, 1}, {0, 1, 0}, {1, 0, 0}});
    CHECK(monomial_basis(p2, {2}).size() == 6);
    CHECK(monomial_basis(p2, {-1}).empty());
    const auto p1 = compute_picard(builtin_fan("P1"));
    CHECK(monomial_basis(p1, {1}) == std::vector<IntVec>{{0, 1}, {1, 0}});
  }

  TEST_CASE("P1xP1 bidegree (1,1) has four monomials") {
    const auto pd = compute_picard(builtin_fan("P1xP1"));
    const IntVec cls = pd.class_of({1, 0, 1, 0});
    const auto mons = monomial_basis(pd, cls);
    CHECK(mons.size() == 4);
    for (const auto& c : mons) {
      CHECK(c[0] + c[1] == 1);
      CHECK(c[2] + c[3] == 1);
    }
  }

  TEST_CASE("section basis invariants on every built-in fan") {
    for (const auto& name : builtin_fan_names()) {
      CAPTURE(name);
      const Variety v = make_variety(builtin_fan(name));
      const auto& sb = v.sections;
      for (std::size_t k = 0; k < sb.rank(); ++k) {
        CHECK(static_cast<int>(sb.r(k)) >= v.n() + 1);
        CHECK(std::is_sorted(sb.monomials[k].begin(), sb.monomials[k].end()));
        for (const auto& c : sb.monomials[k]) {
          CHECK(std::all_of(c.begin(), c.end(), [](auto x) { return x >= 0; }));
          CHECK(v.pic.class_of(c) == sb.basis[k]);
        }
        for (int r = 0; r < v.m(); ++r) {
          const bool some_zero = std::any_of(sb.monomials[k].begin(), sb.monomials[k].end(),
                                             [&](const IntVec& c) { return c[r] == 0; });
          IntVec diff = sb.basis[k];
          for (int i = 0; i < v.t(); ++i) diff[i] -= v.pic.ray_classes[r][i];
          CHECK((some_zero || !monomial_basis(v.pic, diff).empty()));
        }
      }
      CHECK(sb.ample_coords(sb.basis[0])[0] == 1);
    }
  }

  TEST_CASE("lift independence") {
    std::mt19937_64 rng(9);
    for (const auto& name : {"F1", "dP7", "P3"}) {
      const auto pd = compute_picard(builtin_fan(name));
      const auto basis = ample_basis(pd);
      std::uniform_int_distribution<int> dist(-3, 3);
      for (const auto& cls : basis) {
        const auto ref = monomial_basis(pd, cls);
        for (int trial = 0; trial < 5; ++trial) {
          IntVec lift = pd.lift_class(cls);
          IntVec mm(static_cast<std::size_t>(pd.n));
          for (auto& x : mm) x = dist(rng);
          const IntVec shift = pd.beta_star.apply(mm);
          for (int r = 0; r < pd.m; ++r) lift[r] += shift[r];
          CHECK(monomial_basis_from_lift(pd, lift) == ref);
        }
      }
    }
  }

  TEST_CASE("sums of sections are sections") {
    for (const auto& name : {"F1", "dP6", "P1xP1"}) {
      const Variety v = make_variety(builtin_fan(name));
      const auto& b = v.sections.basis;
      IntVec sum(static_cast<std::size_t>(v.t()));
      for (int i = 0; i < v.t(); ++i) sum[i] = b[0][i] + b[1][i];
      const auto target = monomial_basis(v.pic, sum);
      const std::set<IntVec> all(target.begin(), target.end());
      for (const auto& c0 : v.sections.monomials[0])
        for (const auto& c1 : v.sections.monomials[1]) {
          IntVec c(c0);
          for (int r = 0; r < v.m(); ++r) c[r] += c1[r];
          CHECK(all.count(c) == 1);
        }
    }
  }

  TEST_CASE("polygon lattice point counts for surfaces") {
    for (const auto& name : builtin_fan_names()) {
      const Variety v = make_variety(builtin_fan(name));
      if (v.n() != 2) continue;
      CAPTURE(name);
      for (std::size_t k = 0; k < v.sections.rank(); ++k) {
        const IntVec a = v.pic.lift_class(v.sections.basis[k]);
        std::size_t count = 0;
        for (int x = -40; x <= 40; ++x)
          for (int y = -40; y <= 40; ++y) {
            bool in = true;
            for (int r = 0; r < v.m(); ++r)
              in = in && x * v.fan.rays[r][0] + y * v.fan.rays[r][1] >= -a[r];
            count += in;
          }
        CHECK(count == v.sections.r(k));
      }
    }
  }
}
