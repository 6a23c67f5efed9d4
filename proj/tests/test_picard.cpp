#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "torix/linalg.hpp"

using namespace torix;

namespace {

bool contains(const std::vector<IntVec>& vs, const IntVec& v) {
  return std::find(vs.begin(), vs.end(), v) != vs.end();
}

}  // namespace

TEST_SUITE("picard") {
  TEST_CASE("ray classes of projective spaces") {
    const auto p2 = compute_picard(builtin_fan("P2"));
    CHECK(p2.t == 1);
    CHECK(p2.ray_classes == std::vector<IntVec>{{1}, {1}, {1}});
    CHECK(p2.anticanonical == IntVec{3});
    const auto p1 = compute_picard(builtin_fan("P1"));
    CHECK(p1.ray_classes == std::vector<IntVec>{{1}, {1}});
    CHECK(p1.anticanonical == IntVec{2});
    CHECK(p2.class_of({1, 0, 0}) == IntVec{1});
    CHECK(p2.class_of({1, 1, 1}) == IntVec{3});
    CHECK_THROWS_AS(p2.class_of({1, 0}), Error);
  }

  TEST_CASE("exact sequence invariants") {
    for (const auto& name : builtin_fan_names()) {
      CAPTURE(name);
      const auto pd = compute_picard(builtin_fan(name));
      CHECK(pd.t == pd.m - pd.n);
      // proj * beta_star = 0 and proj * lift = I.
      const IntMatrix z = pd.proj * pd.beta_star;
      for (std::size_t i = 0; i < z.rows(); ++i)
        for (std::size_t j = 0; j < z.cols(); ++j) CHECK(z(i, j) == 0);
      CHECK(pd.proj * pd.lift == IntMatrix::identity(static_cast<std::size_t>(pd.t)));
      IntVec sum(static_cast<std::size_t>(pd.t), 0);
      for (const auto& c : pd.ray_classes)
        for (int i = 0; i < pd.t; ++i) sum[i] += c[i];
      CHECK(sum == pd.anticanonical);
      for (int j = 0; j < pd.n; ++j) CHECK(pd.class_of(pd.beta_star.col(j)) == IntVec(static_cast<std::size_t>(pd.t), 0));
    }
  }

  TEST_CASE("kernel of the class map is exactly the image of beta_star") {
    std::mt19937_64 rng(3);
    for (const auto& name : {"P2", "F1", "dP7", "P3"}) {
      const auto pd = compute_picard(builtin_fan(name));
      const auto snf = linalg::smith_normal_form(pd.beta_star);
      std::uniform_int_distribution<int> dist(-3, 3);
      for (int trial = 0; trial < 10000; ++trial) {
        IntVec v(static_cast<std::size_t>(pd.m));
        for (auto& x : v) x = dist(rng);
        // v in image(beta_star) iff U v vanishes past the rank and is
        // divisible by the invariants before it.
        const IntVec uv = snf.u.apply(v);
        bool in_image = true;
        for (int i = 0; i < pd.m; ++i) {
          if (i < pd.n)
            in_image = in_image && uv[i] % snf.invariants[i] == 0;
          else
            in_image = in_image && uv[i] == 0;
        }
        const IntVec c = pd.class_of(v);
        const bool zero = std::all_of(c.begin(), c.end(), [](auto x) { return x == 0; });
        CHECK(zero == in_image);
      }
    }
  }

  TEST_CASE("wall relations") {
    CHECK(compute_picard(builtin_fan("P2")).wall_relations ==
          std::vector<IntVec>(3, IntVec{1, 1, 1}));
    CHECK(compute_picard(builtin_fan("P1")).wall_relations == std::vector<IntVec>{{1, 1}});
    const auto f1 = compute_picard(builtin_fan("F1"));
    CHECK(f1.wall_relations.size() == 4);
    CHECK(contains(f1.wall_relations, {1, -1, 1, 0}));
    CHECK(contains(f1.wall_relations, {0, 1, 0, 1}));
    CHECK(contains(f1.wall_relations, {1, 0, 1, 1}));
    for (const auto& name : builtin_fan_names()) {
      const Fan f = builtin_fan(name);
      const auto pd = compute_picard(f);
      for (const auto& r : pd.wall_relations) {
        CHECK(linalg::gcd(r) == 1);
        for (auto x : pd.beta_star.transpose().apply(r)) CHECK(x == 0);
      }
    }
  }

  TEST_CASE("nef and ample") {
    const auto p2 = compute_picard(builtin_fan("P2"));
    CHECK(is_ample(p2, {1}));
    CHECK(is_nef(p2, {0}));
    CHECK_FALSE(is_ample(p2, {0}));
    CHECK_FALSE(is_nef(p2, {-1}));
    // Ampleness does not depend on the lift.
    std::mt19937_64 rng(5);
    for (const auto& name : {"F1", "F2", "dP6", "dP7"}) {
      const auto pd = compute_picard(builtin_fan(name));
      std::uniform_int_distribution<int> dist(-3, 3);
      for (int trial = 0; trial < 200; ++trial) {
        IntVec cls(static_cast<std::size_t>(pd.t));
        for (auto& x : cls) x = dist(rng);
        IntVec lift = pd.lift_class(cls);
        IntVec mm(static_cast<std::size_t>(pd.n));
        for (auto& x : mm) x = dist(rng);
        const IntVec shift = pd.beta_star.apply(mm);
        for (int r = 0; r < pd.m; ++r) lift[r] += shift[r];
        CHECK(pd.class_of(lift) == cls);
        bool pos = true, nonneg = true;
        for (const auto& w : pd.wall_relations) {
          std::int64_t s = 0;
          for (int r = 0; r < pd.m; ++r) s += w[r] * lift[r];
          pos = pos && s > 0;
          nonneg = nonneg && s >= 0;
        }
        CHECK(pos == is_ample(pd, cls));
        CHECK(nonneg == is_nef(pd, cls));
      }
    }
  }

  TEST_CASE("ample basis") {
    CHECK(ample_basis(compute_picard(builtin_fan("P2"))) == std::vector<IntVec>{{1}});
    for (const auto& name : builtin_fan_names()) {
      CAPTURE(name);
      const auto pd = compute_picard(builtin_fan(name));
      const auto basis = ample_basis(pd);
      REQUIRE(static_cast<int>(basis.size()) == pd.t);
      IntMatrix m(basis.size(), basis.size());
      for (std::size_t i = 0; i < basis.size(); ++i) {
        CHECK(is_ample(pd, basis[i]));
        for (std::size_t j = 0; j < basis.size(); ++j) m(i, j) = basis[i][j];
      }
      const auto det = linalg::determinant(m);
      CHECK((det == 1 || det == -1));
    }
  }

  TEST_CASE("ray classes are effective and pair positively with valid directions") {
    for (const auto& name : builtin_fan_names()) {
      const Variety v = make_variety(builtin_fan(name));
      const auto pairs = default_pairings(v);
      REQUIRE(pairs);
      const auto dir = validate_direction(v.pic, *pairs);
      for (int r = 0; r < v.m(); ++r) {
        CHECK_FALSE(monomial_basis(v.pic, v.pic.ray_classes[r]).empty());
        CHECK(dir.pair(v.pic.ray_classes[r]) > 0);
      }
    }
  }

  TEST_CASE("growth directions") {
    const auto p2 = compute_picard(builtin_fan("P2"));
    const auto d = validate_direction(p2, {1, 1, 1});
    CHECK(d.anticanonical_pairing() == 3);
    CHECK_THROWS_AS(validate_direction(p2, {1, 1, -1}), Error);
    CHECK_THROWS_AS(validate_direction(p2, {1, 1, 2}), Error);  // not a functional on Pic
    const auto q = compute_picard(builtin_fan("P1xP1"));
    CHECK(validate_direction(q, {1, 1, 1, 1}).anticanonical_pairing() == 4);
    // All ones does not factor through Pic on F1: D3 ~ D1 + D2.
    const auto f1 = compute_picard(builtin_fan("F1"));
    CHECK_THROWS_AS(validate_direction(f1, {1, 1, 1, 1}), Error);
    CHECK(validate_direction(f1, {1, 1, 1, 2}).anticanonical_pairing() == 5);
    try {
      validate_direction(p2, {0, 1, 1});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidArgument);
    }
  }

  TEST_CASE("rational parsing") {
    CHECK(parse_rational("3") == 3);
    CHECK(parse_rational("-2/7") == Rational(-2, 7));
    CHECK(parse_rational("0.125") == Rational(1, 8));
    CHECK(parse_rational_list("1, 1/2,3") == std::vector<Rational>{1, Rational(1, 2), 3});
    CHECK_THROWS_AS(parse_rational("x"), Error);
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
  }
}
