#include <doctest.h>

#include <random>

#include "torix/linalg.hpp"

using namespace torix;

namespace {

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = dist(rng);
  return m;
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("smith form: U A V = D with divisibility chain") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t r = 2 + trial % 4, c = 1 + trial % 3;
      const IntMatrix a = random_matrix(rng, r, c, -4, 4);
      const auto s = linalg::smith_normal_form(a);
      CHECK(s.u * a * s.v == s.d);
      CHECK(s.u * s.u_inv == IntMatrix::identity(r));
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
          if (i != j) CHECK(s.d(i, j) == 0);
      for (std::size_t i = 0; i + 1 < s.invariants.size(); ++i) {
        CHECK(s.invariants[i] > 0);
        CHECK(s.invariants[i + 1] % s.invariants[i] == 0);
      }
    }
  }

  TEST_CASE("smith form of a ray matrix is [I; 0]") {
    IntMatrix b(3, 2);  // P2
    b(0, 0) = 1; b(1, 1) = 1; b(2, 0) = -1; b(2, 1) = -1;
    const auto s = linalg::smith_normal_form(b);
    CHECK(s.invariants == IntVec{1, 1});
  }

  TEST_CASE("determinant and unimodular inverse") {
    IntMatrix a(3, 3);
    a(0, 0) = 2; a(0, 1) = 1; a(1, 0) = 1; a(1, 1) = 1; a(2, 2) = -1;
    CHECK(linalg::determinant(a) == -1);
    CHECK(a * linalg::inverse_unimodular(a) == IntMatrix::identity(3));
    IntMatrix sing(2, 2);
    sing(0, 0) = 1; sing(0, 1) = 2; sing(1, 0) = 2; sing(1, 1) = 4;
    CHECK(linalg::determinant(sing) == 0);
  }

  TEST_CASE("kernel vector is primitive and annihilated") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
      const IntMatrix a = random_matrix(rng, 2, 3, -5, 5);
      const auto k = linalg::kernel_vector(a);
      if (!k) continue;
      CHECK(linalg::gcd(*k) == 1);
      for (auto x : a.apply(*k)) CHECK(x == 0);
    }
  }

  TEST_CASE("exact and floating solves agree") {
    IntMatrix a(2, 2);
    a(0, 0) = 3; a(0, 1) = 1; a(1, 0) = 1; a(1, 1) = 2;
    const auto x = linalg::solve(a, IntVec{5, 5});
    REQUIRE(x);
    CHECK((*x)[0] == Rational(1));
    CHECK((*x)[1] == Rational(2));
    const auto y = linalg::solve({{3.0, 1.0}, {1.0, 2.0}}, {5.0, 5.0});
    REQUIRE(y);
    CHECK((*y)[0] == doctest::Approx(1.0));
    CHECK((*y)[1] == doctest::Approx(2.0));
  }

  TEST_CASE("basis extension detects saturation") {
    IntMatrix good(1, 2);
    good(0, 0) = 1; good(0, 1) = 2;
    CHECK(linalg::rows_extend_to_basis(good));
    IntMatrix bad(1, 2);
    bad(0, 0) = 2; bad(0, 1) = 4;
    CHECK_FALSE(linalg::rows_extend_to_basis(bad));
  }
}
