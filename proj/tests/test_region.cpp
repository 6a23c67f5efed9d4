#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace torix;
using testing::constraint;
using testing::single;

TEST_SUITE("region") {
  TEST_CASE("parse and round-trip") {
    const Variety v = make_variety(builtin_fan("P1"));
    const Region r = parse_region(
        R"J({"polyhedra":[{"constraints":[{"divisor":[1,0],"min":0,"max":"log(5/2)","max_inclusive":true}]}]})J",
        v.m());
    REQUIRE(r.polyhedra.size() == 1);
    const auto& c = r.polyhedra[0].constraints[0];
    CHECK(c.min.value == 0.0);
    CHECK(c.max.exp_value == Rational(5, 2));
    CHECK(c.max.value == doctest::Approx(std::log(2.5)));
    CHECK(c.max_inclusive);
    CHECK(c.min_inclusive);
    CHECK(region_to_json(parse_region(region_to_json(r), v.m())) == region_to_json(r));
  }

  TEST_CASE("parse errors") {
    const int m = 2;
    CHECK_THROWS_AS(parse_region("[]", m), Error);
    CHECK_THROWS_AS(parse_region(R"J({"polyhedra":[]})J", m), Error);
    CHECK_THROWS_AS(parse_region(R"J({"polyhedra":[{"constraints":[{"divisor":[1],"min":0}]}]})J", m), Error);
    CHECK_THROWS_AS(parse_region(R"J({"polyhedra":[{"constraints":[{"divisor":[1,0],"max":"log(-1)"}]}]})J", m), Error);
    CHECK_THROWS_AS(parse_region(R"J({"polyhedra":[{"constraints":[{"divisor":[1,0],"max":"abc"}]}]})J", m), Error);
  }

  TEST_CASE("unbounded polyhedra are rejected") {
    const Variety v = make_variety(builtin_fan("P1xP1"));
    const Region r = single({constraint({1, 0, 0, 0}, Bound::of(0), Bound::of(1))});
    CHECK_THROWS_AS(compile_region(v, r), Error);
    const Region half = single({constraint({1, 0, 0, 0}, Bound::of(0), Bound::infinite()),
                                constraint({0, 0, 1, 0}, Bound::of(0), Bound::of(1))});
    CHECK_THROWS_AS(compile_region(v, half), Error);
  }

  TEST_CASE("constraints in non-basis classes") {
    // P1xP1 window on the classes of D0 and D2 (the two rulings).
    const Variety v = make_variety(builtin_fan("P1xP1"));
    const Region r = single({constraint({1, 0, 0, 0}, Bound::of(0), Bound::log_of(2)),
                             constraint({0, 0, 1, 0}, Bound::of(0), Bound::log_of(3))});
    const CompiledRegion cr = compile_region(v, r);
    REQUIRE(cr.polyhedra[0].vertices.size() == 4);
    // h = (log 2, log 3) on the two rulings is the far corner.
    const MultiHeight h = multi_height(v.sections, std::vector<std::int64_t>{1, 2, 3, 1});
    const IntVec w0 = v.ray_ample[0], w2 = v.ray_ample[2];
    double s0 = 0, s2 = 0;
    for (int k = 0; k < v.t(); ++k) {
      s0 += w0[k] * h.h[k];
      s2 += w2[k] * h.h[k];
    }
    CHECK(s0 == doctest::Approx(std::log(2.0)));
    CHECK(s2 == doctest::Approx(std::log(3.0)));
    CHECK_FALSE(in_region(v, h, cr, nullptr));  // both upper bounds exclusive
  }

  TEST_CASE("sup and inf over the region") {
    const Variety v = make_variety(builtin_fan("P2"));
    const CompiledRegion cr = compile_region(v, unit_box_region(v));
    CHECK(cr.sup(std::vector<double>{1.0}) == doctest::Approx(std::log(2.0)));
    CHECK(cr.inf(std::vector<double>{1.0}) == doctest::Approx(0.0));
    CHECK(cr.sup(std::vector<double>{-2.0}) == doctest::Approx(0.0));
  }

  TEST_CASE("inclusivity semantics at the bound") {
    const Variety v = make_variety(builtin_fan("P1"));
    const MultiHeight h = multi_height(v.sections, std::vector<std::int64_t>{3, 10});
    for (bool incl : {false, true}) {
      const auto cr = compile_region(v, single({constraint({1, 0}, Bound::of(0), Bound::log_of(10), incl)}));
      CHECK(in_region(v, h, cr, nullptr) == incl);
      HeightOptions exact;
      exact.exact_boundary = true;
      CHECK(in_region(v, h, cr, nullptr, exact) == incl);
    }
  }
}
