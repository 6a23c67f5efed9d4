#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "support.hpp"

using namespace torix;
using testing::constraint;
using testing::single;

namespace {

constexpr double kZeta2 = 1.6449340668482264;
constexpr double kZeta3 = 1.2020569031595943;

McOptions mc(std::uint64_t samples, std::uint64_t seed = 1, unsigned threads = 1) {
  McOptions o;
  o.samples = samples;
  o.seed = seed;
  o.threads = threads;
  return o;
}

Region p1p1_rulings(const Bound& hi0, const Bound& hi2) {
  return single({constraint({1, 0, 0, 0}, Bound::of(0), hi0), constraint({0, 0, 1, 0}, Bound::of(0), hi2)});
}

}  // namespace

TEST_SUITE("constant") {
  TEST_CASE("counter-based generator") {
    CHECK(mc_uniform(1, 0, 0) == mc_uniform(1, 0, 0));
    CHECK(mc_uniform(1, 0, 0) != mc_uniform(2, 0, 0));
    CHECK(mc_uniform(1, 0, 0) != mc_uniform(1, 1, 0));
    CHECK(mc_uniform(1, 0, 0) != mc_uniform(1, 0, 1));
    double sum = 0;
    for (std::uint64_t i = 0; i < 100000; ++i) {
      const double x = mc_uniform(7, i, 3);
      REQUIRE(x >= 0.0);
      REQUIRE(x < 1.0);
      sum += x;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  }

  TEST_CASE("nu closed forms") {
    const Variety p1 = make_variety(builtin_fan("P1"));
    for (double delta : {0.0, 0.1, std::log(2.0), 1.7}) {
      const auto cr = compile_region(p1, single({constraint({1, 0}, Bound::of(0), Bound::of(delta))}));
      const auto nu = nu_region(p1, cr, NuMethod::ClosedForm);
      CHECK(nu.value == doctest::Approx(std::expm1(2 * delta) / 2));
      CHECK(nu.sigma == 0.0);
    }
    const Variety q = make_variety(builtin_fan("P1xP1"));
    const double d = 0.6;
    const auto cr = compile_region(q, p1p1_rulings(Bound::of(d), Bound::of(d)));
    const double exact = std::pow(std::expm1(2 * d) / 2, 2);
    CHECK(nu_region(q, cr, NuMethod::ClosedForm).value == doctest::Approx(exact));
    const auto est = nu_region(q, cr, NuMethod::MonteCarlo, mc(400000));
    CHECK(est.sigma > 0);
    CHECK(std::fabs(est.value - exact) <= 3 * est.sigma);
  }

  TEST_CASE("zero exponent gives Lebesgue volume") {
    for (const auto& name : builtin_fan_names()) {
      const Variety v = make_variety(builtin_fan(name));
      const auto cr = compile_region(v, unit_box_region(v, Rational(3)));
      const std::vector<double> w(static_cast<std::size_t>(v.t()), 0.0);
      CHECK(integrate_exp(cr, w, NuMethod::ClosedForm).value ==
            doctest::Approx(std::pow(std::log(3.0), v.t())));
    }
    const Variety p2 = make_variety(builtin_fan("P2"));
    const auto cr = compile_region(p2, unit_box_region(p2));
    CHECK_THROWS_AS(integrate_exp(cr, {0.0, 0.0}, NuMethod::ClosedForm), Error);
  }

  TEST_CASE("non-parallelotope regions use Monte Carlo") {
    const Variety q = make_variety(builtin_fan("P1xP1"));
    const double L = std::log(4.0);
    // Triangle a, b >= 0, a + b <= L in the ruling coordinates.
    const auto cr = compile_region(
        q, single({constraint({1, 0, 0, 0}, Bound::of(0), Bound::infinite()), constraint({0, 0, 1, 0}, Bound::of(0), Bound::infinite()),
                   constraint({1, 0, 1, 0}, Bound::infinite(), Bound::of(L))}));
    const double exact = (std::exp(2 * L) * (2 * L - 1) + 1) / 4;
    CHECK_THROWS_AS(nu_region(q, cr, NuMethod::ClosedForm), Error);
    const auto est = nu_region(q, cr, NuMethod::Auto, mc(400000));
    CHECK(est.sigma > 0);
    CHECK(std::fabs(est.value - exact) <= 3 * est.sigma);
  }

  TEST_CASE("overlapping unions") {
    const Variety p1 = make_variety(builtin_fan("P1"));
    Region r;
    r.polyhedra.push_back(single({constraint({1, 0}, Bound::of(0), Bound::log_of(2))}).polyhedra[0]);
    r.polyhedra.push_back(single({constraint({1, 0}, Bound::log_of(Rational(3, 2)), Bound::log_of(3))}).polyhedra[0]);
    const auto cr = compile_region(p1, r);
    CHECK(nu_region(p1, cr, NuMethod::Auto).value == doctest::Approx(4.0));
    // Five pieces: beyond inclusion-exclusion, Monte Carlo over the union.
    Region five;
    for (int i = 0; i < 5; ++i)
      five.polyhedra.push_back(
          single({constraint({1, 0}, Bound::of(0.1 * i), Bound::of(0.1 * i + 0.3))}).polyhedra[0]);
    const auto est = nu_region(p1, compile_region(p1, five), NuMethod::Auto, mc(400000));
    CHECK(std::fabs(est.value - std::expm1(2 * 0.7) / 2) <= 3 * est.sigma);
  }

  TEST_CASE("torsor volumes") {
    const Variety p1 = make_variety(builtin_fan("P1"));
    const auto unit = compile_region(p1, unit_box_region(p1));
    const auto vol = torsor_region_volume(p1, unit, mc(400000));
    CHECK(std::fabs(vol.value - 12.0) <= 3 * vol.sigma);
    const auto zero = compile_region(p1, single({constraint({1, 0}, Bound::of(0), Bound::of(0), true)}));
    CHECK(torsor_region_volume(p1, zero, mc(10000)).value == 0.0);

    const Variety q = make_variety(builtin_fan("P1xP1"));
    const auto cr = compile_region(q, p1p1_rulings(Bound::log_of(2), Bound::log_of(2)));
    const auto vq = torsor_region_volume(q, cr, mc(400000));
    CHECK(std::fabs(vq.value - 144.0) <= 3 * vq.sigma);
  }

  TEST_CASE("Monte Carlo results do not depend on threads") {
    const Variety f = make_variety(builtin_fan("F1"));
    const auto cr = compile_region(f, unit_box_region(f));
    const auto a = torsor_region_volume(f, cr, mc(100000, 5, 1));
    const auto b = torsor_region_volume(f, cr, mc(100000, 5, 4));
    CHECK(a.value == b.value);
    CHECK(a.sigma == b.sigma);
    const auto c = torsor_region_volume(f, cr, mc(100000, 6, 1));
    CHECK(a.value != c.value);
  }

  TEST_CASE("real density") {
    const Variety p1 = make_variety(builtin_fan("P1"));
    const auto rd = real_density(p1, unit_box_region(p1), mc(400000));
    CHECK(rd.nu.value == doctest::Approx(1.5));
    CHECK(std::fabs(rd.mu.value - 4.0) <= 3 * rd.mu.sigma);
    CHECK(std::fabs(rd.mu.value - rd.mu_check.value) <= 3 * std::hypot(rd.mu.sigma, rd.mu_check.sigma));
    CHECK_FALSE(rd.check_region.empty());

    const Variety q = make_variety(builtin_fan("P1xP1"));
    const auto rq = real_density(q, p1p1_rulings(Bound::log_of(2), Bound::log_of(2)), mc(400000));
    CHECK(rq.nu.value == doctest::Approx(9.0 / 4));
    CHECK(std::fabs(rq.mu.value - 16.0) <= 3 * rq.mu.sigma);

    // Two regions of P2 must agree; the check itself runs inside real_density.
    const Variety p2 = make_variety(builtin_fan("P2"));
    const auto r2 = real_density(p2, single({constraint({1, 0, 0}, Bound::of(0.2), Bound::of(0.9))}), mc(400000));
    CHECK(std::fabs(r2.mu.value - 12.0) <= 3 * r2.mu.sigma);
  }

  TEST_CASE("Euler products") {
    const auto p1 = euler_product(make_variety(builtin_fan("P1")), 100000);
    CHECK(std::fabs(p1.value - 1 / kZeta2) < 1e-5);
    CHECK(p1.value * p1.tail_lo <= 1 / kZeta2);
    CHECK(p1.value * p1.tail_hi >= 1 / kZeta2);
    CHECK(p1.primes == 9592);
    const auto p2 = euler_product(make_variety(builtin_fan("P2")), 100000);
    CHECK(std::fabs(p2.value - 1 / kZeta3) < 1e-5);
    CHECK(p2.value * p2.tail_lo <= 1 / kZeta3);
    CHECK(p2.value * p2.tail_hi >= 1 / kZeta3);
    const auto q = euler_product(make_variety(builtin_fan("P1xP1")), 100000);
    CHECK(std::fabs(q.value - 1 / (kZeta2 * kZeta2)) < 1e-5);
    CHECK_THROWS_AS(euler_product(make_variety(builtin_fan("P1")), 7), Error);
  }

  TEST_CASE("Euler factors match local densities") {
    for (const auto& name : builtin_fan_names()) {
      const Variety v = make_variety(builtin_fan(name));
      const auto e = euler_product(v, 11);
      for (int p : {2, 3, 5, 7, 11, 13}) {
        Rational s = 0, pj = 1;
        for (const auto& c : e.coefficients) {
          s += Rational(c) / pj;
          pj *= p;
        }
        CHECK(s == local_density(v.fan, p));
      }
      CHECK(e.coefficients.size() >= 2);
      CHECK(e.coefficients[0] == 1);
      CHECK(e.coefficients[1] == 0);
    }
  }

  TEST_CASE("Euler products converge inside the tail width") {
    for (const auto& name : {"P1", "F1", "dP6", "P3"}) {
      const Variety v = make_variety(builtin_fan(name));
      const auto a = euler_product(v, 5000);
      const auto b = euler_product(v, 10000);
      CHECK(std::fabs(a.value - b.value) <= a.value * (a.tail_hi - a.tail_lo));
      CHECK(b.value * b.tail_lo >= a.value * a.tail_lo * (1 - 1e-12));
      CHECK(b.value * b.tail_hi <= a.value * a.tail_hi * (1 + 1e-12));
    }
  }

  TEST_CASE("prediction") {
    const Variety v = make_variety(builtin_fan("P1"));
    PredictConfig cfg;
    cfg.mc = mc(400000);
    cfg.eps = 0.1;
    const auto rep = predict(v, unit_box_region(v), validate_direction(v.pic, {1, 1}), cfg);
    CHECK(rep.error_exponent == doctest::Approx(0.4));
    CHECK(rep.anticanonical_pairing == 2);
    CHECK(rep.f == 2);
    const double closed = 6 / kZeta2;
    const auto [lo, hi] = rep.prediction_interval(64);
    CHECK(lo <= closed * 4096);
    CHECK(hi >= closed * 4096);
    CHECK(rep.prediction(64) == doctest::Approx(closed * 4096).epsilon(0.01));
    for (double B : {1.0, 2.0, 10.0, 1e3})
      CHECK(rep.prediction(B) / (B * B) == doctest::Approx(rep.prediction(1.0)).epsilon(1e-12));
    CHECK(rep.tamagawa_lo <= 4 / kZeta2);
    CHECK(rep.tamagawa_hi >= 4 / kZeta2);

    const auto doc = nlohmann::json::parse(rep.to_json());
    CHECK(doc.contains("nu"));
    CHECK(doc.contains("tamagawa"));
    CHECK(doc.contains("provenance"));
    CHECK(doc["brauer_factor"] == 1);
  }
}
