#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "torix/region.hpp"
#include "torix/torsor.hpp"

namespace torix {

struct Estimate {
  double value = 0.0;
  double sigma = 0.0;  // standard error, 0 for closed forms
};

struct McOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Counter-based generator: uniform in [0,1) for (seed, index, coordinate).
/// The stream does not depend on how work is split across threads.
double mc_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t coord);

enum class NuMethod { Auto, ClosedForm, MonteCarlo };

/// Integral of exp(<w, a>) over the region, w = ample coordinates of -K.
/// Closed form when every polyhedron (and every intersection, for at most 4
/// polyhedra) is cut out by t independent classes; hit-or-miss otherwise.
Estimate nu_region(const Variety& v, const CompiledRegion& region, NuMethod method,
                   const McOptions& mc = {});
/// Same integrator with an arbitrary exponent vector (unit tests use w = 0).
Estimate integrate_exp(const CompiledRegion& region, const std::vector<double>& w,
                       NuMethod method, const McOptions& mc = {});

/// Lebesgue volume of { y in R^rays : h(y) in D }, by Monte Carlo over the
/// per-ray box.
Estimate torsor_region_volume(const Variety& v, const CompiledRegion& region,
                              const McOptions& mc = {});

struct RealDensity {
  Estimate mu;             // from the caller's region
  Estimate mu_check;       // from the reference box
  Estimate nu;
  Estimate volume;
  std::string check_region;
};

/// mu_inf = Vol / (2^t nu), cross-checked on a second region; estimates more
/// than 3 combined standard errors apart raise Tolerance.
RealDensity real_density(const Variety& v, const Region& region, const McOptions& mc = {});

struct EulerProduct {
  double value = 0.0;     // prod_{p <= p_max} of the local factors
  double tail_lo = 1.0;   // the remaining product lies in [tail_lo, tail_hi]
  double tail_hi = 1.0;
  std::int64_t p_max = 0;
  std::size_t primes = 0;
  std::vector<BigInt> coefficients;  // factor = sum_j c_j p^-j
};

EulerProduct euler_product(const Variety& v, std::int64_t p_max);

struct PredictConfig {
  McOptions mc;
  std::int64_t p_max = 100'000;
  double eps = 0.05;
};

struct DensityReport {
  Estimate nu;
  Estimate torsor_volume;
  RealDensity real;
  EulerProduct euler;
  double tamagawa = 0.0;
  double tamagawa_lo = 0.0;
  double tamagawa_hi = 0.0;
  Rational anticanonical_pairing;  // <-K, u>
  double error_exponent = 0.0;
  int f = 0;
  PredictConfig config;
  std::uint64_t fan_hash = 0;
  std::string region_json;
  std::vector<Rational> pairings;

  /// nu tau B^<-K,u>
  double prediction(double B) const;
  /// 3 sigma Monte Carlo band times the Euler tail enclosure.
  std::pair<double, double> prediction_interval(double B) const;
  std::string to_json() const;
};

DensityReport predict(const Variety& v, const Region& region, const GrowthDirection& dir,
                      const PredictConfig& config = {});

}  // namespace torix
