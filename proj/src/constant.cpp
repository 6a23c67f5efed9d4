#include "torix/constant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include <json.hpp>

#include "torix/linalg.hpp"
#include "torix/mobius.hpp"

namespace torix {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kChunk = 1U << 14;

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

// Splits [0, n) into fixed chunks, runs `body` on each, and reduces the
// per-chunk moments in chunk order so the result ignores the thread count.
template <class Body>
Moments chunked(std::uint64_t n, unsigned threads, Body body) {
  const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<Moments> parts(chunks);
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(chunks, 1))));
  auto work = [&](unsigned tid) {
    for (std::uint64_t c = tid; c < chunks; c += threads)
      parts[c] = body(c * kChunk, std::min(n, (c + 1) * kChunk));
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned tid = 0; tid < threads; ++tid)
      pool.emplace_back([&, tid] {
        try {
          work(tid);
        } catch (...) {
          errors[tid] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  Moments total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
  }
  return total;
}

// (e^{c b} - e^{c a}) / c, or b - a when c vanishes.
double exp_segment(double c, double a, double b) {
  if (b <= a) return 0.0;
  if (std::fabs(c) * (b - a) < 1e-300) return b - a;
  if (c == 0.0) return b - a;
  return std::exp(c * a) * std::expm1(c * (b - a)) / c;
}

struct Slab {
  IntVec dir;  // primitive, first nonzero entry positive
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

// Closed-form integral over the intersection of the given constraints, or
// nullopt when they do not describe a parallelotope.
std::optional<double> parallelotope_integral(const std::vector<const CompiledConstraint*>& cons,
                                             const std::vector<double>& w, int t) {
  std::vector<Slab> slabs;
  for (const auto* c : cons) {
    std::int64_t g = linalg::gcd(c->weights);
    if (g == 0) {
      // 0 in [min, max] or empty
      const bool ok = (!c->min.finite || c->min.value <= 0) && (!c->max.finite || c->max.value >= 0);
      if (!ok) return 0.0;
      continue;
    }
    IntVec d(c->weights);
    const auto first = std::find_if(d.begin(), d.end(), [](auto x) { return x != 0; });
    if (*first < 0) g = -g;
    for (auto& x : d) x /= g;
    // <d, a> = <weights, a> / g; a negative g swaps the sides.
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double gd = static_cast<double>(g);
    const Bound& lo_b = g > 0 ? c->min : c->max;
    const Bound& hi_b = g > 0 ? c->max : c->min;
    const double lo = lo_b.finite ? lo_b.value / gd : -inf;
    const double hi = hi_b.finite ? hi_b.value / gd : inf;
    auto it = std::find_if(slabs.begin(), slabs.end(), [&](const Slab& s) { return s.dir == d; });
    if (it == slabs.end()) {
      slabs.push_back({d, lo, hi});
    } else {
      it->lo = std::max(it->lo, lo);
      it->hi = std::min(it->hi, hi);
    }
  }
  for (const auto& s : slabs)
    if (s.hi <= s.lo) return 0.0;
  if (static_cast<int>(slabs.size()) != t) return std::nullopt;
  IntMatrix cm(static_cast<std::size_t>(t), static_cast<std::size_t>(t));
  for (int j = 0; j < t; ++j) {
    if (!std::isfinite(slabs[j].lo) || !std::isfinite(slabs[j].hi)) return std::nullopt;
    for (int k = 0; k < t; ++k) cm(j, k) = slabs[j].dir[k];
  }
  const std::int64_t det = linalg::determinant(cm);
  if (det == 0) return std::nullopt;
  // a = C^{-1} b, so <w, a> = <C^{-T} w, b>.
  std::vector<std::vector<double>> ct(static_cast<std::size_t>(t), std::vector<double>(static_cast<std::size_t>(t)));
  for (int j = 0; j < t; ++j)
    for (int k = 0; k < t; ++k) ct[k][j] = static_cast<double>(cm(j, k));
  const auto wp = linalg::solve(ct, w);
  if (!wp) return std::nullopt;
  double out = 1.0 / std::fabs(static_cast<double>(det));
  for (int j = 0; j < t; ++j) out *= exp_segment((*wp)[j], slabs[j].lo, slabs[j].hi);
  return out;
}

std::optional<double> closed_form(const CompiledRegion& region, const std::vector<double>& w) {
  const std::size_t np = region.polyhedra.size();
  if (np > 4) return std::nullopt;
  double total = 0.0;
  for (std::uint32_t s = 1; s < (1U << np); ++s) {
    std::vector<const CompiledConstraint*> cons;
    for (std::size_t i = 0; i < np; ++i)
      if ((s >> i) & 1U)
        for (const auto& c : region.polyhedra[i].constraints) cons.push_back(&c);
    const auto part = parallelotope_integral(cons, w, region.t);
    if (!part) return std::nullopt;
    total += (__builtin_popcount(s) % 2 == 1 ? 1.0 : -1.0) * *part;
  }
  return total;
}

}  // namespace

double mc_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t coord) {
  const std::uint64_t x = splitmix(splitmix(seed) ^ (index * 0xD1B54A32D192ED03ULL + coord));
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

Estimate integrate_exp(const CompiledRegion& region, const std::vector<double>& w, NuMethod method,
                       const McOptions& mc) {
  if (static_cast<int>(w.size()) != region.t)
    throw Error(ErrorCode::InvalidArgument, "exponent vector has length " + std::to_string(w.size()) +
                                                ", expected " + std::to_string(region.t));
  if (method != NuMethod::MonteCarlo) {
    if (auto cf = closed_form(region, w)) return {*cf, 0.0};
    if (method == NuMethod::ClosedForm)
      throw Error(ErrorCode::InvalidArgument,
                  "closed form needs every polyhedron cut out by t independent classes "
                  "(at most 4 polyhedra)");
  }
  if (mc.samples == 0) throw Error(ErrorCode::InvalidArgument, "samples must be positive");
  const int t = region.t;
  const auto lo = region.box_lo();
  const auto hi = region.box_hi();
  double vol = 1.0;
  for (int k = 0; k < t; ++k) vol *= std::max(0.0, hi[k] - lo[k]);
  if (!(vol > 0.0) || !std::isfinite(vol)) return {0.0, 0.0};
  const Moments mom = chunked(mc.samples, mc.threads, [&](std::uint64_t b, std::uint64_t e) {
    Moments m;
    std::vector<double> a(static_cast<std::size_t>(t));
    for (std::uint64_t i = b; i < e; ++i) {
      double s = 0.0;
      for (int k = 0; k < t; ++k) {
        a[k] = lo[k] + (hi[k] - lo[k]) * mc_uniform(mc.seed, i, static_cast<std::uint64_t>(k));
        s += w[k] * a[k];
      }
      if (!region_contains(region, a, 0.0)) continue;
      const double f = std::exp(s);
      m.sum += f;
      m.sum_sq += f * f;
    }
    return m;
  });
  const double n = static_cast<double>(mc.samples);
  const double mean = mom.sum / n;
  const double var = std::max(0.0, mom.sum_sq / n - mean * mean);
  return {vol * mean, vol * std::sqrt(var / n)};
}

Estimate nu_region(const Variety& v, const CompiledRegion& region, NuMethod method,
                   const McOptions& mc) {
  std::vector<double> w(v.anticanonical_ample.begin(), v.anticanonical_ample.end());
  return integrate_exp(region, w, method, mc);
}

Estimate torsor_region_volume(const Variety& v, const CompiledRegion& region, const McOptions& mc) {
  if (mc.samples == 0) throw Error(ErrorCode::InvalidArgument, "samples must be positive");
  const auto bounds = real_coordinate_bounds(v, region, nullptr);
  const int m = v.m();
  const int t = v.t();
  double vol = 1.0;
  for (double b : bounds) vol *= 2.0 * b;
  if (!(vol > 0.0) || !std::isfinite(vol))
    throw Error(ErrorCode::InvalidArgument, "torsor sampling box has zero or infinite volume");

  // Sparse exponent lists per monomial, grouped by class.
  std::vector<std::vector<std::vector<std::pair<int, double>>>> mons(static_cast<std::size_t>(t));
  for (int k = 0; k < t; ++k)
    for (const auto& d : v.sections.monomials[k]) {
      std::vector<std::pair<int, double>> f;
      for (int r = 0; r < m; ++r)
        if (d[r] != 0) f.emplace_back(r, static_cast<double>(d[r]));
      mons[k].push_back(std::move(f));
    }

  const Moments mom = chunked(mc.samples, mc.threads, [&](std::uint64_t b, std::uint64_t e) {
    Moments out;
    std::vector<double> logs(static_cast<std::size_t>(m));
    std::vector<double> h(static_cast<std::size_t>(t));
    for (std::uint64_t i = b; i < e; ++i) {
      for (int r = 0; r < m; ++r) {
        const double y = bounds[r] * (2.0 * mc_uniform(mc.seed, i, static_cast<std::uint64_t>(r)) - 1.0);
        logs[r] = y == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::fabs(y));
      }
      bool finite = true;
      for (int k = 0; k < t && finite; ++k) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& f : mons[k]) {
          double s = 0.0;
          for (auto [r, e2] : f) s += e2 * logs[r];
          best = std::max(best, s);
        }
        finite = std::isfinite(best);
        h[k] = best;
      }
      if (finite && region_contains(region, h, 0.0)) out.sum += 1.0;
    }
    out.sum_sq = out.sum;
    return out;
  });
  const double n = static_cast<double>(mc.samples);
  const double p = mom.sum / n;
  return {vol * p, vol * std::sqrt(p * (1.0 - p) / n)};
}

namespace {

Estimate density_from(const Estimate& vol, const Estimate& nu, int t) {
  if (!(nu.value > 0.0))
    throw Error(ErrorCode::InvalidArgument, "region has zero nu-measure");
  const double scale = std::ldexp(1.0, t) * nu.value;
  const double mu = vol.value / scale;
  double rel = 0.0;
  if (vol.value > 0.0) rel += (vol.sigma / vol.value) * (vol.sigma / vol.value);
  rel += (nu.sigma / nu.value) * (nu.sigma / nu.value);
  const double sigma = vol.value > 0.0 ? mu * std::sqrt(rel) : vol.sigma / scale;
  return {mu, sigma};
}

}  // namespace

RealDensity real_density(const Variety& v, const Region& region, const McOptions& mc) {
  RealDensity out;
  const CompiledRegion cr = compile_region(v, region);
  out.nu = nu_region(v, cr, NuMethod::Auto, mc);
  out.volume = torsor_region_volume(v, cr, mc);
  out.mu = density_from(out.volume, out.nu, v.t());

  Region ref = unit_box_region(v, Rational(3));
  if (region_to_json(ref) == region_to_json(region)) ref = unit_box_region(v, Rational(2));
  out.check_region = region_to_json(ref);
  const CompiledRegion cref = compile_region(v, ref);
  McOptions mc2 = mc;
  mc2.seed = mc.seed + 1;
  const Estimate nu2 = nu_region(v, cref, NuMethod::Auto, mc2);
  const Estimate vol2 = torsor_region_volume(v, cref, mc2);
  out.mu_check = density_from(vol2, nu2, v.t());

  const double gap = std::fabs(out.mu.value - out.mu_check.value);
  const double band = 3.0 * std::hypot(out.mu.sigma, out.mu_check.sigma);
  if (gap > band)
    throw Error(ErrorCode::Tolerance,
                "real density depends on the region: " + std::to_string(out.mu.value) + " vs " +
                    std::to_string(out.mu_check.value) + " (3 sigma = " + std::to_string(band) + ")");
  return out;
}

namespace {

std::vector<std::int64_t> primes_up_to(std::int64_t n) {
  std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
  std::vector<std::int64_t> out;
  for (std::int64_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::int64_t j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

BigInt tree_product(std::vector<BigInt>& xs, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return xs[lo];
  if (hi == lo) return 1;
  const std::size_t mid = lo + (hi - lo) / 2;
  return tree_product(xs, lo, mid) * tree_product(xs, mid, hi);
}

double ratio_to_double(const BigInt& num, const BigInt& den) {
  // Both operands can be hundreds of thousands of bits; shift to ~120 bits
  // of precision before converting.
  const std::ptrdiff_t nb = static_cast<std::ptrdiff_t>(msb(num));
  const std::ptrdiff_t db = static_cast<std::ptrdiff_t>(msb(den));
  const std::ptrdiff_t sn = std::max<std::ptrdiff_t>(0, nb - 120);
  const std::ptrdiff_t sd = std::max<std::ptrdiff_t>(0, db - 120);
  const double a = BigInt(num >> sn).convert_to<double>();
  const double b = BigInt(den >> sd).convert_to<double>();
  return std::ldexp(a / b, static_cast<int>(sn - sd));
}

}  // namespace

EulerProduct euler_product(const Variety& v, std::int64_t p_max) {
  if (p_max < 11) throw Error(ErrorCode::InvalidArgument, "p_max must be at least 11");
  if (p_max > 100'000'000) throw Error(ErrorCode::Budget, "p_max above 10^8");
  EulerProduct out;
  out.p_max = p_max;
  const MobiusLocalTable table = mobius_table(v.primitive_collections);
  const int m = v.m();
  out.coefficients = table.density_coefficients(m);
  if (out.coefficients[0] != 1 || out.coefficients[1] != 0)
    throw Error(ErrorCode::Internal, "local factor is not 1 + O(1/p^2)");

  const auto primes = primes_up_to(p_max);
  out.primes = primes.size();
  std::vector<BigInt> nums;
  std::vector<BigInt> dens;
  nums.reserve(primes.size());
  dens.reserve(primes.size());
  for (std::int64_t p : primes) {
    const BigInt bp = p;
    BigInt num = 0;
    for (int j = 0; j <= m; ++j) num = num * bp + out.coefficients[j];
    // Cross-check with the point count, exactly.
    const int t = v.t();
    const BigInt lhs = num;
    const BigInt rhs = pow(bp - 1, static_cast<unsigned>(t)) * count_points_mod_p(v.fan, bp);
    if (lhs != rhs)
      throw Error(ErrorCode::Internal, "Euler factor differs from the local density at p = " +
                                           std::to_string(p));
    nums.push_back(num);
    dens.push_back(pow(bp, static_cast<unsigned>(m)));
  }
  const BigInt num = tree_product(nums, 0, nums.size());
  const BigInt den = tree_product(dens, 0, dens.size());
  out.value = ratio_to_double(num, den);

  // |factor - 1| <= C/p^2 for p > p_max; |log(1+z)| <= |z|/(1-|z|);
  // sum_{p > P} p^-2 <= 1/(P-1).
  double c = 0.0;
  for (std::size_t j = 2; j < out.coefficients.size(); ++j)
    c += std::fabs(out.coefficients[j].convert_to<double>());
  const double pm = static_cast<double>(p_max);
  const double zmax = c / ((pm + 1) * (pm + 1));
  if (zmax >= 0.5) throw Error(ErrorCode::InvalidArgument, "p_max too small for the tail bound");
  const double s = c / (pm - 1.0) / (1.0 - zmax);
  out.tail_lo = std::exp(-s);
  out.tail_hi = std::exp(s);
  return out;
}

double DensityReport::prediction(double B) const {
  return nu.value * tamagawa * std::pow(B, to_double(anticanonical_pairing));
}

std::pair<double, double> DensityReport::prediction_interval(double B) const {
  // nu * mu_inf = Vol / 2^t, so only the torsor-volume error enters.
  const double p = prediction(B);
  const double rel = torsor_volume.value > 0 ? 3.0 * torsor_volume.sigma / torsor_volume.value : 0.0;
  return {p * std::max(0.0, 1.0 - rel) * euler.tail_lo, p * (1.0 + rel) * euler.tail_hi};
}

std::string DensityReport::to_json() const {
  using json = nlohmann::json;
  auto est = [](const Estimate& e) { return json{{"value", e.value}, {"stderr", e.sigma}}; };
  json pair = json::array();
  for (const auto& r : pairings) pair.push_back(to_string(r));
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fan_hash));
  json coeffs = json::array();
  for (const auto& c : euler.coefficients) coeffs.push_back(c.str());
  json doc = {
      {"nu", est(nu)},
      {"torsor_volume", est(torsor_volume)},
      {"real_density", est(real.mu)},
      {"real_density_check", {{"value", real.mu_check.value},
                              {"stderr", real.mu_check.sigma},
                              {"region", json::parse(real.check_region)}}},
      {"euler_value", euler.value},
      {"euler_coefficients", coeffs},
      {"tail_interval", {euler.tail_lo, euler.tail_hi}},
      {"tamagawa", {{"value", tamagawa}, {"interval", {tamagawa_lo, tamagawa_hi}}}},
      {"brauer_factor", 1},
      {"anticanonical_pairing", to_string(anticanonical_pairing)},
      {"error_exponent", error_exponent},
      {"f", f},
      {"provenance",
       {{"seed", config.mc.seed},
        {"samples", config.mc.samples},
        {"p_max", config.p_max},
        {"eps", config.eps},
        {"fan_hash", hash},
        {"pairings", pair},
        {"region", json::parse(region_json)}}},
  };
  return doc.dump(2);
}

DensityReport predict(const Variety& v, const Region& region, const GrowthDirection& dir,
                      const PredictConfig& config) {
  if (!(config.eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  DensityReport rep;
  rep.config = config;
  rep.fan_hash = fan_hash(v.fan);
  rep.region_json = region_to_json(region);
  rep.pairings = dir.pairings;
  rep.real = real_density(v, region, config.mc);
  rep.nu = rep.real.nu;
  rep.torsor_volume = rep.real.volume;
  rep.euler = euler_product(v, config.p_max);
  const double mu = rep.real.mu.value;
  const double sig = rep.real.mu.sigma;
  rep.tamagawa = mu * rep.euler.value;
  rep.tamagawa_lo = std::max(0.0, mu - 3 * sig) * rep.euler.value * rep.euler.tail_lo;
  rep.tamagawa_hi = (mu + 3 * sig) * rep.euler.value * rep.euler.tail_hi;
  rep.anticanonical_pairing = dir.anticanonical_pairing();
  rep.f = v.f;
  double min_pair = std::numeric_limits<double>::infinity();
  for (double x : dir.pairings_d) min_pair = std::min(min_pair, x);
  rep.error_exponent = (1.0 - 1.0 / v.f - config.eps) * min_pair;
  return rep;
}

}  // namespace torix
