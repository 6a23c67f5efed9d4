#include "torix/torsor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

namespace torix {

namespace {

using i128 = __int128;

BigInt to_bigint(i128 x) {
  const bool neg = x < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-x) : static_cast<unsigned __int128>(x);
  BigInt hi = static_cast<std::uint64_t>(u >> 64);
  BigInt out = (hi << 64) + BigInt(static_cast<std::uint64_t>(u));
  return neg ? BigInt(-out) : out;
}

BigInt monomial_value(const IntVec& exps, std::span<const std::int64_t> y) {
  BigInt v = 1;
  for (std::size_t r = 0; r < exps.size(); ++r)
    for (std::int64_t e = 0; e < exps[r]; ++e) v *= y[r];
  return v;
}

void require_nonzero(std::span<const std::int64_t> y) {
  if (std::all_of(y.begin(), y.end(), [](auto x) { return x == 0; }))
    throw Error(ErrorCode::InvalidArgument, "the zero vector is not a torsor point");
}

}  // namespace

double log_abs(const BigInt& x) {
  if (x == 0) return -std::numeric_limits<double>::infinity();
  BigInt a = abs(x);
  const std::size_t bits = msb(a);
  if (bits < 1000) return std::log(a.convert_to<double>());
  const std::size_t drop = bits - 60;
  a >>= drop;
  return std::log(a.convert_to<double>()) + static_cast<double>(drop) * std::log(2.0);
}

GrowthSpec make_growth(const Variety& v, const GrowthDirection& dir, double B) {
  if (!(B >= 1.0) || !std::isfinite(B))
    throw Error(ErrorCode::InvalidArgument, "B must be a finite real >= 1");
  GrowthSpec gs;
  gs.direction = dir;
  gs.B = B;
  if (B == std::floor(B) && B < 9.0e15) gs.B_integer = BigInt(static_cast<std::int64_t>(B));
  const double lb = std::log(B);
  for (const auto& cls : v.sections.basis) {
    gs.u_ample.push_back(dir.pair(cls));
    gs.shift.push_back(lb * to_double(gs.u_ample.back()));
  }
  return gs;
}

bool is_integral_torsor_point(const Fan& f, const std::vector<RaySet>& collections,
                              std::span<const std::int64_t> y) {
  if (static_cast<int>(y.size()) != f.num_rays())
    throw Error(ErrorCode::InvalidArgument, "point has wrong number of coordinates");
  require_nonzero(y);
  for (auto c : collections) {
    std::int64_t g = 0;
    for (int r : c.indices()) g = std::gcd(g, y[r]);
    if (g != 1) return false;
  }
  return true;
}

bool is_integral_torsor_point(const Variety& v, std::span<const std::int64_t> y) {
  return is_integral_torsor_point(v.fan, v.primitive_collections, y);
}

bool is_torsor_point_via_sections(const SectionBasis& sb, std::span<const std::int64_t> y) {
  require_nonzero(y);
  for (const auto& mons : sb.monomials) {
    BigInt g = 0;
    for (const auto& d : mons) {
      g = gcd(g, abs(monomial_value(d, y)));
      if (g == 1) break;
    }
    if (g != 1) return false;
  }
  return true;
}

MultiHeight multi_height(const SectionBasis& sb, std::span<const std::int64_t> y) {
  MultiHeight mh;
  for (std::size_t k = 0; k < sb.rank(); ++k) {
    BigInt best = -1;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < sb.monomials[k].size(); ++i) {
      const BigInt val = abs(monomial_value(sb.monomials[k][i], y));
      if (val > best) {
        best = val;
        arg = i;
      }
    }
    if (best == 0)
      throw Error(ErrorCode::InvalidArgument,
                  "all sections of L_" + std::to_string(k + 1) + " vanish: not a torsor point");
    mh.h.push_back(log_abs(best));
    mh.witness_index.push_back(arg);
    mh.witness_value.push_back(best);
  }
  return mh;
}

std::vector<double> multi_height_real(const SectionBasis& sb, std::span<const double> y) {
  std::vector<double> logs(y.size());
  for (std::size_t r = 0; r < y.size(); ++r)
    logs[r] = y[r] == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::fabs(y[r]));
  std::vector<double> h;
  for (std::size_t k = 0; k < sb.rank(); ++k) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& d : sb.monomials[k]) {
      double s = 0.0;
      for (std::size_t r = 0; r < d.size(); ++r)
        if (d[r] != 0) s += static_cast<double>(d[r]) * logs[r];
      best = std::max(best, s);
    }
    if (best == -std::numeric_limits<double>::infinity())
      throw Error(ErrorCode::InvalidArgument,
                  "all sections of L_" + std::to_string(k + 1) + " vanish: not in T(R)");
    h.push_back(best);
  }
  return h;
}

namespace {

// sign(sum_k w_k log M_k - e log B - log r) computed exactly, or nullopt.
std::optional<int> exact_sign(const CompiledConstraint& c, bool upper,
                              const std::vector<BigInt>& maxima, const GrowthSpec* gs) {
  const Bound& b = upper ? c.max : c.min;
  if (!b.exp_value) return std::nullopt;
  Rational e = 0;
  if (gs)
    for (std::size_t k = 0; k < c.weights.size(); ++k) e += gs->u_ample[k] * c.weights[k];
  BigInt e_int = 0;
  if (e != 0) {
    if (denominator(e) != 1 || !gs->B_integer) return std::nullopt;
    e_int = numerator(e);
  }
  BigInt lhs = denominator(*b.exp_value);
  BigInt rhs = numerator(*b.exp_value);
  for (std::size_t k = 0; k < c.weights.size(); ++k) {
    const std::int64_t w = c.weights[k];
    for (std::int64_t i = 0; i < std::llabs(w); ++i) (w > 0 ? lhs : rhs) *= maxima[k];
  }
  if (e_int != 0) {
    const unsigned long p = abs(e_int).convert_to<unsigned long>();
    const BigInt bp = pow(*gs->B_integer, p);
    (e_int > 0 ? rhs : lhs) *= bp;
  }
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

}  // namespace

bool in_region(const Variety& v, const MultiHeight& h, const CompiledRegion& region,
               const GrowthSpec* gs, const HeightOptions& opts) {
  if (static_cast<int>(h.h.size()) != v.t())
    throw Error(ErrorCode::InvalidArgument, "multi-height has wrong rank");
  std::vector<double> a(h.h);
  if (gs)
    for (std::size_t k = 0; k < a.size(); ++k) a[k] -= gs->shift[k];
  TieBreaker tie;
  if (opts.exact_boundary)
    tie = [&](const CompiledConstraint& c, bool upper) {
      return exact_sign(c, upper, h.witness_value, gs);
    };
  return region_contains(region, a, opts.tol, opts.exact_boundary ? &tie : nullptr);
}

std::vector<double> real_coordinate_bounds(const Variety& v, const CompiledRegion& region,
                                           const GrowthSpec* gs) {
  std::vector<double> out;
  for (int r = 0; r < v.m(); ++r) {
    const IntVec& w = v.ray_ample[r];
    std::vector<double> f(w.begin(), w.end());
    double s = region.sup(f);
    if (gs) s += std::log(gs->B) * gs->direction.pairings_d[r];
    out.push_back(std::exp(s));
  }
  return out;
}

std::vector<double> coordinate_bounds(const Variety& v, const CompiledRegion& region,
                                      const GrowthSpec* gs) {
  std::vector<IntVec> ample;  // ample-basis coordinates
  const int t = v.t();
  for (int k = 0; k < t; ++k) {
    IntVec e(static_cast<std::size_t>(t), 0);
    e[k] = 1;
    ample.push_back(e);
  }
  if (is_ample(v.pic, v.pic.anticanonical)) ample.push_back(v.anticanonical_ample);
  ample.push_back(IntVec(static_cast<std::size_t>(t), 1));

  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : ample) {
    std::vector<double> f(a.begin(), a.end());
    double s = region.sup(f);
    if (gs)
      for (int k = 0; k < t; ++k) s += gs->shift[k] * static_cast<double>(a[k]);
    best = std::min(best, std::exp(s));
  }
  std::vector<double> out = real_coordinate_bounds(v, region, gs);
  for (auto& b : out) b = std::min(b, best);
  return out;
}

namespace {

struct Mono {
  std::vector<std::pair<int, int>> factors;  // (coordinate, exponent)
  int k = 0;
};

struct Plan {
  int m = 0;
  int t = 0;
  std::vector<int> order;
  std::vector<std::int64_t> ibound;
  std::vector<std::int64_t> scale;
  std::int64_t min_value = 0;
  bool torsor_check = true;
  std::vector<Mono> monos;
  std::vector<std::vector<int>> completing;  // depth -> monomials finished there
  std::vector<std::vector<int>> k_complete;  // depth -> classes finished there
  std::vector<long double> upper_cap;
  std::vector<long double> lower_cap;
  std::vector<std::uint64_t> collections;
  const CompiledRegion* region = nullptr;
  const GrowthSpec* gs = nullptr;
  HeightOptions hopts;
  std::vector<double> shift;
};

struct Tally {
  std::uint64_t torsor = 0;
  std::uint64_t torus = 0;
  std::uint64_t nodes = 0;
};

class Worker {
 public:
  using Visitor = std::function<void(std::span<const std::int64_t>)>;

  Worker(const Plan& plan, unsigned tid, unsigned threads, std::atomic<std::uint64_t>& global,
         std::uint64_t budget, const Visitor* visit)
      : p_(plan), tid_(tid), threads_(threads), global_(global), budget_(budget), visit_(visit),
        y_(static_cast<std::size_t>(plan.m), 0), a_(static_cast<std::size_t>(plan.t)) {}

  Tally run() {
    std::vector<i128> root(static_cast<std::size_t>(p_.t), 0);
    descend(0, root);
    flush();
    return tally_;
  }

 private:
  static i128 ipow(i128 base, int e) {
    i128 r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
  }

  void flush() {
    const std::uint64_t total = global_.fetch_add(pending_) + pending_;
    pending_ = 0;
    if (total > budget_)
      throw Error(ErrorCode::Budget, "enumeration node budget exceeded (" +
                                         std::to_string(budget_) + "); try a smaller B");
  }

  void descend(int depth, const std::vector<i128>& parent) {
    const int c = p_.order[depth];
    const auto& comp = p_.completing[depth];
    std::vector<i128> partial(comp.size());
    std::vector<int> expo(comp.size());
    for (std::size_t j = 0; j < comp.size(); ++j) {
      i128 prod = 1;
      for (auto [coord, e] : p_.monos[comp[j]].factors) {
        if (coord == c)
          expo[j] = e;
        else
          prod *= ipow(y_[coord], e);
      }
      partial[j] = prod;
    }

    std::vector<i128> cur(parent);
    auto eval = [&](std::int64_t v, std::vector<i128>& out) {
      // false when some completed monomial exceeds its cap
      out = parent;
      const i128 yv = static_cast<i128>(v) * p_.scale[c];
      for (std::size_t j = 0; j < comp.size(); ++j) {
        const i128 val = partial[j] * ipow(yv, expo[j]);
        const int k = p_.monos[comp[j]].k;
        if (static_cast<long double>(val) > p_.upper_cap[k]) return false;
        if (val > out[k]) out[k] = val;
      }
      return true;
    };
    auto reaches_lower = [&](const std::vector<i128>& mx) {
      for (int k : p_.k_complete[depth])
        if (static_cast<long double>(mx[k]) < p_.lower_cap[k]) return false;
      return true;
    };

    std::int64_t lo = p_.min_value;
    const std::int64_t hi = p_.ibound[c];
    if (lo > hi) return;
    if (!p_.k_complete[depth].empty()) {
      // Completed maxima are nondecreasing in v: binary search the first v
      // clearing every lower cap (ignoring upper caps).
      auto ok = [&](std::int64_t v) {
        std::vector<i128> mx(parent);
        const i128 yv = static_cast<i128>(v) * p_.scale[c];
        for (std::size_t j = 0; j < comp.size(); ++j) {
          const i128 val = partial[j] * ipow(yv, expo[j]);
          const int k = p_.monos[comp[j]].k;
          if (val > mx[k]) mx[k] = val;
        }
        return reaches_lower(mx);
      };
      if (!ok(hi)) return;
      std::int64_t a = lo, b = hi;
      while (a < b) {
        const std::int64_t mid = a + (b - a) / 2;
        if (ok(mid))
          b = mid;
        else
          a = mid + 1;
      }
      lo = a;
    }
    std::int64_t step = 1;
    if (depth == 0 && threads_ > 1) {
      step = threads_;
      const std::int64_t r = ((lo % step) + step) % step;
      lo += (static_cast<std::int64_t>(tid_) - r + step) % step;
    }
    for (std::int64_t v = lo; v <= hi; v += step) {
      if (++pending_ >= (1U << 20)) flush();
      ++tally_.nodes;
      if (!eval(v, cur)) break;
      y_[c] = v * p_.scale[c];
      if (depth + 1 == p_.m)
        leaf(cur);
      else
        descend(depth + 1, cur);
    }
    y_[c] = 0;
  }

  void leaf(const std::vector<i128>& mx) {
    for (int k = 0; k < p_.t; ++k) {
      if (mx[k] == 0) return;
      a_[k] = std::log(static_cast<double>(mx[k])) - p_.shift[k];
    }
    const TieBreaker* tiep = nullptr;
    TieBreaker tie;
    if (p_.hopts.exact_boundary) {
      tie = [&](const CompiledConstraint& con, bool upper) {
        std::vector<BigInt> vals;
        for (auto x : mx) vals.push_back(to_bigint(x));
        return exact_sign(con, upper, vals, p_.gs);
      };
      tiep = &tie;
    }
    if (!region_contains(*p_.region, a_, p_.hopts.tol, tiep)) return;
    if (p_.torsor_check)
      for (std::uint64_t mask : p_.collections) {
        std::int64_t g = 0;
        for (std::uint64_t b = mask; b != 0 && g != 1; b &= b - 1) g = std::gcd(g, y_[__builtin_ctzll(b)]);
        if (g != 1) return;
      }
    int nonzero = 0;
    for (auto x : y_) nonzero += x != 0;
    const std::uint64_t w = std::uint64_t{1} << nonzero;
    tally_.torsor += w;
    if (nonzero == p_.m) tally_.torus += w;
    if (visit_ && *visit_) expand_signs();
  }

  void expand_signs() {
    std::vector<int> nz;
    for (int r = 0; r < p_.m; ++r)
      if (y_[r] != 0) nz.push_back(r);
    std::vector<std::int64_t> s(y_);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nz.size()); ++mask) {
      for (std::size_t i = 0; i < nz.size(); ++i)
        s[nz[i]] = ((mask >> i) & 1U) ? -y_[nz[i]] : y_[nz[i]];
      (*visit_)(s);
    }
  }

  const Plan& p_;
  unsigned tid_;
  unsigned threads_;
  std::atomic<std::uint64_t>& global_;
  std::uint64_t budget_;
  const Visitor* visit_;
  std::vector<std::int64_t> y_;
  std::vector<double> a_;
  std::uint64_t pending_ = 0;
  Tally tally_;
};

Plan make_plan(const Variety& v, const CompiledRegion& region, const GrowthSpec* gs,
               const EnumOptions& opts, std::span<const std::int64_t> scale, bool torsor_check) {
  Plan p;
  p.m = v.m();
  p.t = v.t();
  p.region = &region;
  p.gs = gs;
  p.hopts = opts.height;
  p.torsor_check = torsor_check;
  p.min_value = torsor_check ? 0 : 1;
  p.scale.assign(scale.begin(), scale.end());
  p.shift = gs ? gs->shift : std::vector<double>(static_cast<std::size_t>(p.t), 0.0);
  for (auto c : v.primitive_collections) p.collections.push_back(c.mask());

  const std::vector<double> bounds = coordinate_bounds(v, region, gs);
  for (int r = 0; r < p.m; ++r) {
    const double b = bounds[r] * opts.bound_scale;
    const double ib = std::floor((b * (1.0 + 1e-9) + 1e-9) / static_cast<double>(p.scale[r]));
    if (ib > 4.0e18) throw Error(ErrorCode::Budget, "coordinate bound too large");
    p.ibound.push_back(static_cast<std::int64_t>(std::max(ib, -1.0)));
  }

  for (int k = 0; k < p.t; ++k)
    for (const auto& d : v.sections.monomials[k]) {
      Mono mono;
      mono.k = k;
      double log2max = 0.0;
      for (int r = 0; r < p.m; ++r)
        if (d[r] > 0) {
          mono.factors.emplace_back(r, static_cast<int>(d[r]));
          const double top = static_cast<double>(std::max<std::int64_t>(p.ibound[r], 1)) *
                             static_cast<double>(p.scale[r]);
          log2max += static_cast<double>(d[r]) * std::log2(top);
        }
      if (log2max > 124.0)
        throw Error(ErrorCode::Budget, "monomial values exceed the 128-bit enumeration range");
      p.monos.push_back(std::move(mono));
    }

  // Greedy order: finish as many monomials as early as possible.
  std::vector<bool> placed(static_cast<std::size_t>(p.m), false);
  std::vector<int> pending_count(p.monos.size());
  std::vector<int> occurrences(static_cast<std::size_t>(p.m), 0);
  for (std::size_t i = 0; i < p.monos.size(); ++i) {
    pending_count[i] = static_cast<int>(p.monos[i].factors.size());
    for (auto [r, e] : p.monos[i].factors) ++occurrences[r];
  }
  p.completing.assign(static_cast<std::size_t>(p.m), {});
  for (int depth = 0; depth < p.m; ++depth) {
    int best = -1;
    std::pair<int, int> best_score{-1, -1};
    for (int r = 0; r < p.m; ++r) {
      if (placed[r]) continue;
      int finished = 0;
      for (std::size_t i = 0; i < p.monos.size(); ++i)
        for (auto [c, e] : p.monos[i].factors)
          if (c == r && pending_count[i] == 1) ++finished;
      const std::pair<int, int> score{finished, occurrences[r]};
      if (score > best_score) {
        best_score = score;
        best = r;
      }
    }
    placed[best] = true;
    p.order.push_back(best);
    for (std::size_t i = 0; i < p.monos.size(); ++i)
      for (auto [c, e] : p.monos[i].factors)
        if (c == best && --pending_count[i] == 0) p.completing[depth].push_back(static_cast<int>(i));
  }
  p.k_complete.assign(static_cast<std::size_t>(p.m), {});
  for (int k = 0; k < p.t; ++k) {
    int last = 0;
    for (int depth = 0; depth < p.m; ++depth)
      for (int i : p.completing[depth])
        if (p.monos[i].k == k) last = depth;
    p.k_complete[last].push_back(k);
  }

  const double margin = 1e-6 + 100.0 * opts.height.tol;
  for (int k = 0; k < p.t; ++k) {
    std::vector<double> e(static_cast<std::size_t>(p.t), 0.0);
    e[k] = 1.0;
    const double hi = region.sup(e) + p.shift[k];
    const double lo = region.inf(e) + p.shift[k];
    p.upper_cap.push_back(std::exp(static_cast<long double>(hi + margin)));
    p.lower_cap.push_back(std::exp(static_cast<long double>(lo - margin)));
  }
  return p;
}

Tally run_plan(const Plan& p, const EnumOptions& opts, const Worker::Visitor* visit) {
  Tally total;
  if (p.upper_cap.empty() && p.t > 0) return total;
  for (auto cap : p.upper_cap)
    if (!(cap > 0)) return total;  // empty region
  const unsigned threads = visit ? 1U : std::max(1U, opts.threads);
  std::atomic<std::uint64_t> global{0};
  if (threads == 1) {
    Worker w(p, 0, 1, global, opts.node_budget, visit);
    return w.run();
  }
  std::vector<Tally> tallies(threads);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned tid = 0; tid < threads; ++tid)
    pool.emplace_back([&, tid] {
      try {
        Worker w(p, tid, threads, global, opts.node_budget, nullptr);
        tallies[tid] = w.run();
      } catch (...) {
        errors[tid] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& t : tallies) {
    total.torsor += t.torsor;
    total.torus += t.torus;
    total.nodes += t.nodes;
  }
  return total;
}

}  // namespace

CountReport enumerate_points(const Variety& v, const CompiledRegion& region, const GrowthSpec* gs,
                             const EnumOptions& opts) {
  const std::vector<std::int64_t> ones(static_cast<std::size_t>(v.m()), 1);
  const Plan plan = make_plan(v, region, gs, opts, ones, true);
  const Tally tally = run_plan(plan, opts, nullptr);

  CountReport rep;
  rep.torsor_count = tally.torsor;
  rep.torus_count = tally.torus;
  rep.boundary_count = rep.torsor_count - rep.torus_count;
  rep.nodes = tally.nodes;
  rep.bounds = coordinate_bounds(v, region, gs);
  rep.box_volume = 1.0;
  for (auto b : plan.ibound) rep.box_volume *= static_cast<double>(2 * std::max<std::int64_t>(b, 0) + 1);
  const BigInt fiber = BigInt(1) << v.t();
  if (rep.torsor_count % fiber != 0)
    throw Error(ErrorCode::Internal, "torsor count " + rep.torsor_count.str() +
                                         " is not divisible by 2^t");
  rep.rational_count = rep.torsor_count / fiber;
  return rep;
}

void for_each_point(const Variety& v, const CompiledRegion& region, const GrowthSpec* gs,
                    const std::function<void(std::span<const std::int64_t>)>& visit,
                    const EnumOptions& opts) {
  const std::vector<std::int64_t> ones(static_cast<std::size_t>(v.m()), 1);
  const Plan plan = make_plan(v, region, gs, opts, ones, true);
  run_plan(plan, opts, &visit);
}

BigInt count_sublattice(const Variety& v, std::span<const std::int64_t> d,
                        const CompiledRegion& region, const GrowthSpec* gs,
                        const EnumOptions& opts) {
  if (static_cast<int>(d.size()) != v.m())
    throw Error(ErrorCode::InvalidArgument, "d has wrong number of coordinates");
  for (auto x : d)
    if (x <= 0) throw Error(ErrorCode::InvalidArgument, "d must be positive");
  const Plan plan = make_plan(v, region, gs, opts, d, false);
  return BigInt(run_plan(plan, opts, nullptr).torsor);
}

std::vector<IntVec> unit_orbit(const PicardData& pd, std::span<const std::int64_t> y) {
  std::set<IntVec> orbit;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << pd.t); ++s) {
    IntVec z(y.begin(), y.end());
    for (int r = 0; r < pd.m; ++r) {
      std::int64_t parity = 0;
      for (int i = 0; i < pd.t; ++i)
        if ((s >> i) & 1U) parity += pd.ray_classes[r][i];
      if (parity % 2 != 0) z[r] = -z[r];
    }
    orbit.insert(std::move(z));
  }
  return {orbit.begin(), orbit.end()};
}

std::vector<std::vector<BigInt>> embed(const SectionBasis& sb, std::span<const std::int64_t> y) {
  std::vector<std::vector<BigInt>> out;
  for (const auto& mons : sb.monomials) {
    std::vector<BigInt> tuple;
    BigInt g = 0;
    for (const auto& d : mons) {
      tuple.push_back(monomial_value(d, y));
      g = gcd(g, abs(tuple.back()));
    }
    if (g == 0) throw Error(ErrorCode::InvalidArgument, "all sections vanish: not a torsor point");
    const auto first = std::find_if(tuple.begin(), tuple.end(), [](const BigInt& x) { return x != 0; });
    if (*first < 0) g = -g;
    for (auto& x : tuple) x /= g;
    out.push_back(std::move(tuple));
  }
  return out;
}

}  // namespace torix
