#include "torix/picard.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "torix/linalg.hpp"

namespace torix {

IntVec PicardData::class_of(const IntVec& coeffs) const {
  if (static_cast<int>(coeffs.size()) != m)
    throw Error(ErrorCode::InvalidArgument,
                "divisor has " + std::to_string(coeffs.size()) + " coefficients, expected " +
                    std::to_string(m));
  return proj.apply(coeffs);
}

IntVec PicardData::lift_class(const IntVec& cls) const {
  if (static_cast<int>(cls.size()) != t)
    throw Error(ErrorCode::InvalidArgument, "class vector has wrong length");
  return lift.apply(cls);
}

std::vector<IntVec> wall_relations(const Fan& f) {
  const int n = f.dim;
  const int m = f.num_rays();
  std::vector<IntVec> out;
  for (std::size_t i = 0; i < f.max_cones.size(); ++i)
    for (std::size_t j = i + 1; j < f.max_cones.size(); ++j) {
      const RaySet common = f.max_cones[i] & f.max_cones[j];
      if (common.size() != n - 1) continue;
      const int rho = __builtin_ctzll(f.max_cones[i].mask() & ~common.mask());
      const int rho2 = __builtin_ctzll(f.max_cones[j].mask() & ~common.mask());
      // Solve u_rho2 = sum_{k in sigma_i} c_k u_k in the unimodular basis of
      // sigma_i, then r = e_rho2 - c.
      const auto idx = f.max_cones[i].indices();
      IntMatrix basis(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
      for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) basis(r, c) = f.rays[idx[c]][r];
      const IntVec coords = linalg::inverse_unimodular(basis).apply(f.rays[rho2]);
      IntVec rel(static_cast<std::size_t>(m), 0);
      rel[rho2] = 1;
      for (int c = 0; c < n; ++c) rel[idx[c]] -= coords[c];
      if (rel[rho] < 0)
        for (auto& x : rel) x = -x;
      const std::int64_t g = linalg::gcd(rel);
      for (auto& x : rel) x /= g;
      out.push_back(std::move(rel));
    }
  return out;
}

PicardData compute_picard(const Fan& f) {
  PicardData pd;
  pd.m = f.num_rays();
  pd.n = f.dim;
  pd.t = pd.m - pd.n;
  pd.beta_star = IntMatrix(static_cast<std::size_t>(pd.m), static_cast<std::size_t>(pd.n));
  for (int r = 0; r < pd.m; ++r)
    for (int c = 0; c < pd.n; ++c) pd.beta_star(r, c) = f.rays[r][c];

  const auto snf = linalg::smith_normal_form(pd.beta_star);
  if (static_cast<int>(snf.invariants.size()) != pd.n)
    throw Error(ErrorCode::Internal, "rays do not span N");
  for (auto d : snf.invariants)
    if (d != 1)
      throw Error(ErrorCode::Internal,
                  "Picard group has torsion (invariant factor " + std::to_string(d) + ")");

  pd.proj = IntMatrix(static_cast<std::size_t>(pd.t), static_cast<std::size_t>(pd.m));
  pd.lift = IntMatrix(static_cast<std::size_t>(pd.m), static_cast<std::size_t>(pd.t));
  for (int i = 0; i < pd.t; ++i)
    for (int c = 0; c < pd.m; ++c) {
      pd.proj(i, c) = snf.u(pd.n + i, c);
      pd.lift(c, i) = snf.u_inv(c, pd.n + i);
    }

  pd.anticanonical.assign(static_cast<std::size_t>(pd.t), 0);
  for (int r = 0; r < pd.m; ++r) {
    pd.ray_classes.push_back(pd.proj.col(static_cast<std::size_t>(r)));
    for (int i = 0; i < pd.t; ++i) pd.anticanonical[i] += pd.ray_classes.back()[i];
  }
  pd.wall_relations = wall_relations(f);
  return pd;
}

namespace {

IntVec wall_pairings(const PicardData& pd, const IntVec& cls) {
  const IntVec c = pd.lift_class(cls);
  IntVec out;
  for (const auto& r : pd.wall_relations) {
    std::int64_t s = 0;
    for (int i = 0; i < pd.m; ++i) s += c[i] * r[i];
    out.push_back(s);
  }
  return out;
}

}  // namespace

bool is_nef(const PicardData& pd, const IntVec& cls) {
  const IntVec p = wall_pairings(pd, cls);
  return std::all_of(p.begin(), p.end(), [](auto x) { return x >= 0; });
}

bool is_ample(const PicardData& pd, const IntVec& cls) {
  const IntVec p = wall_pairings(pd, cls);
  return std::all_of(p.begin(), p.end(), [](auto x) { return x > 0; });
}

std::vector<IntVec> ample_basis(const PicardData& pd, int norm_bound) {
  const int t = pd.t;
  if (norm_bound <= 0) norm_bound = 10 * t;
  std::vector<IntVec> family;
  if (t == 0) return family;

  for (int s = 1; s <= norm_bound; ++s) {
    // Lexicographic walk over [-s, s]^t keeping sup-norm exactly s.
    IntVec v(static_cast<std::size_t>(t), -s);
    for (;;) {
      const bool on_shell = std::any_of(v.begin(), v.end(), [&](auto x) { return std::llabs(x) == s; });
      if (on_shell && is_ample(pd, v)) {
        IntMatrix rows(family.size() + 1, static_cast<std::size_t>(t));
        for (std::size_t r = 0; r < family.size(); ++r)
          for (int c = 0; c < t; ++c) rows(r, c) = family[r][c];
        for (int c = 0; c < t; ++c) rows(family.size(), c) = v[c];
        if (linalg::rows_extend_to_basis(rows)) {
          family.push_back(v);
          if (static_cast<int>(family.size()) == t) return family;
        }
      }
      int pos = t - 1;
      while (pos >= 0 && v[pos] == s) {
        v[pos] = -s;
        --pos;
      }
      if (pos < 0) break;
      ++v[pos];
    }
  }
  throw Error(ErrorCode::Validation,
              "projectivity not certified: no ample basis with sup-norm <= " +
                  std::to_string(norm_bound));
}

Rational GrowthDirection::pair(const IntVec& cls) const {
  if (cls.size() != class_dual.size())
    throw Error(ErrorCode::InvalidArgument, "class vector has wrong length");
  Rational s = 0;
  for (std::size_t i = 0; i < cls.size(); ++i) s += class_dual[i] * cls[i];
  return s;
}

double GrowthDirection::pair_d(const IntVec& cls) const {
  return to_double(pair(cls));
}

Rational GrowthDirection::anticanonical_pairing() const {
  Rational s = 0;
  for (const auto& c : pairings) s += c;
  return s;
}

GrowthDirection validate_direction(const PicardData& pd, const std::vector<Rational>& pairings) {
  if (static_cast<int>(pairings.size()) != pd.m)
    throw Error(ErrorCode::InvalidArgument,
                "direction needs " + std::to_string(pd.m) + " pairings, got " +
                    std::to_string(pairings.size()));
  for (int r = 0; r < pd.m; ++r)
    if (pairings[r] <= 0)
      throw Error(ErrorCode::InvalidArgument,
                  "direction is not in the interior of the dual effective cone: <[D_" +
                      std::to_string(r) + "],u> = " + to_string(pairings[r]));
  for (int j = 0; j < pd.n; ++j) {
    Rational s = 0;
    for (int r = 0; r < pd.m; ++r) s += pairings[r] * pd.beta_star(r, j);
    if (s != 0)
      throw Error(ErrorCode::InvalidArgument,
                  "pairings do not factor through Pic(X): character e_" + std::to_string(j) +
                      " pairs to " + to_string(s));
  }
  GrowthDirection g;
  g.pairings = pairings;
  for (const auto& c : pairings) g.pairings_d.push_back(to_double(c));
  for (int i = 0; i < pd.t; ++i) {
    Rational s = 0;
    for (int r = 0; r < pd.m; ++r) s += pairings[r] * pd.lift(r, i);
    g.class_dual.push_back(s);
  }
  return g;
}

namespace {

// Base 10 only; the GMP string constructor would read "012" as octal.
BigInt parse_decimal_integer(std::string str) {
  bool neg = false;
  if (!str.empty() && (str.front() == '+' || str.front() == '-')) {
    neg = str.front() == '-';
    str.erase(0, 1);
  }
  if (str.empty() || !std::all_of(str.begin(), str.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw std::runtime_error("not an integer");
  const auto nz = str.find_first_not_of('0');
  str = nz == std::string::npos ? "0" : str.substr(nz);
  const BigInt v(str);
  return neg ? BigInt(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view s) {
  std::string str(s);
  while (!str.empty() && std::isspace(static_cast<unsigned char>(str.front()))) str.erase(0, 1);
  while (!str.empty() && std::isspace(static_cast<unsigned char>(str.back()))) str.pop_back();
  if (str.empty()) throw Error(ErrorCode::Parse, "empty rational");
  try {
    const auto slash = str.find('/');
    if (slash != std::string::npos) {
      const BigInt num = parse_decimal_integer(str.substr(0, slash));
      const BigInt den = parse_decimal_integer(str.substr(slash + 1));
      if (den == 0) throw Error(ErrorCode::Parse, "zero denominator in '" + str + "'");
      return Rational(num, den);
    }
    const auto dot = str.find('.');
    if (dot != std::string::npos) {
      std::string digits = str.substr(0, dot) + str.substr(dot + 1);
      const std::size_t frac = str.size() - dot - 1;
      if (digits.empty() || digits == "-" || digits == "+")
        throw Error(ErrorCode::Parse, "bad decimal '" + str + "'");
      BigInt den = 1;
      for (std::size_t i = 0; i < frac; ++i) den *= 10;
      return Rational(parse_decimal_integer(digits), den);
    }
    return Rational(parse_decimal_integer(str));
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const Error*>(&e)) throw;
    throw Error(ErrorCode::Parse, "bad rational '" + str + "'");
  }
}

std::vector<Rational> parse_rational_list(std::string_view s) {
  std::vector<Rational> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const auto piece = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
    out.push_back(parse_rational(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const Rational& r) {
  return r.convert_to<double>();
}

std::string to_string(const Rational& r) {
  return r.str();
}

}  // namespace torix
