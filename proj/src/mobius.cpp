#include "torix/mobius.hpp"

#include <algorithm>
#include <map>

namespace torix {

int MobiusLocalTable::at(RaySet a) const {
  for (const auto& [s, v] : entries)
    if (s == a) return v;
  return 0;
}

std::vector<BigInt> MobiusLocalTable::density_coefficients(int m) const {
  std::vector<BigInt> c(static_cast<std::size_t>(m) + 1, 0);
  for (const auto& [s, v] : entries) c[s.size()] += v;
  return c;
}

std::string MobiusLocalTable::density_polynomial(int m) const {
  const auto c = density_coefficients(m);
  std::string out;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0) continue;
    const BigInt mag = abs(c[j]);
    if (out.empty())
      out += c[j] < 0 ? "-" : "";
    else
      out += c[j] < 0 ? " - " : " + ";
    if (j == 0) {
      out += mag.str();
    } else {
      out += mag.str() + "/p";
      if (j > 1) out += "^" + std::to_string(j);
    }
  }
  return out.empty() ? "0" : out;
}

MobiusLocalTable mobius_table(const std::vector<RaySet>& collections) {
  if (collections.size() > 20)
    throw Error(ErrorCode::Budget, "more than 20 primitive collections (" +
                                       std::to_string(collections.size()) + ")");
  std::map<std::uint64_t, int> acc;
  const std::uint64_t families = std::uint64_t{1} << collections.size();
  for (std::uint64_t fam = 0; fam < families; ++fam) {
    std::uint64_t u = 0;
    for (std::size_t i = 0; i < collections.size(); ++i)
      if ((fam >> i) & 1U) u |= collections[i].mask();
    acc[u] += (__builtin_popcountll(fam) % 2 == 0) ? 1 : -1;
  }
  MobiusLocalTable t;
  for (const auto& [mask, v] : acc)
    if (v != 0) t.entries.emplace_back(RaySet(mask), v);
  std::sort(t.entries.begin(), t.entries.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first.mask() < b.first.mask();
  });
  return t;
}

MobiusLocalTable mobius_table(const Fan& f) { return mobius_table(primitive_collections(f)); }

int mobius_local(const Fan& f, RaySet a) { return mobius_table(f).at(a); }

bool is_prime(std::int64_t p) {
  if (p < 2) return false;
  for (std::int64_t q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

int mobius_value(const MobiusLocalTable& table, const std::vector<std::int64_t>& d) {
  for (auto x : d)
    if (x <= 0) throw Error(ErrorCode::InvalidArgument, "d must have positive entries");
  std::vector<std::int64_t> rest(d);
  int value = 1;
  // Primes are peeled off in increasing order; after trial division up to
  // sqrt, whatever is left in each coordinate is 1 or a prime.
  for (;;) {
    std::int64_t p = 0;
    for (auto x : rest) {
      if (x == 1) continue;
      std::int64_t q = 2;
      while (q * q <= x && x % q != 0) ++q;
      const std::int64_t smallest = (q * q <= x) ? q : x;
      if (p == 0 || smallest < p) p = smallest;
    }
    if (p == 0) return value;
    std::uint64_t mask = 0;
    for (std::size_t r = 0; r < rest.size(); ++r)
      if (rest[r] % p == 0) {
        rest[r] /= p;
        if (rest[r] % p == 0) return 0;
        mask |= std::uint64_t{1} << r;
      }
    value *= table.at(RaySet(mask));
    if (value == 0) return 0;
  }
}

int mobius_value(const Fan& f, const std::vector<std::int64_t>& d) {
  if (static_cast<int>(d.size()) != f.num_rays())
    throw Error(ErrorCode::InvalidArgument, "d has wrong number of coordinates");
  return mobius_value(mobius_table(f), d);
}

Rational local_density(const Fan& f, const MobiusLocalTable& table, const BigInt& p) {
  if (p > 1'000'000'000'000LL || !is_prime(p.convert_to<std::int64_t>()))
    throw Error(ErrorCode::InvalidArgument, "local_density needs a prime below 10^12");
  const int m = f.num_rays();
  const int n = f.dim;
  const auto c = table.density_coefficients(m);
  BigInt num = 0;
  for (int j = 0; j <= m; ++j) num = num * p + c[j];
  const Rational sum(num, pow(p, static_cast<unsigned>(m)));

  const int t = m - n;
  const Rational check = Rational(pow(p - 1, static_cast<unsigned>(t)) * count_points_mod_p(f, p),
                                  pow(p, static_cast<unsigned>(t + n)));
  if (sum != check)
    throw Error(ErrorCode::Internal, "local density identity fails at p = " + p.str() + ": " +
                                         sum.str() + " != " + check.str());
  return sum;
}

Rational local_density(const Fan& f, const BigInt& p) {
  return local_density(f, mobius_table(f), p);
}

}  // namespace torix
