#include "torix/region.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <json.hpp>

#include "torix/linalg.hpp"

namespace torix {

using json = nlohmann::json;

Bound Bound::log_of(const Rational& r) {
  if (r <= 0) throw Error(ErrorCode::Parse, "log bound needs a positive argument");
  return {std::log(to_double(r)), true, r};
}

Bound parse_bound(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s == "inf" || s == "+inf" || s == "-inf") return Bound::infinite();
  if (s.rfind("log(", 0) == 0 && s.back() == ')')
    return Bound::log_of(parse_rational(s.substr(4, s.size() - 5)));
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return Bound::of(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse, "bad bound '" + raw + "'");
  }
}

namespace {

Bound bound_from_json(const json& j, bool is_min) {
  if (j.is_null()) return Bound::infinite();
  if (j.is_number()) return Bound::of(j.get<double>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const Bound b = parse_bound(s);
    if (!b.finite && ((is_min && s.find('+') != std::string::npos) ||
                      (!is_min && s.find('-') != std::string::npos)))
      throw Error(ErrorCode::Parse, "bound '" + s + "' makes the constraint empty");
    return b;
  }
  throw Error(ErrorCode::Parse, "bound must be a number, string or null");
}

json bound_to_json(const Bound& b, bool is_min) {
  if (!b.finite) return is_min ? "-inf" : "inf";
  if (b.exp_value) return "log(" + to_string(*b.exp_value) + ")";
  return b.value;
}

}  // namespace

Region parse_region(std::string_view text, int num_rays) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("region document: ") + e.what());
  }
  Region r;
  try {
    for (const auto& p : doc.at("polyhedra")) {
      Polyhedron poly;
      for (const auto& c : p.at("constraints")) {
        Constraint con;
        con.divisor = c.at("divisor").get<IntVec>();
        if (static_cast<int>(con.divisor.size()) != num_rays)
          throw Error(ErrorCode::Parse, "constraint divisor has " +
                                            std::to_string(con.divisor.size()) +
                                            " entries, expected " + std::to_string(num_rays));
        con.min = c.contains("min") ? bound_from_json(c["min"], true) : Bound::infinite();
        con.max = c.contains("max") ? bound_from_json(c["max"], false) : Bound::infinite();
        con.min_inclusive = c.value("min_inclusive", true);
        con.max_inclusive = c.value("max_inclusive", false);
        poly.constraints.push_back(std::move(con));
      }
      r.polyhedra.push_back(std::move(poly));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("region document: ") + e.what());
  }
  if (r.polyhedra.empty()) throw Error(ErrorCode::Parse, "region has no polyhedra");
  return r;
}

std::string region_to_json(const Region& r) {
  json polys = json::array();
  for (const auto& p : r.polyhedra) {
    json cons = json::array();
    for (const auto& c : p.constraints)
      cons.push_back({{"divisor", c.divisor},
                      {"min", bound_to_json(c.min, true)},
                      {"max", bound_to_json(c.max, false)},
                      {"min_inclusive", c.min_inclusive},
                      {"max_inclusive", c.max_inclusive}});
    polys.push_back({{"constraints", cons}});
  }
  return json{{"polyhedra", polys}}.dump();
}

Region unit_box_region(const Variety& v, const Rational& upper) {
  Polyhedron p;
  for (std::size_t k = 0; k < v.sections.rank(); ++k) {
    Constraint c;
    c.divisor = v.sections.monomials[k].front();
    c.min = Bound::log_of(Rational(1));
    c.max = Bound::log_of(upper);
    p.constraints.push_back(c);
  }
  return Region{{p}};
}

namespace lp {

std::vector<std::vector<double>> vertices(const std::vector<std::vector<double>>& rows,
                                          const std::vector<double>& rhs, int dim) {
  std::vector<std::vector<double>> out;
  const int k = static_cast<int>(rows.size());
  if (k < dim) return out;
  std::vector<int> pick(static_cast<std::size_t>(dim));
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == dim) {
      std::vector<std::vector<double>> a;
      std::vector<double> b;
      for (int i : pick) {
        a.push_back(rows[i]);
        b.push_back(rhs[i]);
      }
      auto x = linalg::solve(a, b);
      if (!x) return;
      for (int i = 0; i < k; ++i) {
        double s = 0.0, scale = std::fabs(rhs[i]);
        for (int c = 0; c < dim; ++c) {
          s += rows[i][c] * (*x)[c];
          scale = std::max(scale, std::fabs(rows[i][c] * (*x)[c]));
        }
        if (s > rhs[i] + 1e-9 * std::max(1.0, scale)) return;
      }
      for (const auto& v : out) {
        double d = 0.0;
        for (int c = 0; c < dim; ++c) d = std::max(d, std::fabs(v[c] - (*x)[c]));
        if (d < 1e-9) return;
      }
      out.push_back(*x);
      return;
    }
    for (int i = start; i < k; ++i) {
      pick[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
  return out;
}

bool recession_cone_trivial(const std::vector<std::vector<double>>& rows, int dim) {
  std::vector<std::vector<double>> a = rows;
  std::vector<double> b(rows.size(), 0.0);
  for (int c = 0; c < dim; ++c) {
    std::vector<double> e(static_cast<std::size_t>(dim), 0.0);
    e[c] = 1.0;
    a.push_back(e);
    b.push_back(1.0);
    e[c] = -1.0;
    a.push_back(e);
    b.push_back(1.0);
  }
  for (const auto& v : vertices(a, b, dim))
    for (double x : v)
      if (std::fabs(x) > 1e-9) return false;
  return true;
}

}  // namespace lp

CompiledRegion compile_region(const Variety& v, const Region& r) {
  CompiledRegion out;
  out.t = v.t();
  const int t = v.t();
  for (std::size_t pi = 0; pi < r.polyhedra.size(); ++pi) {
    const auto& poly = r.polyhedra[pi];
    CompiledPolyhedron cp;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (const auto& c : poly.constraints) {
      CompiledConstraint cc;
      cc.weights = v.sections.ample_coords(v.pic.class_of(c.divisor));
      cc.min = c.min;
      cc.max = c.max;
      cc.min_inclusive = c.min_inclusive;
      cc.max_inclusive = c.max_inclusive;
      std::vector<double> w(cc.weights.begin(), cc.weights.end());
      if (cc.max.finite) {
        rows.push_back(w);
        rhs.push_back(cc.max.value);
      }
      if (cc.min.finite) {
        std::vector<double> neg(w);
        for (auto& x : neg) x = -x;
        rows.push_back(neg);
        rhs.push_back(-cc.min.value);
      }
      cp.constraints.push_back(std::move(cc));
    }
    if (!lp::recession_cone_trivial(rows, t))
      throw Error(ErrorCode::InvalidArgument,
                  "region polyhedron " + std::to_string(pi) + " is unbounded in Pic^v");
    cp.vertices = lp::vertices(rows, rhs, t);
    cp.box_lo.assign(static_cast<std::size_t>(t), std::numeric_limits<double>::infinity());
    cp.box_hi.assign(static_cast<std::size_t>(t), -std::numeric_limits<double>::infinity());
    for (const auto& vx : cp.vertices)
      for (int k = 0; k < t; ++k) {
        cp.box_lo[k] = std::min(cp.box_lo[k], vx[k]);
        cp.box_hi[k] = std::max(cp.box_hi[k], vx[k]);
      }
    out.polyhedra.push_back(std::move(cp));
  }
  return out;
}

double CompiledRegion::sup(std::span<const double> f) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : polyhedra)
    for (const auto& vx : p.vertices) {
      double s = 0.0;
      for (int k = 0; k < t; ++k) s += f[k] * vx[k];
      best = std::max(best, s);
    }
  return best;
}

double CompiledRegion::inf(std::span<const double> f) const {
  std::vector<double> neg(f.begin(), f.end());
  for (auto& x : neg) x = -x;
  return -sup(neg);
}

std::vector<double> CompiledRegion::box_lo() const {
  std::vector<double> lo(static_cast<std::size_t>(t), std::numeric_limits<double>::infinity());
  for (const auto& p : polyhedra)
    for (int k = 0; k < t; ++k) lo[k] = std::min(lo[k], p.box_lo[k]);
  return lo;
}

std::vector<double> CompiledRegion::box_hi() const {
  std::vector<double> hi(static_cast<std::size_t>(t), -std::numeric_limits<double>::infinity());
  for (const auto& p : polyhedra)
    for (int k = 0; k < t; ++k) hi[k] = std::max(hi[k], p.box_hi[k]);
  return hi;
}

namespace {

// -1: below the bound, 0: on it (within tol), +1: above.
int compare(double value, double bound, double tol) {
  if (value < bound - tol) return -1;
  if (value > bound + tol) return 1;
  return 0;
}

}  // namespace

bool region_contains(const CompiledRegion& r, std::span<const double> a, double tol,
                     const TieBreaker* tie) {
  for (const auto& p : r.polyhedra) {
    if (p.empty()) continue;
    bool inside = true;
    for (const auto& c : p.constraints) {
      double value = 0.0;
      for (int k = 0; k < r.t; ++k) value += static_cast<double>(c.weights[k]) * a[k];
      if (c.min.finite) {
        int cmp = compare(value, c.min.value, tol);
        if (cmp == 0 && tie && *tie) cmp = (*tie)(c, false).value_or(0);
        if (cmp < 0 || (cmp == 0 && !c.min_inclusive)) {
          inside = false;
          break;
        }
      }
      if (c.max.finite) {
        int cmp = compare(value, c.max.value, tol);
        if (cmp == 0 && tie && *tie) cmp = (*tie)(c, true).value_or(0);
        if (cmp > 0 || (cmp == 0 && !c.max_inclusive)) {
          inside = false;
          break;
        }
      }
    }
    if (inside) return true;
  }
  return false;
}

}  // namespace torix
