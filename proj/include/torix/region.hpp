#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "torix/variety.hpp"

namespace torix {

/// One side of a window constraint. `exp_value` is set when the bound was
/// written as "log(p/q)", which enables exact boundary resolution.
struct Bound {
  double value = 0.0;
  bool finite = false;
  std::optional<Rational> exp_value;

  static Bound infinite() { return {}; }
  static Bound of(double v) { return {v, true, std::nullopt}; }
  static Bound log_of(const Rational& r);
};

/// alpha <= a([D]) <= beta for the class of `divisor`.
struct Constraint {
  IntVec divisor;
  Bound min;
  Bound max;
  bool min_inclusive = true;
  bool max_inclusive = false;
};

struct Polyhedron {
  std::vector<Constraint> constraints;
};

/// Finite union of polyhedra in Pic(X)^v_R.
struct Region {
  std::vector<Polyhedron> polyhedra;
};

/// Region document:
///   {"polyhedra": [{"constraints": [
///       {"divisor": [1,0], "min": 0, "max": "log(2)",
///        "min_inclusive": true, "max_inclusive": false}]}]}
/// min/max: number, "log(p/q)", "-inf"/"inf" or null (unbounded).
Region parse_region(std::string_view text, int num_rays);
std::string region_to_json(const Region& r);
Bound parse_bound(const std::string& s);

/// Box [0, log(upper)) on every ample basis class, using its first monomial as
/// the representing divisor.
Region unit_box_region(const Variety& v, const Rational& upper = Rational(2));

struct CompiledConstraint {
  IntVec weights;  // ample-basis coordinates of [D]
  Bound min;
  Bound max;
  bool min_inclusive = true;
  bool max_inclusive = false;
};

struct CompiledPolyhedron {
  std::vector<CompiledConstraint> constraints;
  std::vector<std::vector<double>> vertices;  // in ample-dual coordinates a_k
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  bool empty() const { return vertices.empty(); }
};

/// Region with every constraint expressed in the coordinates a_k = a(L_k) of
/// Pic^v_R. Construction rejects unbounded polyhedra.
struct CompiledRegion {
  int t = 0;
  std::vector<CompiledPolyhedron> polyhedra;

  /// sup over the region of sum_k f_k a_k; -inf if every polyhedron is empty.
  double sup(std::span<const double> f) const;
  double inf(std::span<const double> f) const;
  /// Per-coordinate bounding box of the union.
  std::vector<double> box_lo() const;
  std::vector<double> box_hi() const;
};

CompiledRegion compile_region(const Variety& v, const Region& r);

/// Exact comparison hook: returns sign(value - bound) for a constraint whose
/// floating value landed within tolerance of the bound, or nullopt if no
/// exact data is available.
using TieBreaker =
    std::function<std::optional<int>(const CompiledConstraint&, bool upper)>;

/// Does a (ample-dual coordinates, already shifted) satisfy some polyhedron?
/// Values within `tol` of a bound count as on the bound; on-bound points are
/// in iff the bound is inclusive, unless `tie` decides exactly.
bool region_contains(const CompiledRegion& r, std::span<const double> a, double tol,
                     const TieBreaker* tie = nullptr);

namespace lp {

/// Vertices of { x in R^d : rows[i] . x <= rhs[i] }, assumed bounded.
std::vector<std::vector<double>> vertices(const std::vector<std::vector<double>>& rows,
                                          const std::vector<double>& rhs, int dim);

/// True iff { x : rows[i] . x <= 0 } is {0}.
bool recession_cone_trivial(const std::vector<std::vector<double>>& rows, int dim);

}  // namespace lp

}  // namespace torix
