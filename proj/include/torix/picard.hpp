#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "torix/fan.hpp"
#include "torix/types.hpp"

namespace torix {

/// Integer realization of 0 -> M -> Z^rays -> Pic(X) -> 0.
///
/// The Pic basis is the one produced by the Smith normal form of beta_star
/// (see linalg::smith_normal_form for the pivot rule): proj is the last t rows
/// of U, and `lift` holds the matching columns of U^{-1}, so proj * lift = I.
struct PicardData {
  int m = 0;
  int n = 0;
  int t = 0;
  IntMatrix beta_star;  // m x n, row rho = u_rho
  IntMatrix proj;       // t x m
  IntMatrix lift;       // m x t, column i is a divisor of class e_i
  std::vector<IntVec> ray_classes;
  IntVec anticanonical;
  std::vector<IntVec> wall_relations;

  IntVec class_of(const IntVec& coeffs) const;
  /// Some divisor (integer coefficients) with the given class.
  IntVec lift_class(const IntVec& cls) const;
};

PicardData compute_picard(const Fan& f);

/// One relation per wall (pair of maximal cones sharing a facet): the
/// primitive r supported on the two cones with sum r_rho u_rho = 0 and
/// positive entries on the two rays off the wall.
std::vector<IntVec> wall_relations(const Fan& f);

bool is_nef(const PicardData& pd, const IntVec& cls);
bool is_ample(const PicardData& pd, const IntVec& cls);

/// Greedy ample Z-basis: classes by increasing sup-norm, then lexicographic,
/// keeping each ample class that extends the family to a saturated sublattice.
/// `norm_bound` <= 0 selects the default 10 * t.
std::vector<IntVec> ample_basis(const PicardData& pd, int norm_bound = 0);

/// Growth direction u given by its pairings with the ray classes.
struct GrowthDirection {
  std::vector<Rational> pairings;
  std::vector<double> pairings_d;
  std::vector<Rational> class_dual;  // <e_i, u> on the Pic basis

  Rational pair(const IntVec& cls) const;
  double pair_d(const IntVec& cls) const;
  Rational anticanonical_pairing() const;
};

GrowthDirection validate_direction(const PicardData& pd, const std::vector<Rational>& pairings);

/// Accepts "3", "-2/7", "0.125".
Rational parse_rational(std::string_view s);
std::vector<Rational> parse_rational_list(std::string_view s);
double to_double(const Rational& r);
std::string to_string(const Rational& r);

}  // namespace torix
