#pragma once

#include <vector>

#include "torix/picard.hpp"

namespace torix {

/// Ample basis L_1..L_t together with the exponent sets
/// M_k = { c in N^rays : class_of(c) = L_k }.
struct SectionBasis {
  std::vector<IntVec> basis;                   // Pic-basis coordinates of L_k
  std::vector<std::vector<IntVec>> monomials;  // M_k, lexicographically sorted
  IntMatrix to_ample;                          // Pic coords -> ample-basis coords

  std::size_t rank() const { return basis.size(); }
  std::size_t r(std::size_t k) const { return monomials[k].size(); }
  /// Coordinates w with cls = sum_k w_k L_k; integral since the L_k are a
  /// Z-basis.
  IntVec ample_coords(const IntVec& cls) const { return to_ample.apply(cls); }
};

/// Lattice points of the fiber polytope { c0 + beta*(x) >= 0 } for the lift
/// c0 = pd.lift_class(cls). Empty when cls is not effective.
std::vector<IntVec> monomial_basis(const PicardData& pd, const IntVec& cls);

/// Same, starting from a caller-chosen integer lift.
std::vector<IntVec> monomial_basis_from_lift(const PicardData& pd, const IntVec& c0);

SectionBasis build_section_basis(const PicardData& pd, std::vector<IntVec> basis);
SectionBasis build_section_basis(const PicardData& pd);

}  // namespace torix
