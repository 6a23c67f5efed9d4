#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "torix/region.hpp"
#include "torix/variety.hpp"

namespace torix {

/// u together with B. `shift[k]` = log(B) * <L_k, u>, the translation taking
/// D_1 to D_B in ample-dual coordinates.
struct GrowthSpec {
  GrowthDirection direction;
  double B = 1.0;
  std::optional<BigInt> B_integer;  // set when B is an integer (exact mode)
  std::vector<double> shift;
  std::vector<Rational> u_ample;  // <L_k, u>
};

/// B >= 1; B = 1 is the unshifted window.
GrowthSpec make_growth(const Variety& v, const GrowthDirection& dir, double B);

/// gcd(y_rho : rho in C) = 1 for every primitive collection C.
bool is_integral_torsor_point(const Variety& v, std::span<const std::int64_t> y);
bool is_integral_torsor_point(const Fan& f, const std::vector<RaySet>& collections,
                              std::span<const std::int64_t> y);

/// gcd over M_k of |y^D| equals 1 for every k.
bool is_torsor_point_via_sections(const SectionBasis& sb, std::span<const std::int64_t> y);

struct MultiHeight {
  std::vector<double> h;                  // h_k = log max_{D in M_k} |y^D|
  std::vector<std::size_t> witness_index;  // maximizing monomial per k
  std::vector<BigInt> witness_value;
};

MultiHeight multi_height(const SectionBasis& sb, std::span<const std::int64_t> y);
std::vector<double> multi_height_real(const SectionBasis& sb, std::span<const double> y);

struct HeightOptions {
  double tol = 1e-9;
  bool exact_boundary = false;
};

bool in_region(const Variety& v, const MultiHeight& h, const CompiledRegion& region,
               const GrowthSpec* gs, const HeightOptions& opts = {});

/// Bounds b_rho with |y_rho| <= b_rho for every integral torsor point whose
/// height lies in D_B: the smaller of the ample-class bound
/// min_A exp(sup_D1 a(A)) B^<A,u> and the per-ray bound
/// exp(sup_D1 <[D_rho], a>) B^<[D_rho],u>.
std::vector<double> coordinate_bounds(const Variety& v, const CompiledRegion& region,
                                      const GrowthSpec* gs);

/// Per-ray bound only; valid for real torsor points as well.
std::vector<double> real_coordinate_bounds(const Variety& v, const CompiledRegion& region,
                                           const GrowthSpec* gs);

struct CountReport {
  BigInt torsor_count;
  BigInt torus_count;
  BigInt boundary_count;
  BigInt rational_count;
  std::uint64_t nodes = 0;
  double box_volume = 0.0;
  std::vector<double> bounds;
};

struct EnumOptions {
  HeightOptions height;
  unsigned threads = 1;
  std::uint64_t node_budget = 50'000'000'000ULL;
  double bound_scale = 1.0;  // > 1 widens the search box (soundness checks)
};

CountReport enumerate_points(const Variety& v, const CompiledRegion& region,
                             const GrowthSpec* gs, const EnumOptions& opts = {});

/// Visits every signed integral torsor point with height in D_B, one thread.
void for_each_point(const Variety& v, const CompiledRegion& region, const GrowthSpec* gs,
                    const std::function<void(std::span<const std::int64_t>)>& visit,
                    const EnumOptions& opts = {});

/// N_d(B): points of d.Z^rays with every coordinate nonzero and height in D_B.
BigInt count_sublattice(const Variety& v, std::span<const std::int64_t> d,
                        const CompiledRegion& region, const GrowthSpec* gs,
                        const EnumOptions& opts = {});

/// Orbit of y under T_NS(Z) = {+-1}^t: s flips coordinate rho when
/// sum_{i : s_i = -1} [D_rho]_i is odd. Sorted, duplicates removed.
std::vector<IntVec> unit_orbit(const PicardData& pd, std::span<const std::int64_t> y);

/// For each k the tuple (y^D)_{D in M_k}, divided by its gcd and signed so
/// the first nonzero entry is positive.
std::vector<std::vector<BigInt>> embed(const SectionBasis& sb, std::span<const std::int64_t> y);

double log_abs(const BigInt& x);

}  // namespace torix
