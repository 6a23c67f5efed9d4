#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "torix/types.hpp"

namespace torix {

/// Subset of ray indices, stored as a bitmask. Iteration order is ascending,
/// which makes the mask itself the canonical form.
class RaySet {
 public:
  static constexpr std::size_t kMaxRays = 64;

  RaySet() = default;
  explicit RaySet(std::uint64_t mask) : mask_(mask) {}
  RaySet(std::initializer_list<int> indices);
  static RaySet from_indices(const std::vector<int>& indices);

  std::uint64_t mask() const { return mask_; }
  bool empty() const { return mask_ == 0; }
  int size() const { return __builtin_popcountll(mask_); }
  bool contains(int i) const { return (mask_ >> i) & 1U; }
  bool subset_of(RaySet o) const { return (mask_ & ~o.mask_) == 0; }
  RaySet operator|(RaySet o) const { return RaySet(mask_ | o.mask_); }
  RaySet operator&(RaySet o) const { return RaySet(mask_ & o.mask_); }
  std::vector<int> indices() const;

  auto operator<=>(const RaySet&) const = default;

 private:
  std::uint64_t mask_ = 0;
};

std::string to_string(RaySet s);

struct Fan {
  std::string name;
  int dim = 0;
  std::vector<IntVec> rays;
  std::vector<RaySet> max_cones;

  int num_rays() const { return static_cast<int>(rays.size()); }
};

struct ValidationCheck {
  std::string name;
  bool pass = true;
  std::string witness;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_pass() const;
};

/// Fan document (JSON):
///   {"name": "P2", "dim": 2, "rays": [[1,0],[0,1],[-1,-1]],
///    "max_cones": [[0,1],[1,2],[2,0]]}
/// Structural problems raise ErrorCode::Parse; fan axioms are left to
/// validate_fan.
Fan parse_fan(std::string_view text);
std::string fan_to_json(const Fan& f);

ValidationReport validate_fan(const Fan& f);

/// Throws ErrorCode::Validation with the first failing witness.
void require_valid(const Fan& f);

/// All faces of all maximal cones, bucketed by dimension 0..n.
std::vector<std::vector<RaySet>> all_cones(const Fan& f);

std::vector<RaySet> primitive_collections(const Fan& f);
int min_collection_size(const Fan& f);

/// #X(F_q) = sum over cones of (q-1)^(n - dim).
BigInt count_points_mod_p(const Fan& f, const BigInt& q);

/// Names: P1 P2 P3 P1xP1 F1 F2 dP8 dP7 dP6.
Fan builtin_fan(std::string_view name);
std::vector<std::string> builtin_fan_names();

/// Stable 64-bit FNV-1a digest of the canonical fan document.
std::uint64_t fan_hash(const Fan& f);

}  // namespace torix
