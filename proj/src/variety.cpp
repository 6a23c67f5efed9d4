#include "torix/variety.hpp"

#include <map>
#include <string>

namespace torix {

Variety make_variety(Fan fan, int ample_norm_bound) {
  require_valid(fan);
  Variety v;
  v.pic = compute_picard(fan);
  v.sections = build_section_basis(v.pic, ample_basis(v.pic, ample_norm_bound));
  v.primitive_collections = primitive_collections(fan);
  v.f = min_collection_size(fan);
  for (const auto& cls : v.pic.ray_classes) v.ray_ample.push_back(v.sections.ample_coords(cls));
  v.anticanonical_ample = v.sections.ample_coords(v.pic.anticanonical);
  v.fan = std::move(fan);
  return v;
}

std::optional<std::vector<Rational>> default_pairings(const Variety& v) {
  static const std::map<std::string, std::vector<int>> registered = {
      {"P1", {1, 1}},       {"P2", {1, 1, 1}},          {"P3", {1, 1, 1, 1}},
      {"P1xP1", {1, 1, 1, 1}}, {"F1", {1, 1, 1, 2}},    {"dP8", {1, 1, 1, 2}},
      {"F2", {1, 1, 1, 3}}, {"dP7", {2, 1, 1, 1, 2}},   {"dP6", {1, 1, 1, 1, 1, 1}},
  };
  std::vector<Rational> cand;
  const auto it = registered.find(v.fan.name);
  if (it != registered.end() && static_cast<int>(it->second.size()) == v.m() &&
      fan_hash(v.fan) == fan_hash(builtin_fan(v.fan.name))) {
    for (int x : it->second) cand.emplace_back(x);
  } else {
    cand.assign(static_cast<std::size_t>(v.m()), Rational(1));
  }
  try {
    validate_direction(v.pic, cand);
  } catch (const Error&) {
    return std::nullopt;
  }
  return cand;
}

}  // namespace torix
