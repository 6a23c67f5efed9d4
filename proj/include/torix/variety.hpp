#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "torix/fan.hpp"
#include "torix/picard.hpp"
#include "torix/sections.hpp"

namespace torix {

/// Everything derived from a validated fan. Immutable once built.
struct Variety {
  Fan fan;
  PicardData pic;
  SectionBasis sections;
  std::vector<RaySet> primitive_collections;
  int f = 0;  // smallest primitive collection

  std::vector<IntVec> ray_ample;  // [D_rho] in ample-basis coordinates
  IntVec anticanonical_ample;

  int m() const { return pic.m; }
  int n() const { return pic.n; }
  int t() const { return pic.t; }
};

/// Validates the fan (ErrorCode::Validation on failure) and derives the
/// Picard data, ample basis and section basis.
Variety make_variety(Fan fan, int ample_norm_bound = 0);

/// Registered direction for built-in fans: the pairings with every ray class
/// that make each generator of the effective cone pair to 1. For other fans,
/// all ones when that is a valid direction.
std::optional<std::vector<Rational>> default_pairings(const Variety& v);

}  // namespace torix
