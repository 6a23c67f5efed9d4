#include "torix/fan.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "torix/linalg.hpp"

namespace torix {

using json = nlohmann::json;

RaySet::RaySet(std::initializer_list<int> indices) {
  for (int i : indices) mask_ |= std::uint64_t{1} << i;
}

RaySet RaySet::from_indices(const std::vector<int>& indices) {
  std::uint64_t mask = 0;
  for (int i : indices) mask |= std::uint64_t{1} << i;
  return RaySet(mask);
}

std::vector<int> RaySet::indices() const {
  std::vector<int> out;
  for (std::uint64_t m = mask_; m != 0; m &= m - 1)
    out.push_back(__builtin_ctzll(m));
  return out;
}

std::string to_string(RaySet s) {
  std::string out = "{";
  bool first = true;
  for (int i : s.indices()) {
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidationCheck& c) { return c.pass; });
}

Fan parse_fan(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("fan document: ") + e.what());
  }
  Fan f;
  try {
    if (!doc.is_object()) throw Error(ErrorCode::Parse, "fan document must be an object");
    if (doc.contains("name") && !doc["name"].is_null())
      f.name = doc["name"].get<std::string>();
    f.dim = doc.at("dim").get<int>();
    if (f.dim <= 0) throw Error(ErrorCode::Parse, "dim must be positive");
    for (const auto& r : doc.at("rays")) {
      IntVec ray = r.get<IntVec>();
      if (static_cast<int>(ray.size()) != f.dim)
        throw Error(ErrorCode::Parse, "ray " + std::to_string(f.rays.size()) +
                                          " has length " + std::to_string(ray.size()) +
                                          ", expected " + std::to_string(f.dim));
      f.rays.push_back(std::move(ray));
    }
    if (f.rays.size() > RaySet::kMaxRays)
      throw Error(ErrorCode::Parse, "too many rays");
    for (const auto& c : doc.at("max_cones")) {
      std::vector<int> idx = c.get<std::vector<int>>();
      for (int i : idx)
        if (i < 0 || i >= f.num_rays())
          throw Error(ErrorCode::Parse, "ray index " + std::to_string(i) + " out of range");
      RaySet s = RaySet::from_indices(idx);
      if (s.size() != static_cast<int>(idx.size()))
        throw Error(ErrorCode::Parse, "repeated ray index in a cone");
      f.max_cones.push_back(s);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("fan document: ") + e.what());
  }
  return f;
}

std::string fan_to_json(const Fan& f) {
  json doc;
  doc["name"] = f.name;
  doc["dim"] = f.dim;
  doc["rays"] = f.rays;
  json cones = json::array();
  for (auto c : f.max_cones) cones.push_back(c.indices());
  doc["max_cones"] = cones;
  return doc.dump();
}

namespace {

IntMatrix cone_matrix(const Fan& f, RaySet cone) {
  // Columns are the cone's rays, ascending index.
  const auto idx = cone.indices();
  IntMatrix m(static_cast<std::size_t>(f.dim), idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j)
    for (int r = 0; r < f.dim; ++r) m(r, j) = f.rays[idx[j]][r];
  return m;
}

std::string vec_str(const IntVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

// Checks that |sigma| /\ |tau| is the cone over their common rays, by
// enumerating the extreme rays of the intersection cone.
bool intersection_is_common_face(const Fan& f, RaySet sigma, RaySet tau,
                                 IntVec* witness) {
  const std::size_t n = static_cast<std::size_t>(f.dim);
  const IntMatrix a = linalg::inverse_unimodular(cone_matrix(f, sigma));
  const IntMatrix b = linalg::inverse_unimodular(cone_matrix(f, tau));
  const auto sigma_idx = sigma.indices();

  IntMatrix stacked(2 * n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      stacked(r, c) = a(r, c);
      stacked(n + r, c) = b(r, c);
    }

  std::vector<int> choose(n - 1);
  std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t pos,
                                                          std::size_t start) {
    if (pos == n - 1) {
      IntMatrix sub(n - 1, n);
      for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t c = 0; c < n; ++c) sub(i, c) = stacked(choose[i], c);
      auto k = linalg::kernel_vector(sub);
      if (!k) return true;
      for (int sign : {1, -1}) {
        IntVec v = *k;
        for (auto& x : v) x *= sign;
        const IntVec la = a.apply(v);
        const IntVec lb = b.apply(v);
        const bool inside = std::all_of(la.begin(), la.end(), [](auto x) { return x >= 0; }) &&
                            std::all_of(lb.begin(), lb.end(), [](auto x) { return x >= 0; });
        if (!inside) continue;
        for (std::size_t i = 0; i < n; ++i)
          if (la[i] != 0 && !tau.contains(sigma_idx[i])) {
            if (witness) *witness = v;
            return false;
          }
      }
      return true;
    }
    for (std::size_t i = start; i < 2 * n; ++i) {
      choose[pos] = static_cast<int>(i);
      if (!rec(pos + 1, i + 1)) return false;
    }
    return true;
  };
  return rec(0, 0);
}

}  // namespace

ValidationReport validate_fan(const Fan& f) {
  ValidationReport rep;
  const int m = f.num_rays();
  const int n = f.dim;

  ValidationCheck prim{"primitive-rays", true, ""};
  for (int i = 0; i < m && prim.pass; ++i) {
    const std::int64_t g = linalg::gcd(f.rays[i]);
    if (g == 0) {
      prim = {"primitive-rays", false, "ray " + std::to_string(i) + " is zero"};
    } else if (g != 1) {
      prim = {"primitive-rays", false,
              "ray " + std::to_string(i) + " " + vec_str(f.rays[i]) + " has content " +
                  std::to_string(g)};
    }
    for (int j = 0; j < i && prim.pass; ++j)
      if (f.rays[i] == f.rays[j])
        prim = {"primitive-rays", false,
                "rays " + std::to_string(j) + " and " + std::to_string(i) + " coincide"};
  }
  rep.checks.push_back(prim);

  ValidationCheck smooth{"simplicial-smooth", true, ""};
  if (f.max_cones.empty()) smooth = {"simplicial-smooth", false, "no maximal cones"};
  for (std::size_t c = 0; c < f.max_cones.size() && smooth.pass; ++c) {
    const RaySet s = f.max_cones[c];
    if (s.size() != n) {
      smooth = {"simplicial-smooth", false,
                "cone " + to_string(s) + " has " + std::to_string(s.size()) +
                    " generators, expected " + std::to_string(n)};
      break;
    }
    const std::int64_t det = linalg::determinant(cone_matrix(f, s));
    if (det != 1 && det != -1)
      smooth = {"simplicial-smooth", false,
                "cone " + to_string(s) + " has determinant " + std::to_string(det)};
    for (std::size_t d = 0; d < c && smooth.pass; ++d)
      if (f.max_cones[d] == s)
        smooth = {"simplicial-smooth", false, "cone " + to_string(s) + " listed twice"};
  }
  rep.checks.push_back(smooth);

  ValidationCheck fanc{"fan-condition", true, ""};
  RaySet used;
  for (auto s : f.max_cones) used = used | s;
  for (int i = 0; i < m && fanc.pass; ++i)
    if (!used.contains(i))
      fanc = {"fan-condition", false, "ray " + std::to_string(i) + " lies in no maximal cone"};
  if (fanc.pass && smooth.pass && prim.pass) {
    for (std::size_t i = 0; i < f.max_cones.size() && fanc.pass; ++i)
      for (std::size_t j = i + 1; j < f.max_cones.size() && fanc.pass; ++j) {
        IntVec w;
        if (!intersection_is_common_face(f, f.max_cones[i], f.max_cones[j], &w))
          fanc = {"fan-condition", false,
                  "cones " + to_string(f.max_cones[i]) + " and " + to_string(f.max_cones[j]) +
                      " overlap beyond a common face, e.g. along " + vec_str(w)};
      }
  } else if (fanc.pass) {
    fanc = {"fan-condition", false, "not checked: rays or cones invalid"};
  }
  rep.checks.push_back(fanc);

  ValidationCheck comp{"complete", true, ""};
  if (!smooth.pass) {
    comp = {"complete", false, "not checked: cones are not smooth simplicial"};
  } else {
    std::map<std::uint64_t, std::vector<std::size_t>> facets;
    for (std::size_t c = 0; c < f.max_cones.size(); ++c)
      for (int i : f.max_cones[c].indices())
        facets[f.max_cones[c].mask() & ~(std::uint64_t{1} << i)].push_back(c);
    for (const auto& [facet, owners] : facets)
      if (owners.size() != 2) {
        comp = {"complete", false,
                "facet " + to_string(RaySet(facet)) + " lies in " +
                    std::to_string(owners.size()) + " maximal cone(s)"};
        break;
      }
    if (comp.pass) {
      // Connectivity of the adjacency graph.
      std::vector<std::size_t> parent(f.max_cones.size());
      for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
      std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
      };
      for (const auto& [facet, owners] : facets) parent[find(owners[0])] = find(owners[1]);
      for (std::size_t i = 1; i < parent.size(); ++i)
        if (find(i) != find(0)) {
          comp = {"complete", false,
                  "cone " + to_string(f.max_cones[i]) + " is not connected to " +
                      to_string(f.max_cones[0]) + " through shared facets"};
          break;
        }
    }
  }
  rep.checks.push_back(comp);
  return rep;
}

void require_valid(const Fan& f) {
  const ValidationReport rep = validate_fan(f);
  for (const auto& c : rep.checks)
    if (!c.pass) throw Error(ErrorCode::Validation, c.name + ": " + c.witness);
}

std::vector<std::vector<RaySet>> all_cones(const Fan& f) {
  std::set<std::uint64_t> seen;
  for (auto s : f.max_cones) {
    const std::uint64_t full = s.mask();
    for (std::uint64_t sub = full;; sub = (sub - 1) & full) {
      seen.insert(sub);
      if (sub == 0) break;
    }
  }
  std::vector<std::vector<RaySet>> out(static_cast<std::size_t>(f.dim) + 1);
  for (auto mask : seen) {
    const RaySet s(mask);
    if (s.size() <= f.dim) out[static_cast<std::size_t>(s.size())].push_back(s);
  }
  return out;
}

std::vector<RaySet> primitive_collections(const Fan& f) {
  const int m = f.num_rays();
  auto in_cone = [&](std::uint64_t mask) {
    return std::any_of(f.max_cones.begin(), f.max_cones.end(),
                       [&](RaySet s) { return (mask & ~s.mask()) == 0; });
  };
  // A primitive collection of a complete simplicial fan has at most n+1
  // elements; a larger set always has a non-cone proper subset.
  std::vector<RaySet> out;
  const int max_size = std::min(m, f.dim + 1);
  for (int k = 1; k <= max_size; ++k) {
    std::uint64_t mask = (std::uint64_t{1} << k) - 1;
    const std::uint64_t limit = m == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m);
    while (mask < limit) {
      if (!in_cone(mask)) {
        bool minimal = true;
        for (std::uint64_t b = mask; b != 0 && minimal; b &= b - 1)
          if (!in_cone(mask & ~(b & -b))) minimal = false;
        if (minimal) out.emplace_back(mask);
      }
      // Gosper's hack: next mask with the same popcount.
      const std::uint64_t c = mask & -mask;
      const std::uint64_t r = mask + c;
      if (r == 0) break;
      mask = (((r ^ mask) >> 2) / c) | r;
    }
  }
  std::sort(out.begin(), out.end(), [](RaySet a, RaySet b) {
    return a.indices() < b.indices();
  });
  return out;
}

int min_collection_size(const Fan& f) {
  const auto pcs = primitive_collections(f);
  if (pcs.empty())
    throw Error(ErrorCode::InvalidArgument, "fan has no primitive collection");
  int best = RaySet::kMaxRays;
  for (auto c : pcs) best = std::min(best, c.size());
  return best;
}

BigInt count_points_mod_p(const Fan& f, const BigInt& q) {
  if (q < 2) throw Error(ErrorCode::InvalidArgument, "field size must be at least 2");
  const auto cones = all_cones(f);
  BigInt total = 0;
  for (std::size_t k = 0; k < cones.size(); ++k) {
    BigInt term = 1;
    for (std::size_t e = k; e < static_cast<std::size_t>(f.dim); ++e) term *= (q - 1);
    total += term * static_cast<long>(cones[k].size());
  }
  return total;
}

namespace {

Fan polygon_fan(std::string name, std::vector<IntVec> rays) {
  Fan f;
  f.name = std::move(name);
  f.dim = 2;
  f.rays = std::move(rays);
  const int m = f.num_rays();
  for (int i = 0; i < m; ++i) f.max_cones.push_back(RaySet{i, (i + 1) % m});
  return f;
}

}  // namespace

Fan builtin_fan(std::string_view name) {
  if (name == "P1") {
    Fan f;
    f.name = "P1";
    f.dim = 1;
    f.rays = {{1}, {-1}};
    f.max_cones = {RaySet{0}, RaySet{1}};
    return f;
  }
  if (name == "P2") return polygon_fan("P2", {{1, 0}, {0, 1}, {-1, -1}});
  if (name == "P3") {
    Fan f;
    f.name = "P3";
    f.dim = 3;
    f.rays = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, -1, -1}};
    f.max_cones = {RaySet{0, 1, 2}, RaySet{0, 1, 3}, RaySet{0, 2, 3}, RaySet{1, 2, 3}};
    return f;
  }
  if (name == "P1xP1") {
    Fan f;
    f.name = "P1xP1";
    f.dim = 2;
    f.rays = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    f.max_cones = {RaySet{0, 2}, RaySet{2, 1}, RaySet{1, 3}, RaySet{3, 0}};
    return f;
  }
  if (name == "F1" || name == "dP8") {
    Fan f = polygon_fan(std::string(name), {{1, 0}, {0, 1}, {-1, 1}, {0, -1}});
    return f;
  }
  if (name == "F2") return polygon_fan("F2", {{1, 0}, {0, 1}, {-1, 2}, {0, -1}});
  if (name == "dP7")
    return polygon_fan("dP7", {{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}});
  if (name == "dP6")
    return polygon_fan("dP6", {{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}});
  throw Error(ErrorCode::InvalidArgument, "unknown built-in fan '" + std::string(name) + "'");
}

std::vector<std::string> builtin_fan_names() {
  return {"P1", "P2", "P3", "P1xP1", "F1", "F2", "dP8", "dP7", "dP6"};
}

std::uint64_t fan_hash(const Fan& f) {
  std::ostringstream os;
  os << f.dim << ';';
  for (const auto& r : f.rays) {
    for (auto x : r) os << x << ',';
    os << ';';
  }
  for (auto c : f.max_cones) os << c.mask() << ',';
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace torix
