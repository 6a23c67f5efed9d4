#include "torix/torix.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "torix/constant.hpp"
#include "torix/mobius.hpp"

struct torix_variety {
  torix::Variety v;
};

struct torix_region {
  torix::Region region;
  torix::CompiledRegion compiled;
};

namespace {

using json = nlohmann::json;
using namespace torix;

thread_local std::string g_last_error;

torix_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return TORIX_E_INVALID_ARGUMENT;
    case ErrorCode::Parse: return TORIX_E_PARSE;
    case ErrorCode::Validation: return TORIX_E_VALIDATION;
    case ErrorCode::Budget: return TORIX_E_BUDGET;
    case ErrorCode::Tolerance: return TORIX_E_TOLERANCE;
    case ErrorCode::Internal: return TORIX_E_INTERNAL;
  }
  return TORIX_E_INTERNAL;
}

template <class F>
torix_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return TORIX_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TORIX_E_BUDGET;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TORIX_E_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Fan load_fan(const std::string& source) {
  if (source.rfind("builtin:", 0) == 0) return builtin_fan(source.substr(8));
  const auto first = source.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && source[first] == '{') return parse_fan(source);
  return parse_fan(read_file(source));
}

GrowthDirection direction_for(const Variety& v, const torix_options& o) {
  std::vector<Rational> pairs;
  if (o.pairings && *o.pairings) {
    pairs = parse_rational_list(o.pairings);
    if (static_cast<int>(pairs.size()) != v.m())
      throw Error(ErrorCode::InvalidArgument, "--u needs " + std::to_string(v.m()) +
                                                  " pairings, got " + std::to_string(pairs.size()));
  } else {
    auto def = default_pairings(v);
    if (!def)
      throw Error(ErrorCode::InvalidArgument,
                  "no default direction for this fan; pass the pairings explicitly");
    pairs = *def;
  }
  return validate_direction(v.pic, pairs);
}

void check_B(const double* B, std::size_t nB) {
  if (nB == 0) throw Error(ErrorCode::InvalidArgument, "no B values given");
  need(B, "B");
  for (std::size_t i = 0; i < nB; ++i) {
    if (!(B[i] >= 1.0) || !std::isfinite(B[i]))
      throw Error(ErrorCode::InvalidArgument, "B values must be finite and >= 1");
    if (i > 0 && !(B[i] > B[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "B values must be strictly increasing");
  }
}

EnumOptions enum_options(const torix_options& o) {
  EnumOptions eo;
  eo.height.tol = o.tol;
  eo.height.exact_boundary = o.exact_boundary != 0;
  eo.threads = std::max(1U, o.threads);
  if (o.node_budget) eo.node_budget = o.node_budget;
  return eo;
}

PredictConfig predict_config(const torix_options& o) {
  if (o.samples < 1000) throw Error(ErrorCode::InvalidArgument, "samples must be at least 1000");
  if (o.p_max < 11) throw Error(ErrorCode::InvalidArgument, "p_max must be at least 11");
  PredictConfig pc;
  pc.mc.samples = o.samples;
  pc.mc.seed = o.seed;
  pc.mc.threads = std::max(1U, o.threads);
  pc.p_max = o.p_max;
  pc.eps = o.eps;
  return pc;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

json matrix_json(const IntMatrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(m.row(r));
  return out;
}

json rayset_json(RaySet s) { return s.indices(); }

// Open-torus and boundary points of X(Q); each has a free orbit of size 2^t
// on the torsor.
BigInt rational_part(const BigInt& torsor_level, int t) { return torsor_level >> t; }

struct CountRow {
  double B;
  CountReport rep;
  double seconds;
};

std::vector<CountRow> run_counts(const torix_variety* v, const torix_region* r,
                                 const torix_options& o, const double* B, std::size_t nB) {
  check_B(B, nB);
  const GrowthDirection dir = direction_for(v->v, o);
  const EnumOptions eo = enum_options(o);
  std::vector<CountRow> rows;
  for (std::size_t i = 0; i < nB; ++i) {
    const GrowthSpec gs = make_growth(v->v, dir, B[i]);
    const auto t0 = std::chrono::steady_clock::now();
    CountReport rep = enumerate_points(v->v, r->compiled, &gs, eo);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back({B[i], std::move(rep), secs});
  }
  return rows;
}

}  // namespace

extern "C" {

const char* torix_last_error(void) { return g_last_error.c_str(); }

const char* torix_version(void) { return "0.1.0"; }

void torix_string_free(char* s) { std::free(s); }

void torix_options_default(torix_options* o) {
  if (!o) return;
  o->pairings = nullptr;
  o->eps = 0.05;
  o->tol = 1e-9;
  o->samples = 1'000'000;
  o->seed = 1;
  o->p_max = 100'000;
  o->threads = 1;
  o->exact_boundary = 0;
  o->timing = 0;
  o->node_budget = 0;
}

torix_status torix_validate(const char* source, char** report_json, int* all_pass) {
  return guarded([&] {
    need(source, "source");
    need(report_json, "report_json");
    need(all_pass, "all_pass");
    const Fan f = load_fan(source);
    const ValidationReport rep = validate_fan(f);
    json checks = json::array();
    for (const auto& c : rep.checks)
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"witness", c.witness}});
    bool ok = rep.all_pass();
    json doc = {{"name", f.name}, {"checks", checks}};
    if (ok) {
      json cert = {{"name", "projective"}};
      try {
        const PicardData pd = compute_picard(f);
        const auto basis = ample_basis(pd);
        cert["pass"] = true;
        cert["witness"] = "";
        doc["ample_basis"] = basis;
        doc["ample_class"] = basis.front();
      } catch (const Error& e) {
        cert["pass"] = false;
        cert["witness"] = e.what();
        ok = false;
      }
      doc["checks"].push_back(cert);
    }
    doc["all_pass"] = ok;
    *all_pass = ok ? 1 : 0;
    *report_json = dup_string(doc.dump(2));
  });
}

torix_status torix_variety_open(const char* source, torix_variety** out) {
  return guarded([&] {
    need(source, "source");
    need(out, "out");
    *out = nullptr;
    auto* h = new torix_variety{make_variety(load_fan(source))};
    *out = h;
  });
}

void torix_variety_free(torix_variety* v) { delete v; }

torix_status torix_describe(const torix_variety* h, int flags, char** out_json) {
  return guarded([&] {
    need(h, "variety");
    need(out_json, "out_json");
    const Variety& v = h->v;
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fan_hash(v.fan)));
    json pcs = json::array();
    for (auto c : v.primitive_collections) pcs.push_back(rayset_json(c));
    json doc = {
        {"name", v.fan.name},
        {"fan_hash", hash},
        {"dim", v.n()},
        {"rays", v.fan.rays},
        {"max_cones", json::array()},
        {"m", v.m()},
        {"t", v.t()},
        {"primitive_collections", pcs},
        {"f", v.f},
        {"picard",
         {{"projection", matrix_json(v.pic.proj)},
          {"ray_classes", v.pic.ray_classes},
          {"anticanonical", v.pic.anticanonical},
          {"wall_relations", v.pic.wall_relations},
          {"anticanonical_ample", is_ample(v.pic, v.pic.anticanonical)}}},
        {"ample_basis", v.sections.basis},
        {"ray_classes_ample", v.ray_ample},
        {"anticanonical_in_ample_basis", v.anticanonical_ample},
    };
    for (auto c : v.fan.max_cones) doc["max_cones"].push_back(rayset_json(c));
    if (auto def = default_pairings(v)) {
      json p = json::array();
      for (const auto& x : *def) p.push_back(to_string(x));
      doc["default_pairings"] = p;
    } else {
      doc["default_pairings"] = nullptr;
    }
    if (flags & TORIX_DESCRIBE_SECTIONS) {
      json secs = json::array();
      for (std::size_t k = 0; k < v.sections.rank(); ++k)
        secs.push_back({{"class", v.sections.basis[k]},
                        {"r", v.sections.r(k)},
                        {"monomials", v.sections.monomials[k]}});
      doc["sections"] = secs;
    }
    if (flags & TORIX_DESCRIBE_MOBIUS) {
      const MobiusLocalTable table = mobius_table(v.primitive_collections);
      json entries = json::array();
      for (const auto& [s, val] : table.entries)
        entries.push_back({{"A", rayset_json(s)}, {"mu", val}});
      json coeffs = json::array();
      for (const auto& c : table.density_coefficients(v.m())) coeffs.push_back(c.convert_to<long long>());
      doc["mobius"] = {{"table", entries},
                       {"local_density", table.density_polynomial(v.m())},
                       {"local_density_coefficients", coeffs}};
    }
    *out_json = dup_string(doc.dump(2));
  });
}

torix_status torix_region_open(const torix_variety* h, const char* region_path, torix_region** out) {
  return guarded([&] {
    need(h, "variety");
    need(out, "out");
    *out = nullptr;
    Region reg = region_path ? parse_region(read_file(region_path), h->v.m()) : unit_box_region(h->v);
    CompiledRegion cr = compile_region(h->v, reg);
    *out = new torix_region{std::move(reg), std::move(cr)};
  });
}

void torix_region_free(torix_region* r) { delete r; }

torix_status torix_count(const torix_variety* v, const torix_region* r, const torix_options* opts,
                         const double* B, size_t nB, char** out_json) {
  return guarded([&] {
    need(v, "variety");
    need(r, "region");
    need(opts, "options");
    need(out_json, "out_json");
    json rows = json::array();
    for (const auto& row : run_counts(v, r, *opts, B, nB)) {
      json j = {{"B", row.B},
                {"rational_count", row.rep.rational_count.str()},
                {"torsor_count", row.rep.torsor_count.str()},
                {"torus_count", rational_part(row.rep.torus_count, v->v.t()).str()},
                {"boundary_count", rational_part(row.rep.boundary_count, v->v.t()).str()},
                {"torus_torsor_count", row.rep.torus_count.str()},
                {"nodes", row.rep.nodes},
                {"coordinate_bounds", row.rep.bounds}};
      if (opts->timing) j["seconds"] = row.seconds;
      rows.push_back(j);
    }
    *out_json = dup_string(json{{"rows", rows}}.dump(2));
  });
}

torix_status torix_predict(const torix_variety* v, const torix_region* r, const torix_options* opts,
                           const double* B, size_t nB, char** out_json) {
  return guarded([&] {
    need(v, "variety");
    need(r, "region");
    need(opts, "options");
    need(out_json, "out_json");
    const GrowthDirection dir = direction_for(v->v, *opts);
    const DensityReport rep = predict(v->v, r->region, dir, predict_config(*opts));
    json doc = json::parse(rep.to_json());
    if (nB > 0) {
      check_B(B, nB);
      json preds = json::array();
      for (std::size_t i = 0; i < nB; ++i) {
        const auto [lo, hi] = rep.prediction_interval(B[i]);
        preds.push_back({{"B", B[i]}, {"prediction", rep.prediction(B[i])}, {"interval", {lo, hi}}});
      }
      doc["predictions"] = preds;
    }
    *out_json = dup_string(doc.dump(2));
  });
}

torix_status torix_compare(const torix_variety* v, const torix_region* r, const torix_options* opts,
                           const double* B, size_t nB, char** out_csv) {
  return guarded([&] {
    need(v, "variety");
    need(r, "region");
    need(opts, "options");
    need(out_csv, "out_csv");
    const GrowthDirection dir = direction_for(v->v, *opts);
    const DensityReport rep = predict(v->v, r->region, dir, predict_config(*opts));
    const auto rows = run_counts(v, r, *opts, B, nB);
    std::string csv =
        "B,rational_count,torus_count,boundary_count,prediction,prediction_lo,prediction_hi,"
        "ratio,residual_scale";
    if (opts->timing) csv += ",wall_clock_s";
    csv += "\n";
    for (const auto& row : rows) {
      const double pred = rep.prediction(row.B);
      const auto [lo, hi] = rep.prediction_interval(row.B);
      const double ratio = row.rep.rational_count.convert_to<double>() / pred;
      csv += format_double(row.B) + "," + row.rep.rational_count.str() + "," +
             rational_part(row.rep.torus_count, v->v.t()).str() + "," +
             rational_part(row.rep.boundary_count, v->v.t()).str() + "," +
             format_double(pred) + "," + format_double(lo) + "," + format_double(hi) + "," +
             format_double(ratio) + "," + format_double(std::pow(row.B, -rep.error_exponent));
      if (opts->timing) csv += "," + format_double(row.seconds);
      csv += "\n";
    }
    *out_csv = dup_string(csv);
  });
}

}  // extern "C"
