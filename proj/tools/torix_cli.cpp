// torix command-line front end. Talks to the library only through torix.h.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "torix/torix.h"

namespace {

int exit_code(torix_status s) {
  switch (s) {
    case TORIX_OK: return 0;
    case TORIX_E_BUDGET:
    case TORIX_E_TOLERANCE:
    case TORIX_E_INTERNAL: return 2;
    default: return 1;
  }
}

int fail(torix_status s) {
  std::cerr << "torix: " << torix_last_error() << "\n";
  return exit_code(s);
}

// "2^10" or a plain number.
double parse_B(const std::string& item) {
  const auto caret = item.find('^');
  std::size_t used = 0;
  if (caret != std::string::npos) {
    const double base = std::stod(item.substr(0, caret), &used);
    if (used != caret) throw std::invalid_argument(item);
    const std::string e = item.substr(caret + 1);
    const double ex = std::stod(e, &used);
    if (used != e.size()) throw std::invalid_argument(item);
    return std::pow(base, ex);
  }
  const double v = std::stod(item, &used);
  if (used != item.size()) throw std::invalid_argument(item);
  return v;
}

std::vector<double> parse_B_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_B(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--B", "bad value '" + item + "'");
    }
  }
  return out;
}

struct Emitter {
  std::string path;
  int write(char* text) {
    std::string s(text);
    torix_string_free(text);
    if (!s.empty() && s.back() != '\n') s += '\n';
    if (path.empty() || path == "-") {
      std::cout << s;
      return 0;
    }
    std::ofstream out(path);
    if (!out || !(out << s)) {
      std::cerr << "torix: cannot write '" << path << "'\n";
      return 1;
    }
    return 0;
  }
};

unsigned default_threads() {
  if (const char* env = std::getenv("TORIX_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1 && n <= 1024) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    std::cerr << "torix: ignoring TORIX_THREADS='" << env << "'\n";
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rational points of bounded multi-height on split toric varieties"};
  app.require_subcommand(1);
  app.set_version_flag("--version", torix_version());

  torix_options opts;
  torix_options_default(&opts);
  opts.threads = default_threads();

  std::string fan;
  std::string region;
  std::string pairings;
  std::string b_text;
  std::string out;
  bool sections = false;
  bool mobius = false;
  bool exact = false;
  bool timing = false;

  auto add_fan = [&](CLI::App* c) {
    c->add_option("--fan", fan, "builtin:NAME or path to a fan document")->required();
    c->add_option("--out", out, "write output here instead of stdout");
  };
  auto add_region = [&](CLI::App* c) {
    c->add_option("--region", region, "region document (default: [0, log 2) on each ample class)");
    c->add_option("--u", pairings, "pairings of u with the ray classes, comma separated");
  };
  auto add_count = [&](CLI::App* c) {
    c->add_option("--tol", opts.tol, "tolerance on log-heights at window bounds")
        ->check(CLI::NonNegativeNumber);
    c->add_option("--threads", opts.threads, "worker threads (default TORIX_THREADS or 1)")
        ->check(CLI::Range(1U, 1024U));
    c->add_flag("--exact-boundary", exact, "decide near-boundary heights with exact integers");
    c->add_flag("--timing", timing, "include wall-clock times in the output");
    c->add_option("--node-budget", opts.node_budget, "abort after this many search nodes (0: library default)");
  };
  auto add_predict = [&](CLI::App* c) {
    c->add_option("--eps", opts.eps, "epsilon of the error-exponent diagnostic");
    c->add_option("--samples", opts.samples, "Monte Carlo samples")->check(CLI::Range(1000ULL, 10'000'000'000ULL));
    c->add_option("--seed", opts.seed, "Monte Carlo seed");
    c->add_option("--pmax", opts.p_max, "Euler product cutoff")->check(CLI::Range(11LL, 100'000'000LL));
  };

  auto* validate = app.add_subcommand("validate", "check the fan axioms and projectivity");
  add_fan(validate);
  auto* describe = app.add_subcommand("describe", "Picard group, ample basis, collections");
  add_fan(describe);
  describe->add_flag("--sections", sections, "list the monomial bases");
  describe->add_flag("--mobius", mobius, "local Moebius table and local density");
  auto* count = app.add_subcommand("count", "exact point counts per B");
  add_fan(count);
  add_region(count);
  add_count(count);
  count->add_option("--B", b_text, "comma list, e.g. 8,16,2^5")->required();
  auto* pred = app.add_subcommand("predict", "nu, tau and the predicted count");
  add_fan(pred);
  add_region(pred);
  add_predict(pred);
  pred->add_option("--B", b_text, "comma list of B values to evaluate the prediction at");
  pred->add_option("--threads", opts.threads, "worker threads")->check(CLI::Range(1U, 1024U));
  auto* compare = app.add_subcommand("compare", "CSV of counts against the prediction");
  add_fan(compare);
  add_region(compare);
  add_count(compare);
  add_predict(compare);
  compare->add_option("--B", b_text, "comma list, e.g. 2^6,2^8,2^10")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::vector<double> Bs;
  try {
    if (!b_text.empty()) Bs = parse_B_list(b_text);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "torix: " << e.what() << "\n";
    return 1;
  }
  opts.pairings = pairings.empty() ? nullptr : pairings.c_str();
  opts.exact_boundary = exact ? 1 : 0;
  opts.timing = timing ? 1 : 0;
  Emitter emit{out};

  if (validate->parsed()) {
    char* report = nullptr;
    int ok = 0;
    const torix_status s = torix_validate(fan.c_str(), &report, &ok);
    if (s != TORIX_OK) return fail(s);
    if (emit.write(report) != 0) return 1;
    return ok ? 0 : 1;
  }

  torix_variety* v = nullptr;
  torix_status s = torix_variety_open(fan.c_str(), &v);
  if (s != TORIX_OK) return fail(s);
  int rc = 0;
  char* text = nullptr;
  if (describe->parsed()) {
    const int flags = (sections ? TORIX_DESCRIBE_SECTIONS : 0) | (mobius ? TORIX_DESCRIBE_MOBIUS : 0);
    s = torix_describe(v, flags, &text);
  } else {
    torix_region* r = nullptr;
    s = torix_region_open(v, region.empty() ? nullptr : region.c_str(), &r);
    if (s == TORIX_OK) {
      if (count->parsed())
        s = torix_count(v, r, &opts, Bs.data(), Bs.size(), &text);
      else if (pred->parsed())
        s = torix_predict(v, r, &opts, Bs.data(), Bs.size(), &text);
      else
        s = torix_compare(v, r, &opts, Bs.data(), Bs.size(), &text);
      torix_region_free(r);
    }
  }
  if (s != TORIX_OK)
    rc = fail(s);
  else
    rc = emit.write(text);
  torix_variety_free(v);
  return rc;
}
