#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <utility>

#include "error.hpp"
#include "io.hpp"
#include "problems.hpp"

namespace psgm {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_field(const std::string& key, const std::string& why) {
  fail(ErrorCode::kInvalidArgument, "config field '" + key + "': " + why);
}

double as_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  const std::string t = trim(v);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size()) bad_field(key, "not a number: '" + t + "'");
  if (!std::isfinite(x)) bad_field(key, "must be finite");
  return x;
}

std::uint64_t as_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const std::string t = trim(v);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size()) bad_field(key, "not a nonnegative integer: '" + t + "'");
  return x;
}

bool as_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  bad_field(key, "not a boolean: '" + t + "'");
}

double positive(const std::string& key, const std::string& v) {
  const double x = as_real(key, v);
  if (!(x > 0.0)) bad_field(key, "must be positive");
  return x;
}

double unit_interval(const std::string& key, const std::string& v) {
  const double x = as_real(key, v);
  if (x < 0.0 || x > 1.0) bad_field(key, "must lie in [0,1]");
  return x;
}

const std::vector<std::string>& rule_names() {
  static const std::vector<std::string> names = {"constant", "diminishing", "square_summable",
                                                 "geometric", "polyak", "scaled_polyak"};
  return names;
}

bool known_problem(const std::string& p) {
  const auto b = builtin_names();
  return std::find(b.begin(), b.end(), p) != b.end() || p == "synth_rmc" || p == "synth_phase" || p == "csv" ||
         p == "movielens" || p == "pgm";
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem", [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::string t = trim(v);
         if (!known_problem(t)) bad_field(k, "unknown problem '" + t + "'");
         c.problem = t;
       }},
      {"dimension", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.dimension = as_unsigned(k, v);
         if (c.dimension == 0) bad_field(k, "must be positive");
       }},
      {"x0", [](RunConfig& c, const std::string& k, const std::string& v) {
         Vector x;
         std::stringstream ss(v);
         std::string cell;
         while (std::getline(ss, cell, ',')) x.push_back(as_real(k, cell));
         if (x.empty()) bad_field(k, "empty point");
         c.x0 = std::move(x);
       }},
      {"x0_norm", [](RunConfig& c, const std::string& k, const std::string& v) { c.x0_norm = positive(k, v); }},
      {"m", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.m = as_unsigned(k, v);
         if (c.m == 0) bad_field(k, "must be positive");
       }},
      {"n", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.n = as_unsigned(k, v);
         if (c.n == 0) bad_field(k, "must be positive");
       }},
      {"rank", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.rank = as_unsigned(k, v);
         if (c.rank == 0) bad_field(k, "must be positive");
       }},
      {"observed_fraction", [](RunConfig& c, const std::string& k, const std::string& v) { c.observed_fraction = unit_interval(k, v); }},
      {"outlier_fraction", [](RunConfig& c, const std::string& k, const std::string& v) { c.outlier_fraction = unit_interval(k, v); }},
      {"outlier_scale", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.outlier_scale = as_real(k, v);
         if (c.outlier_scale < 0.0) bad_field(k, "must be nonnegative");
       }},
      {"nonnegative", [](RunConfig& c, const std::string& k, const std::string& v) { c.nonnegative = as_bool(k, v); }},
      {"init", [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::string t = trim(v);
         if (t != "svd" && t != "random") bad_field(k, "must be svd or random");
         c.init = t;
       }},
      {"data", [](RunConfig& c, const std::string&, const std::string& v) { c.data = trim(v); }},
      {"mask", [](RunConfig& c, const std::string&, const std::string& v) { c.mask = trim(v); }},
      {"mask_fraction", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.mask_fraction = unit_interval(k, v);
         if (c.mask_fraction >= 1.0) bad_field(k, "must be below 1");
       }},
      {"test_fraction", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.test_fraction = unit_interval(k, v);
         if (c.test_fraction >= 1.0) bad_field(k, "must be below 1");
       }},
      {"rule", [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::string t = trim(v);
         const auto& names = rule_names();
         if (std::find(names.begin(), names.end(), t) == names.end()) bad_field(k, "unknown rule '" + t + "'");
         c.rule = t;
       }},
      {"alpha", [](RunConfig& c, const std::string& k, const std::string& v) { c.alpha = positive(k, v); }},
      {"lambda", [](RunConfig& c, const std::string& k, const std::string& v) { c.lambda = positive(k, v); }},
      {"beta", [](RunConfig& c, const std::string& k, const std::string& v) { c.beta = positive(k, v); }},
      {"r", [](RunConfig& c, const std::string& k, const std::string& v) { c.r = positive(k, v); }},
      {"q", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.q = as_real(k, v);
         if (!(c.q > 0.0 && c.q < 1.0)) bad_field(k, "must lie in (0,1)");
       }},
      {"sigma", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sigma = as_real(k, v);
         if (!(c.sigma > 0.5)) bad_field(k, "must exceed 1/2");
       }},
      {"f_target", [](RunConfig& c, const std::string& k, const std::string& v) { c.f_target = as_real(k, v); }},
      {"max_iterations", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.max_iterations = as_unsigned(k, v);
         if (c.max_iterations == 0) bad_field(k, "must be at least 1");
       }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = as_unsigned(k, v); }},
      {"stationary_tolerance", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.stationary_tolerance = as_real(k, v);
         if (c.stationary_tolerance < 0.0) bad_field(k, "must be nonnegative");
       }},
      {"target_gap", [](RunConfig& c, const std::string& k, const std::string& v) { c.target_gap = as_real(k, v); }},
      {"record_distances", [](RunConfig& c, const std::string& k, const std::string& v) { c.record_distances = as_bool(k, v); }},
      {"audit", [](RunConfig& c, const std::string& k, const std::string& v) { c.audit = as_bool(k, v); }},
      {"gamma", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.gamma = as_real(k, v);
         if (!(c.gamma > 0.0 && c.gamma <= 1.0)) bad_field(k, "must lie in (0,1]");
       }},
      {"nu", [](RunConfig& c, const std::string& k, const std::string& v) {
         const double nu = as_real(k, v);
         if (!(nu > 0.0 && nu <= 1.0)) bad_field(k, "must lie in (0,1]");
         c.nu = nu;
       }},
      {"domain_lo", [](RunConfig& c, const std::string& k, const std::string& v) { c.domain_lo = as_real(k, v); }},
      {"domain_hi", [](RunConfig& c, const std::string& k, const std::string& v) { c.domain_hi = as_real(k, v); }},
      {"pairs", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.pairs = as_unsigned(k, v);
         if (c.pairs == 0) bad_field(k, "must be at least 1");
       }},
      {"bench_alpha0", [](RunConfig& c, const std::string& k, const std::string& v) { c.bench_alpha0 = positive(k, v); }},
      {"bench_decay_alpha0", [](RunConfig& c, const std::string& k, const std::string& v) { c.bench_decay_alpha0 = positive(k, v); }},
      {"bench_decay_q", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench_decay_q = as_real(k, v);
         if (!(c.bench_decay_q > 0.0 && c.bench_decay_q < 1.0)) bad_field(k, "must lie in (0,1)");
       }},
      {"bench_sigma", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.bench_sigma = as_real(k, v);
         if (!(c.bench_sigma > 0.5)) bad_field(k, "must exceed 1/2");
       }},
      {"out", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.out = trim(v);
         if (c.out.empty()) bad_field(k, "empty path");
       }},
  };
  return table;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(trim(key));
  if (it == table.end()) fail(ErrorCode::kInvalidArgument, "config field '" + trim(key) + "': unknown key");
  // Setters validate after assigning, so apply to a copy and commit on success.
  RunConfig next = *this;
  it->second(next, trim(key), value);
  *this = std::move(next);
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> k;
  for (const auto& [name, _] : setters()) k.push_back(name);
  return k;
}

void RunConfig::validate() const {
  if (!(domain_lo < domain_hi)) bad_field("domain_lo", "must be below domain_hi");
  if (problem == "csv" || problem == "movielens" || problem == "pgm") {
    if (data.empty()) bad_field("data", "required for problem '" + problem + "'");
    if (!std::filesystem::exists(data)) bad_field("data", "file not found: " + data);
  }
  if (!mask.empty() && !std::filesystem::exists(mask)) bad_field("mask", "file not found: " + mask);
  if (problem == "synth_rmc" && rank > std::min(m, n)) bad_field("rank", "must not exceed min(m, n)");
  if (x0) {
    const bool fixed_dim = problem == "para1d" || problem == "saddle2d";
    if (fixed_dim && x0->size() != (problem == "para1d" ? 1u : 2u)) bad_field("x0", "dimension mismatch for " + problem);
    if ((problem == "sharp_norm" || problem == "quadratic_norm") && x0->size() != dimension)
      bad_field("x0", "length must equal dimension");
  }
  // Constructing the rule applies its own range checks.
  try {
    (void)step_rule();
  } catch (const Error& e) {
    bad_field("rule", e.what());
  }
}

StepSizeRule RunConfig::step_rule() const {
  if (rule == "constant") return StepSizeRule::constant(alpha);
  if (rule == "diminishing") return StepSizeRule::diminishing(lambda, beta, r);
  if (rule == "square_summable") return StepSizeRule::square_summable(lambda);
  if (rule == "geometric") return StepSizeRule::geometric(lambda, q);
  if (rule == "polyak") return StepSizeRule::polyak(f_target);
  if (rule == "scaled_polyak") return StepSizeRule::scaled_polyak(sigma, f_target);
  bad_field("rule", "unknown rule '" + rule + "'");
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig s;
  s.max_iterations = max_iterations;
  s.stationary_tolerance = stationary_tolerance;
  s.target_gap = target_gap;
  s.record_distances = record_distances;
  s.record_points = audit;
  s.seed = seed;
  return s;
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::kParse, "config line " + std::to_string(lineno) + ": expected key = value");
    cfg.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::kIo, "cannot open config " + path);
  return parse_config(f);
}

}  // namespace psgm
