#pragma once

// Run configuration: flat "key = value" lines, '#' starts a comment.
//
// Problem      problem dimension x0 x0_norm
//              m n rank observed_fraction outlier_fraction outlier_scale
//              nonnegative init data mask mask_fraction test_fraction
// Rule         rule alpha lambda beta r q sigma f_target
// Solver       max_iterations seed stationary_tolerance target_gap
//              record_distances audit
// Certify      gamma nu domain_lo domain_hi pairs
// Bench        bench_alpha0 bench_decay_alpha0 bench_decay_q bench_sigma
// Output       out
//
// problem is a builtin name (para1d, saddle2d, sharp_norm, quadratic_norm),
// synth_rmc, synth_phase, or a data source: csv, movielens, pgm.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "schedule.hpp"
#include "solver.hpp"

namespace psgm {

struct RunConfig {
  std::string problem = "sharp_norm";
  std::size_t dimension = 10;
  std::optional<Vector> x0;
  double x0_norm = 1.0;

  std::size_t m = 60;
  std::size_t n = 50;
  std::size_t rank = 3;
  double observed_fraction = 0.7;
  double outlier_fraction = 0.0;
  double outlier_scale = 0.0;
  bool nonnegative = false;
  std::string init = "random";
  std::string data;
  std::string mask;
  double mask_fraction = 0.4;
  double test_fraction = 0.2;

  std::string rule = "scaled_polyak";
  double alpha = 0.01;
  double lambda = 1.0;
  double beta = 1.0;
  double r = 0.5;
  double q = 0.95;
  double sigma = 4.0;
  std::optional<double> f_target;

  std::size_t max_iterations = 1000;
  std::uint64_t seed = 0;
  double stationary_tolerance = 1e-12;
  std::optional<double> target_gap;
  bool record_distances = true;
  bool audit = false;

  double gamma = 0.25;
  std::optional<double> nu;
  double domain_lo = -1.5;
  double domain_hi = 1.5;
  std::size_t pairs = 2000;

  double bench_alpha0 = 1e-2;
  double bench_decay_alpha0 = 1e-3;
  double bench_decay_q = 0.95;
  double bench_sigma = 4.0;

  std::string out = ".";

  /// Parses and range-checks one field; errors name the field.
  void set(const std::string& key, const std::string& value);
  /// Cross-field checks and file existence.
  void validate() const;

  StepSizeRule step_rule() const;
  SolverConfig solver_config() const;

  static std::vector<std::string> keys();
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

}  // namespace psgm
