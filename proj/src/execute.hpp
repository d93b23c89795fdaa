#pragma once

// The solve / certify / bench / recover pipelines behind the CLI.

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "core.hpp"
#include "io.hpp"
#include "problems.hpp"

namespace psgm {

struct PreparedProblem {
  ProblemInstance problem;
  Point x0;
  /// Set for factorization problems (synth_rmc, csv, movielens, pgm).
  std::optional<RobustFactorizationInstance> factorization;
  /// Entries withheld from the solver (MovieLens test split, hidden pixels).
  std::optional<Matrix> holdout_values;
  std::optional<Matrix> holdout_mask;
  /// Peak value for PSNR.
  double max_value = 1.0;
  bool is_image = false;
};

/// Builds the problem named in the config and its starting point. Builtins
/// start from the first reference point shifted by x0_norm in a seeded
/// random direction unless x0 is given.
PreparedProblem prepare_problem(const RunConfig& config);

void write_history_csv(const std::string& path, const RunHistory& history);

/// Runs one command and returns the paths it wrote. Throws psgm::Error.
std::vector<std::string> execute(const std::string& command, const RunConfig& config);

}  // namespace psgm
