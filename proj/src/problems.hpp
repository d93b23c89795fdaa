#pragma once

// Oracle library: toy paraconvex functions, phase retrieval, robust matrix
// completion / robust NMF on an L1 loss, synthetic generators and factor
// initializers.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace psgm {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::size_t size() const noexcept { return data.size(); }
  bool same_shape(const Matrix& o) const noexcept { return rows == o.rows && cols == o.cols; }
};

/// min (1/2) ||M .* (X - U V)||_1, optionally over U >= 0, V >= 0.
struct RobustFactorizationInstance {
  Matrix X;
  /// Entries in {0, 1}.
  Matrix M;
  std::size_t rank = 1;
  bool nonnegative = false;
  std::optional<Matrix> ground_truth;
  /// The data is exactly U0 V0 on the mask (no noise, no outliers), so f* = 0.
  bool realizable = false;

  void validate() const;
  std::size_t point_size() const { return (X.rows + X.cols) * rank; }
};

/// min (1/m) sum_i |<a_i, x>^2 - b_i|
struct PhaseRetrievalInstance {
  Matrix A;
  Vector b;
  std::optional<Vector> ground_truth;

  void validate() const;
};

ProblemInstance rmc_oracle(const RobustFactorizationInstance& instance);
ProblemInstance phase_oracle(const PhaseRetrievalInstance& instance);

/// para1d, saddle2d, sharp_norm, quadratic_norm. `dimension` applies to the
/// norm problems only (default 10).
ProblemInstance builtin_instance(const std::string& name, std::size_t dimension = 10);
std::vector<std::string> builtin_names();

RobustFactorizationInstance synth_rmc(std::size_t m, std::size_t n, std::size_t r,
                                      double observed_fraction, double outlier_fraction,
                                      double outlier_scale, std::uint64_t seed);

PhaseRetrievalInstance synth_phase(std::size_t m, std::size_t n, std::uint64_t seed);

enum class InitMethod { Svd, Random };

/// Returns the packed point (U row-major, then V row-major).
Point initialize_factors(const Matrix& X, const Matrix& M, std::size_t r, InitMethod method,
                         bool nonnegative, std::uint64_t seed);

/// Splits a packed point into U (m x r) and V (r x n).
std::pair<Matrix, Matrix> unpack_factors(const Point& x, std::size_t m, std::size_t n, std::size_t r);
Point pack_factors(const Matrix& U, const Matrix& V);
Matrix multiply(const Matrix& A, const Matrix& B);

/// ||truth - U V||_F / ||truth||_F
double relative_reconstruction_error(const Matrix& truth, const Point& x, std::size_t r);

}  // namespace psgm
