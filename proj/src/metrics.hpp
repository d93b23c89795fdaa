#pragma once

// Recovery metrics and the empirical convergence-rate classifier.

#include <cstddef>
#include <optional>
#include <vector>

#include "core.hpp"
#include "problems.hpp"

namespace psgm {

/// sqrt(sum mask (pred - truth)^2 / sum mask)
double rmse(const Matrix& pred, const Matrix& truth, const Matrix& mask);

struct SignalRatios {
  double psnr_db;
  double snr_db;
};

/// Both ratios are capped at 99 dB when their denominator falls below 1e-12.
SignalRatios psnr_snr(const Matrix& recon, const Matrix& original, double max_value);

/// Rows of the feature matrices are samples. Euclidean k-nearest-neighbour
/// majority vote; distance ties go to the lower training index and vote
/// ties to the smaller label.
double knn_accuracy(const Matrix& train_features, const std::vector<int>& train_labels,
                    const Matrix& test_features, const std::vector<int>& test_labels, std::size_t k);

enum class RateClass { Finite, Geometric, Sublinear };
const char* to_string(RateClass c);

struct RateFitOptions {
  /// Leading fraction of the sequence dropped as transient.
  double transient_fraction = 0.1;
  /// Iteration index of the first element, used by the log-log fit.
  std::size_t first_index = 1;
};

struct RateFitResult {
  RateClass rate_class = RateClass::Geometric;
  /// exp(slope of log s_k against k); meaningful for Geometric.
  double rate = 0.0;
  /// Slope of log s_k against log k; meaningful for Sublinear.
  double exponent = 0.0;
  /// 1 - R^2 of the chosen fit (0 for Finite).
  double fit_residual = 0.0;
  double r2_geometric = 0.0;
  double r2_sublinear = 0.0;
  /// Position of the first entry <= 1e-15, for Finite.
  std::optional<std::size_t> zero_index;
};

RateFitResult rate_fit(const std::vector<double>& sequence, const RateFitOptions& options = {});

/// e_k = max(s_k, s_{k+1}). Smooths sequences whose consecutive terms
/// alternate around a decaying trend; the result has one fewer element.
std::vector<double> pairwise_max_envelope(const std::vector<double>& sequence);

}  // namespace psgm
