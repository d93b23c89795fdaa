#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "error.hpp"

namespace psgm {
namespace {

constexpr double kCapDb = 99.0;

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  if (sxx <= 0.0) return f;
  f.slope = sxy / sxx;
  // A constant response is fit perfectly by any line with zero slope.
  f.r2 = syy <= 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace

double rmse(const Matrix& pred, const Matrix& truth, const Matrix& mask) {
  require(pred.same_shape(truth) && pred.same_shape(mask), "rmse: shapes differ");
  double ss = 0.0, count = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (mask.data[i] == 0.0) continue;
    const double d = pred.data[i] - truth.data[i];
    ss += d * d;
    count += 1.0;
  }
  require(count > 0.0, "rmse: empty mask");
  return std::sqrt(ss / count);
}

SignalRatios psnr_snr(const Matrix& recon, const Matrix& original, double max_value) {
  require(recon.same_shape(original), "psnr_snr: shapes differ");
  require(recon.size() > 0, "psnr_snr: empty matrices");
  require(std::isfinite(max_value) && max_value > 0.0, "psnr_snr: max_value must be positive");
  double err = 0.0, signal = 0.0;
  for (std::size_t i = 0; i < recon.size(); ++i) {
    const double d = recon.data[i] - original.data[i];
    err += d * d;
    signal += original.data[i] * original.data[i];
  }
  const double mse = err / static_cast<double>(recon.size());
  SignalRatios r;
  r.psnr_db = mse < 1e-12 ? kCapDb : std::min(kCapDb, 10.0 * std::log10(max_value * max_value / mse));
  r.snr_db = err < 1e-12 ? kCapDb : std::min(kCapDb, 10.0 * std::log10(signal / err));
  return r;
}

double knn_accuracy(const Matrix& train_features, const std::vector<int>& train_labels, const Matrix& test_features,
                    const std::vector<int>& test_labels, std::size_t k) {
  require(train_features.rows > 0, "knn_accuracy: empty training set");
  require(k >= 1, "knn_accuracy: k must be at least 1");
  require(train_labels.size() == train_features.rows, "knn_accuracy: one label per training row");
  require(test_labels.size() == test_features.rows, "knn_accuracy: one label per test row");
  require(test_features.rows > 0, "knn_accuracy: empty test set");
  require(train_features.cols == test_features.cols, "knn_accuracy: feature dimensions differ");
  const std::size_t kk = std::min(k, train_features.rows);
  const std::size_t d = train_features.cols;

  std::size_t correct = 0;
  std::vector<std::pair<double, std::size_t>> dist(train_features.rows);
  for (std::size_t t = 0; t < test_features.rows; ++t) {
    for (std::size_t i = 0; i < train_features.rows; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = train_features(i, j) - test_features(t, j);
        s += diff * diff;
      }
      dist[i] = {s, i};
    }
    // Pair ordering breaks distance ties by training index.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    std::map<int, std::size_t> votes;
    for (std::size_t i = 0; i < kk; ++i) ++votes[train_labels[dist[i].second]];
    int label = votes.begin()->first;
    std::size_t best = 0;
    for (const auto& [l, v] : votes) {
      if (v > best) {
        best = v;
        label = l;
      }
    }
    if (label == test_labels[t]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_features.rows);
}

const char* to_string(RateClass c) {
  switch (c) {
    case RateClass::Finite: return "finite";
    case RateClass::Geometric: return "geometric";
    case RateClass::Sublinear: return "sublinear";
  }
  return "unknown";
}

RateFitResult rate_fit(const std::vector<double>& sequence, const RateFitOptions& options) {
  require(sequence.size() >= 20, "rate_fit: sequence must have at least 20 entries");
  require(options.transient_fraction >= 0.0 && options.transient_fraction < 1.0,
          "rate_fit: transient_fraction must lie in [0,1)");
  RateFitResult res;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    require(!std::isnan(sequence[i]), "rate_fit: sequence contains NaN");
    if (sequence[i] <= 1e-15) {
      res.rate_class = RateClass::Finite;
      res.zero_index = i;
      return res;
    }
  }

  const auto start = static_cast<std::size_t>(std::floor(options.transient_fraction * static_cast<double>(sequence.size())));
  std::vector<double> k, logk, logs;
  for (std::size_t i = start; i < sequence.size(); ++i) {
    const double idx = static_cast<double>(options.first_index + i);
    if (idx <= 0.0) continue;
    k.push_back(idx);
    logk.push_back(std::log(idx));
    logs.push_back(std::log(sequence[i]));
  }
  require(k.size() >= 3, "rate_fit: too few points after dropping the transient");
  const LineFit geo = least_squares(k, logs);
  const LineFit sub = least_squares(logk, logs);
  res.r2_geometric = geo.r2;
  res.r2_sublinear = sub.r2;
  res.rate = std::exp(geo.slope);
  res.exponent = sub.slope;
  // The better fit wins whether or not it clears the 0.99 threshold.
  if (geo.r2 >= sub.r2) {
    res.rate_class = RateClass::Geometric;
    res.fit_residual = 1.0 - geo.r2;
  } else {
    res.rate_class = RateClass::Sublinear;
    res.fit_residual = 1.0 - sub.r2;
  }
  return res;
}

std::vector<double> pairwise_max_envelope(const std::vector<double>& sequence) {
  std::vector<double> e;
  if (sequence.size() < 2) return e;
  e.reserve(sequence.size() - 1);
  for (std::size_t i = 0; i + 1 < sequence.size(); ++i) e.push_back(std::max(sequence[i], sequence[i + 1]));
  return e;
}

}  // namespace psgm
