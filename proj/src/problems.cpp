#include "problems.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "error.hpp"

namespace psgm {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap view(const Matrix& m) { return ConstMap(m.data.data(), m.rows, m.cols); }

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

ReferenceSet single_reference(Vector v) {
  ReferenceSet refs;
  refs.points.emplace_back(std::move(v));
  return refs;
}

ProblemInstance sharp_norm(std::size_t n) {
  require(n >= 1, "sharp_norm: dimension must be positive");
  ProblemInstance p;
  p.name = "sharp_norm";
  p.dimension = n;
  p.value = [](const Point& x) { return norm2(x.span()); };
  p.subgradient = [](const Point& x) {
    const double nx = norm2(x.span());
    Vector g(x.size(), 0.0);
    if (nx > 0.0)
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = x[i] / nx;
    return SubgradientSample::from(std::move(g));
  };
  p.project = projection::identity();
  p.reference = single_reference(Vector(n, 0.0));
  p.f_star = 0.0;
  p.theory = TheoryConstants(1.0, 0.0, 1.0, 1.0, 1.0);
  p.theory_note = "exact";
  return p;
}

ProblemInstance quadratic_norm(std::size_t n) {
  require(n >= 1, "quadratic_norm: dimension must be positive");
  ProblemInstance p;
  p.name = "quadratic_norm";
  p.dimension = n;
  p.value = [](const Point& x) {
    double s = 0.0;
    for (double v : x.values()) s += v * v;
    return s;
  };
  p.subgradient = [](const Point& x) {
    Vector g(x.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * x[i];
    return SubgradientSample::from(std::move(g));
  };
  p.hessian = [n](const Point&) {
    Vector h(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 2.0;
    return h;
  };
  p.project = projection::identity();
  p.reference = single_reference(Vector(n, 0.0));
  p.f_star = 0.0;
  // Quadratic growth (delta = 1/2) is outside delta(1+nu) > 1 for every nu.
  p.theory_note = "none: quadratic growth";
  return p;
}

ProblemInstance para1d() {
  ProblemInstance p;
  p.name = "para1d";
  p.dimension = 1;
  p.value = [](const Point& x) {
    const double t = x[0];
    return std::abs(t) <= 1.0 ? 1.0 - std::pow(std::abs(t), 1.5) : t * t - 1.0;
  };
  p.subgradient = [](const Point& x) {
    const double t = x[0];
    const double a = std::abs(t);
    double g = 0.0;  // minimal-norm element at the kinks t = +-1
    if (a < 1.0) g = -1.5 * std::sqrt(a) * sign(t);
    else if (a > 1.0) g = 2.0 * t;
    return SubgradientSample::from(Vector{g});
  };
  p.project = projection::identity();
  ReferenceSet refs;
  refs.points = {Point(Vector{-1.0}), Point(Vector{1.0})};
  p.reference = refs;
  p.f_star = 0.0;
  // rho = 1.31 covers the first-order ratio, whose supremum is about 1.3066
  // (dense grid); the midpoint form needs only 1/sqrt(2). mu = 1 is the
  // global sharpness modulus and L = 4 bounds |h'| on |x| < 2.
  p.theory = TheoryConstants(0.5, 1.31, 1.0, 1.0, 4.0);
  p.theory_note = "nominal";
  return p;
}

ProblemInstance saddle2d() {
  ProblemInstance p;
  p.name = "saddle2d";
  p.dimension = 2;
  p.value = [](const Point& x) {
    const double s = x[1] * x[1] - 1.0;
    return x[0] * x[0] + s * s;
  };
  p.subgradient = [](const Point& x) {
    return SubgradientSample::from(Vector{2.0 * x[0], 4.0 * x[1] * (x[1] * x[1] - 1.0)});
  };
  p.hessian = [](const Point& x) { return Vector{2.0, 0.0, 0.0, 12.0 * x[1] * x[1] - 4.0}; };
  p.project = projection::identity();
  ReferenceSet refs;
  refs.points = {Point(Vector{0.0, 1.0}), Point(Vector{0.0, -1.0})};
  p.reference = refs;
  p.f_star = 0.0;
  p.theory_note = "none: quadratic growth at the minima";
  return p;
}

}  // namespace

void RobustFactorizationInstance::validate() const {
  require(X.rows > 0 && X.cols > 0, "factorization: data matrix is empty");
  require(X.same_shape(M), "factorization: mask shape differs from data");
  require(rank >= 1 && rank <= std::min(X.rows, X.cols), "factorization: rank must satisfy 1 <= r <= min(m,n)");
  for (std::size_t i = 0; i < M.size(); ++i) {
    require(M.data[i] == 0.0 || M.data[i] == 1.0, "factorization: mask entries must be 0 or 1");
    if (M.data[i] == 1.0) require(std::isfinite(X.data[i]), "factorization: observed data entry is not finite");
  }
  if (ground_truth) require(ground_truth->same_shape(X), "factorization: ground truth shape differs from data");
}

void PhaseRetrievalInstance::validate() const {
  require(A.rows > 0 && A.cols > 0, "phase retrieval: empty measurement matrix");
  require(b.size() == A.rows, "phase retrieval: b length must equal the number of rows of A");
  for (double v : b) require(std::isfinite(v) && v >= 0.0, "phase retrieval: b must be nonnegative");
  if (ground_truth) require(ground_truth->size() == A.cols, "phase retrieval: ground truth dimension mismatch");
}

std::pair<Matrix, Matrix> unpack_factors(const Point& x, std::size_t m, std::size_t n, std::size_t r) {
  std::ostringstream os;
  os << "dimension mismatch: expected U " << m << "x" << r << " and V " << r << "x" << n;
  require(x.size() == (m + n) * r, os.str());
  Matrix U(m, r), V(r, n);
  std::copy(x.values().begin(), x.values().begin() + m * r, U.data.begin());
  std::copy(x.values().begin() + m * r, x.values().end(), V.data.begin());
  return {std::move(U), std::move(V)};
}

Point pack_factors(const Matrix& U, const Matrix& V) {
  require(U.cols == V.rows, "pack_factors: inner dimensions differ");
  Vector v;
  v.reserve(U.size() + V.size());
  v.insert(v.end(), U.data.begin(), U.data.end());
  v.insert(v.end(), V.data.begin(), V.data.end());
  return Point(std::move(v));
}

Matrix multiply(const Matrix& A, const Matrix& B) {
  require(A.cols == B.rows, "multiply: inner dimensions differ");
  Matrix C(A.rows, B.cols);
  MutMap(C.data.data(), C.rows, C.cols).noalias() = view(A) * view(B);
  return C;
}

double relative_reconstruction_error(const Matrix& truth, const Point& x, std::size_t r) {
  auto [U, V] = unpack_factors(x, truth.rows, truth.cols, r);
  const double denom = view(truth).norm();
  require(denom > 0.0, "relative error: truth has zero norm");
  return (view(truth) - view(U) * view(V)).norm() / denom;
}

ProblemInstance rmc_oracle(const RobustFactorizationInstance& inst) {
  inst.validate();
  const std::size_t m = inst.X.rows, n = inst.X.cols, r = inst.rank;
  auto X = std::make_shared<const Matrix>(inst.X);
  auto M = std::make_shared<const Matrix>(inst.M);

  ProblemInstance p;
  p.name = inst.nonnegative ? "rnmf" : "rmc";
  p.dimension = (m + n) * r;
  p.value = [X, M, m, n, r](const Point& x) {
    auto [U, V] = unpack_factors(x, m, n, r);
    RowMajor R = view(U) * view(V) - view(*X);
    return 0.5 * (view(*M).array() * R.array().abs()).sum();
  };
  p.subgradient = [X, M, m, n, r](const Point& x) {
    auto [U, V] = unpack_factors(x, m, n, r);
    RowMajor R = view(U) * view(V) - view(*X);
    RowMajor S = view(*M).array() * R.array().unaryExpr([](double v) { return sign(v); });
    Vector g((m + n) * r);
    MutMap(g.data(), m, r).noalias() = 0.5 * S * view(V).transpose();
    MutMap(g.data() + m * r, r, n).noalias() = 0.5 * view(U).transpose() * S;
    return SubgradientSample::from(std::move(g));
  };
  p.project = inst.nonnegative ? projection::nonnegative() : projection::identity();
  if (inst.ground_truth) {
    auto truth = std::make_shared<const Matrix>(*inst.ground_truth);
    p.distance_surrogate = [truth, r](const Point& x) { return relative_reconstruction_error(*truth, x, r); };
  }
  p.f_star = 0.0;
  p.f_star_is_surrogate = !inst.realizable;
  p.theory_note = "local, bounded-set";
  return p;
}

ProblemInstance phase_oracle(const PhaseRetrievalInstance& inst) {
  inst.validate();
  auto A = std::make_shared<const Matrix>(inst.A);
  auto b = std::make_shared<const Vector>(inst.b);
  const std::size_t m = inst.A.rows, n = inst.A.cols;

  ProblemInstance p;
  p.name = "phase";
  p.dimension = n;
  auto inner = [A, n](const Point& x, std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += (*A)(i, j) * x[j];
    return s;
  };
  p.value = [inner, b, m, n](const Point& x) {
    require(x.size() == n, "phase retrieval: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double ax = inner(x, i);
      s += std::abs(ax * ax - (*b)[i]);
    }
    return s / static_cast<double>(m);
  };
  p.subgradient = [inner, A, b, m, n](const Point& x) {
    require(x.size() == n, "phase retrieval: dimension mismatch");
    Vector g(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double ax = inner(x, i);
      const double w = 2.0 * sign(ax * ax - (*b)[i]) * ax / static_cast<double>(m);
      if (w == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) g[j] += w * (*A)(i, j);
    }
    return SubgradientSample::from(std::move(g));
  };
  p.project = projection::identity();
  if (inst.ground_truth) {
    ReferenceSet refs = single_reference(*inst.ground_truth);
    refs.sign_symmetric = true;
    p.reference = refs;
    p.f_star = 0.0;
  }
  p.theory_note = "local, statistical conditions";
  return p;
}

std::vector<std::string> builtin_names() { return {"para1d", "saddle2d", "sharp_norm", "quadratic_norm"}; }

ProblemInstance builtin_instance(const std::string& name, std::size_t dimension) {
  if (name == "para1d") return para1d();
  if (name == "saddle2d") return saddle2d();
  if (name == "sharp_norm") return sharp_norm(dimension);
  if (name == "quadratic_norm") return quadratic_norm(dimension);
  fail(ErrorCode::kInvalidArgument, "unknown builtin problem: " + name);
}

RobustFactorizationInstance synth_rmc(std::size_t m, std::size_t n, std::size_t r, double observed_fraction,
                                      double outlier_fraction, double outlier_scale, std::uint64_t seed) {
  require(observed_fraction >= 0.0 && observed_fraction <= 1.0, "synth_rmc: observed_fraction must lie in [0,1]");
  require(outlier_fraction >= 0.0 && outlier_fraction <= 1.0, "synth_rmc: outlier_fraction must lie in [0,1]");
  require(std::isfinite(outlier_scale) && outlier_scale >= 0.0, "synth_rmc: outlier_scale must be nonnegative");
  require(m > 0 && n > 0 && r >= 1 && r <= std::min(m, n), "synth_rmc: need 1 <= r <= min(m,n)");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Matrix U0(m, r), V0(r, n);
  for (double& v : U0.data) v = normal(rng);
  for (double& v : V0.data) v = normal(rng);
  Matrix X0 = multiply(U0, V0);

  RobustFactorizationInstance inst;
  inst.rank = r;
  inst.M = Matrix(m, n);
  inst.X = Matrix(m, n);
  std::vector<std::size_t> observed;
  for (std::size_t i = 0; i < m * n; ++i) {
    if (unit(rng) < observed_fraction) {
      inst.M.data[i] = 1.0;
      inst.X.data[i] = X0.data[i];
      observed.push_back(i);
    }
  }
  const auto n_out = static_cast<std::size_t>(std::llround(outlier_fraction * static_cast<double>(observed.size())));
  // Partial Fisher-Yates: the first n_out slots are a uniform sample.
  for (std::size_t i = 0; i < n_out; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, observed.size() - 1);
    std::swap(observed[i], observed[pick(rng)]);
    const double s = unit(rng) < 0.5 ? -1.0 : 1.0;
    inst.X.data[observed[i]] += s * outlier_scale;
  }
  inst.realizable = n_out == 0 || outlier_scale == 0.0;
  inst.ground_truth = std::move(X0);
  return inst;
}

PhaseRetrievalInstance synth_phase(std::size_t m, std::size_t n, std::uint64_t seed) {
  require(m > 0 && n > 0, "synth_phase: dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PhaseRetrievalInstance inst;
  inst.A = Matrix(m, n);
  for (double& v : inst.A.data) v = normal(rng);
  Vector x(n);
  for (double& v : x) v = normal(rng);
  inst.b.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += inst.A(i, j) * x[j];
    inst.b[i] = s * s;
  }
  inst.ground_truth = std::move(x);
  return inst;
}

Point initialize_factors(const Matrix& X, const Matrix& M, std::size_t r, InitMethod method, bool nonnegative,
                         std::uint64_t seed) {
  require(X.same_shape(M), "initialize_factors: mask shape differs from data");
  const std::size_t m = X.rows, n = X.cols;
  require(r >= 1 && r <= std::min(m, n), "initialize_factors: need 1 <= r <= min(m,n)");

  double sum = 0.0, abs_sum = 0.0, count = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (M.data[i] != 0.0) {
      sum += X.data[i];
      abs_sum += std::abs(X.data[i]);
      count += 1.0;
    }
  }
  require(count > 0.0, "initialize_factors: no observed entries");
  const double mean = sum / count;

  Matrix U(m, r), V(r, n);
  if (method == InitMethod::Svd) {
    RowMajor filled(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) filled(i, j) = M(i, j) != 0.0 ? X(i, j) : mean;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(filled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd root = svd.singularValues().head(r).cwiseSqrt();
    MutMap(U.data.data(), m, r) = svd.matrixU().leftCols(r) * root.asDiagonal();
    MutMap(V.data.data(), r, n) = root.asDiagonal() * svd.matrixV().leftCols(r).transpose();
  } else {
    // mean |X| rather than mean X so that signed data gets a usable scale.
    double scale = std::sqrt(abs_sum / count / static_cast<double>(r));
    if (!(scale > 0.0)) scale = 1.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double& v : U.data) v = unit(rng) * scale;
    for (double& v : V.data) v = unit(rng) * scale;
  }
  if (nonnegative) {
    for (double& v : U.data) v = std::max(v, 0.0);
    for (double& v : V.data) v = std::max(v, 0.0);
  }
  return pack_factors(U, V);
}

}  // namespace psgm
