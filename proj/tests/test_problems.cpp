#include <cmath>
#include <random>

#include "doctest.h"
#include "error.hpp"
#include "helpers.hpp"
#include "problems.hpp"

using namespace psgm;

TEST_CASE("builtin instances") {
  auto saddle = builtin_instance("saddle2d");
  CHECK(saddle.subgradient(Point(Vector{0, 0})).vector == Vector{0, 0});
  CHECK(saddle.value(Point(Vector{0, 1})) == 0.0);
  CHECK(saddle.distance(Point(Vector{0, 0})) == 1.0);

  auto para = builtin_instance("para1d");
  CHECK(para.value(Point(Vector{0})) == 1.0);
  CHECK(para.value(Point(Vector{1})) == 0.0);
  CHECK(para.value(Point(Vector{-1})) == 0.0);

  auto sharp = builtin_instance("sharp_norm", 7);
  CHECK(sharp.dimension == 7);
  REQUIRE(sharp.theory.has_value());
  CHECK(sharp.theory->rho() == 0.0);
  CHECK(sharp.theory->tau() == 1.0);

  CHECK_THROWS_AS(builtin_instance("nope"), Error);
  CHECK(builtin_names().size() == 4);
}

TEST_CASE("references attain f_star") {
  for (const auto& name : builtin_names()) {
    auto p = builtin_instance(name, 5);
    REQUIRE(p.reference.has_value());
    REQUIRE(p.f_star.has_value());
    for (const auto& r : p.reference->points) CHECK(std::abs(p.value(r) - *p.f_star) <= 1e-10);
  }
  auto inst = synth_phase(30, 4, 2);
  auto ph = phase_oracle(inst);
  CHECK(ph.value(Point(*inst.ground_truth)) <= 1e-10);
}

TEST_CASE("factorization oracle") {
  SUBCASE("exact factors give zero value and zero subgradient") {
    auto inst = synth_rmc(6, 5, 2, 1.0, 0.0, 0.0, 3);
    auto p = rmc_oracle(inst);
    // Recover exact factors with the rank-r SVD initializer.
    Point x = initialize_factors(inst.X, inst.M, 2, InitMethod::Svd, false, 0);
    CHECK(p.value(x) <= 1e-9);
    CHECK(relative_reconstruction_error(*inst.ground_truth, x, 2) <= 1e-10);
  }
  SUBCASE("value depends only on the product") {
    auto inst = synth_rmc(6, 5, 2, 0.8, 0.2, 1.0, 8);
    auto p = rmc_oracle(inst);
    std::mt19937_64 rng(1);
    Point x(psgm::testing::random_vector(p.dimension, rng));
    auto [U, V] = unpack_factors(x, 6, 5, 2);
    Matrix Q(2, 2), Qi(2, 2);
    Q(0, 0) = 2; Q(0, 1) = 1; Q(1, 0) = 0.5; Q(1, 1) = 3;
    const double det = 2 * 3 - 0.5;
    Qi(0, 0) = 3 / det; Qi(0, 1) = -1 / det; Qi(1, 0) = -0.5 / det; Qi(1, 1) = 2 / det;
    Point y = pack_factors(multiply(U, Q), multiply(Qi, V));
    CHECK(p.value(y) == doctest::Approx(p.value(x)).epsilon(1e-12));
  }
  SUBCASE("names, projections and flags") {
    auto inst = synth_rmc(6, 5, 2, 0.8, 0.0, 0.0, 8);
    CHECK(rmc_oracle(inst).name == "rmc");
    CHECK(rmc_oracle(inst).f_star == 0.0);
    CHECK_FALSE(rmc_oracle(inst).f_star_is_surrogate);
    inst.nonnegative = true;
    auto p = rmc_oracle(inst);
    CHECK(p.name == "rnmf");
    Point y = p.project(Point(Vector(p.dimension, -1.0)));
    for (double v : y.values()) CHECK(v == 0.0);
    auto noisy = synth_rmc(6, 5, 2, 0.8, 0.2, 1.0, 8);
    CHECK(rmc_oracle(noisy).f_star_is_surrogate);
  }
  SUBCASE("invalid instances") {
    RobustFactorizationInstance inst;
    inst.X = Matrix(2, 2, 1.0);
    inst.M = Matrix(2, 2, 0.5);
    CHECK_THROWS_AS(rmc_oracle(inst), Error);
    auto ok = synth_rmc(4, 4, 2, 1.0, 0, 0, 1);
    CHECK_THROWS_AS(rmc_oracle(ok).value(Point(Vector{1, 2, 3})), Error);
  }
}

TEST_CASE("phase oracle is even") {
  auto p = phase_oracle(synth_phase(20, 5, 4));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    Vector x = psgm::testing::random_vector(5, rng);
    Vector nx = x;
    for (double& v : nx) v = -v;
    CHECK(p.value(Point(x)) == p.value(Point(nx)));
  }
}

TEST_CASE("synthetic factorization data") {
  auto full = synth_rmc(8, 6, 2, 1.0, 0.0, 0.0, 2);
  for (double v : full.M.data) CHECK(v == 1.0);
  CHECK(full.X.data == full.ground_truth->data);
  CHECK(full.realizable);

  auto a = synth_rmc(20, 15, 3, 0.6, 0.1, 5.0, 11);
  auto b = synth_rmc(20, 15, 3, 0.6, 0.1, 5.0, 11);
  CHECK(a.X.data == b.X.data);
  CHECK(a.M.data == b.M.data);
  CHECK_FALSE(a.realizable);

  std::size_t observed = 0, outliers = 0;
  for (std::size_t i = 0; i < a.X.size(); ++i) {
    if (a.M.data[i] == 0.0) continue;
    ++observed;
    const double diff = a.X.data[i] - a.ground_truth->data[i];
    if (diff != 0.0) {
      ++outliers;
      CHECK(std::abs(std::abs(diff) - 5.0) <= 1e-12);
    }
  }
  CHECK(outliers == static_cast<std::size_t>(std::llround(0.1 * observed)));
}

TEST_CASE("factor initializers") {
  SUBCASE("rank-one data is recovered by svd") {
    Matrix X(5, 4);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 4; ++j) X(i, j) = (i + 1.0) * (j - 1.5);
    Point x = initialize_factors(X, Matrix(5, 4, 1.0), 1, InitMethod::Svd, false, 0);
    CHECK(relative_reconstruction_error(X, x, 1) <= 1e-10);
  }
  SUBCASE("nonnegative clamp and determinism") {
    auto inst = synth_rmc(10, 8, 3, 0.7, 0, 0, 5);
    for (auto method : {InitMethod::Svd, InitMethod::Random}) {
      Point x = initialize_factors(inst.X, inst.M, 3, method, true, 9);
      for (double v : x.values()) CHECK(v >= 0.0);
      CHECK(initialize_factors(inst.X, inst.M, 3, method, true, 9).values() == x.values());
    }
  }
  SUBCASE("nothing observed") {
    CHECK_THROWS_AS(initialize_factors(Matrix(3, 3, 1.0), Matrix(3, 3, 0.0), 1, InitMethod::Random, false, 0),
                    Error);
  }
}

TEST_CASE("packing round-trips") {
  std::mt19937_64 rng(6);
  Point x(psgm::testing::random_vector(3 * 2 + 2 * 4, rng));
  auto [U, V] = unpack_factors(x, 3, 4, 2);
  CHECK(U.rows == 3);
  CHECK(V.cols == 4);
  CHECK(pack_factors(U, V).values() == x.values());
  CHECK_THROWS_AS(unpack_factors(x, 3, 4, 3), Error);
}
