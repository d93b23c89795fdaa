#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "error.hpp"
#include "io.hpp"

using namespace psgm;

namespace {
ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}
}  // namespace

TEST_CASE("shortest round-trip number format") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(3.0) == "3");
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    CHECK(parse_double(format_double(v), "x") == v);
  }
  CHECK(code_of([] { parse_double("1.5x", "field"); }) == ErrorCode::kParse);
}

TEST_CASE("csv matrices round-trip bit-exactly") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0, 1e3);
  Matrix m(7, 5);
  for (double& v : m.data) v = g(rng);
  m(0, 0) = std::numeric_limits<double>::denorm_min();
  m(1, 1) = -0.0;
  std::stringstream ss;
  write_csv_matrix(ss, m);
  Matrix back = read_csv_matrix(ss);
  REQUIRE(back.same_shape(m));
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::memcmp(&back.data[i], &m.data[i], sizeof(double)) == 0);

  std::stringstream ragged("1,2\n3\n");
  CHECK(message_of([&] { read_csv_matrix(ragged); }).find("line 2") != std::string::npos);
  std::stringstream empty("");
  CHECK(code_of([&] { read_csv_matrix(empty); }) == ErrorCode::kParse);
  CHECK(code_of([] { load_csv_matrix("/nonexistent/x.csv"); }) == ErrorCode::kIo);
}

TEST_CASE("pgm images") {
  std::stringstream p2("P2\n# comment\n2 2\n255\n0 255\n255 0\n");
  auto img = read_pgm(p2);
  CHECK(img.maxval == 255);
  CHECK(img.pixels.data == Vector{0, 1, 1, 0});

  for (unsigned maxval : {255u, 1000u}) {
    PgmImage src;
    src.maxval = maxval;
    src.pixels = Matrix(3, 4);
    for (std::size_t i = 0; i < 12; ++i) src.pixels.data[i] = static_cast<double>((i * 37) % (maxval + 1)) / maxval;
    for (bool binary : {true, false}) {
      std::stringstream ss;
      write_pgm(ss, src, binary);
      auto once = read_pgm(ss);
      std::stringstream ss2;
      write_pgm(ss2, once, binary);
      auto twice = read_pgm(ss2);
      CHECK(once.pixels.data == src.pixels.data);
      CHECK(twice.pixels.data == once.pixels.data);
      CHECK(twice.maxval == maxval);
    }
  }

  std::stringstream p3("P3\n1 1\n255\n0 0 0\n");
  CHECK(code_of([&] { read_pgm(p3); }) == ErrorCode::kUnsupported);
  std::stringstream p3b("P3\n1 1\n255\n0 0 0\n");
  CHECK(message_of([&] { read_pgm(p3b); }) == "unsupported format: P3");
  std::stringstream bad("XX\n");
  CHECK(code_of([&] { read_pgm(bad); }) == ErrorCode::kParse);
  std::stringstream truncated("P5\n4 4\n255\nab");
  CHECK(message_of([&] { read_pgm(truncated); }) == "pgm: truncated payload");
  std::stringstream short_ascii("P2\n2 2\n255\n1 2 3\n");
  CHECK(code_of([&] { read_pgm(short_ascii); }) == ErrorCode::kParse);

  SUBCASE("files") {
    auto path = (std::filesystem::temp_directory_path() / "psgm_test_io.pgm").string();
    save_pgm(path, img);
    CHECK(load_pgm(path).pixels.data == img.pixels.data);
    std::filesystem::remove(path);
  }
}

TEST_CASE("movielens parsing") {
  std::stringstream one("196\t242\t3\t881250949\n");
  auto d = parse_movielens(one);
  REQUIRE(d.ratings.size() == 1);
  CHECK(d.ratings[0].user == 195);
  CHECK(d.ratings[0].item == 241);
  CHECK(d.ratings[0].value == 3.0);
  CHECK(d.users == 196);
  CHECK(d.items == 242);

  std::stringstream empty("");
  CHECK(message_of([&] { parse_movielens(empty); }) == "no ratings");

  std::stringstream dup("1\t1\t3\t0\n2\t1\t4\t0\n1\t1\t5\t0\n");
  auto dd = parse_movielens(dup);
  CHECK(dd.ratings.size() == 2);
  CHECK(dd.duplicates == 1);
  CHECK(dd.ratings[0].value == 5.0);

  std::stringstream bad("1\t1\t3\t0\n1\t2\t3\n");
  CHECK(message_of([&] { parse_movielens(bad); }).rfind("line 2:", 0) == 0);
  std::stringstream badid("1\t1\t3\t0\n\n0\t2\t3\t0\n");
  CHECK(message_of([&] { parse_movielens(badid); }).rfind("line 3:", 0) == 0);
  std::stringstream badval("1\t1\tfive\t0\n");
  CHECK(code_of([&] { parse_movielens(badval); }) == ErrorCode::kParse);
}

TEST_CASE("rating splits depend only on seed and ids") {
  RatingsData d;
  for (std::size_t u = 0; u < 40; ++u)
    for (std::size_t i = 0; i < 25; ++i) d.ratings.push_back({u, i, 1.0 + (u + i) % 5});
  d.users = 40;
  d.items = 25;
  auto a = split_ratings(d, 7);
  auto b = split_ratings(d, 7);
  REQUIRE(a.test.size() == b.test.size());
  for (std::size_t i = 0; i < a.test.size(); ++i) {
    CHECK(a.test[i].user == b.test[i].user);
    CHECK(a.test[i].item == b.test[i].item);
  }
  CHECK(a.train.size() + a.test.size() == 1000);
  CHECK(std::abs(static_cast<double>(a.test.size()) / 1000.0 - 0.2) < 0.05);

  RatingsData rev = d;
  std::reverse(rev.ratings.begin(), rev.ratings.end());
  auto c = split_ratings(rev, 7);
  CHECK(c.test.size() == a.test.size());
  auto other = split_ratings(d, 8);
  bool differs = other.test.size() != a.test.size();
  for (std::size_t i = 0; !differs && i < a.test.size(); ++i)
    differs = other.test[i].user != a.test[i].user || other.test[i].item != a.test[i].item;
  CHECK(differs);

  auto [X, M] = ratings_matrix(a.train, 40, 25);
  double observed = 0;
  for (double v : M.data) observed += v;
  CHECK(observed == a.train.size());
}
