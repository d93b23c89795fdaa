#pragma once

// Matrix CSV, PGM images and MovieLens rating files.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "core.hpp"
#include "problems.hpp"

namespace psgm {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& what);

void write_csv_matrix(std::ostream& out, const Matrix& m);
Matrix read_csv_matrix(std::istream& in);
void save_csv_matrix(const std::string& path, const Matrix& m);
Matrix load_csv_matrix(const std::string& path);

struct PgmImage {
  /// Pixels divided by maxval, so entries lie in [0, 1].
  Matrix pixels;
  unsigned maxval = 255;
};

/// Accepts P2 (ASCII) and P5 (binary; 16-bit big-endian when maxval > 255).
PgmImage read_pgm(std::istream& in);
void write_pgm(std::ostream& out, const PgmImage& image, bool binary = true);
PgmImage load_pgm(const std::string& path);
void save_pgm(const std::string& path, const PgmImage& image, bool binary = true);

struct Rating {
  std::size_t user;
  std::size_t item;
  double value;
};

struct RatingsData {
  std::vector<Rating> ratings;
  std::size_t users = 0;
  std::size_t items = 0;
  /// Lines that repeated an earlier (user, item) pair; the last one is kept.
  std::size_t duplicates = 0;
};

/// Tab-separated "user item rating timestamp" lines with 1-based ids.
RatingsData parse_movielens(std::istream& in);
RatingsData load_movielens(const std::string& path);

struct RatingsSplit {
  std::vector<Rating> train;
  std::vector<Rating> test;
};

/// Membership depends only on (seed, user, item), never on line order.
RatingsSplit split_ratings(const RatingsData& data, std::uint64_t seed, double test_fraction = 0.2);

/// Dense users x items data and mask matrices from a list of ratings.
std::pair<Matrix, Matrix> ratings_matrix(const std::vector<Rating>& ratings, std::size_t users,
                                         std::size_t items);

}  // namespace psgm
