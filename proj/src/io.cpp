#include "io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "error.hpp"

namespace psgm {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream f(path, mode);
  if (!f) fail(ErrorCode::kIo, "cannot open " + path);
  return f;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream f(path, mode);
  if (!f) fail(ErrorCode::kIo, "cannot write " + path);
  return f;
}

// Next whitespace-separated header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) fail(ErrorCode::kParse, "pgm: truncated header");
  return tok;
}

unsigned long pgm_number(std::istream& in, const char* what) {
  const std::string tok = pgm_token(in);
  unsigned long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) fail(ErrorCode::kParse, std::string("pgm: bad ") + what);
  return v;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) fail(ErrorCode::kNumeric, "cannot format number");
  return std::string(buf, p);
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size())
    fail(ErrorCode::kParse, what + ": not a number: '" + t + "'");
  return v;
}

void write_csv_matrix(std::ostream& out, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

Matrix read_csv_matrix(std::istream& in) {
  Matrix m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell, "csv line " + std::to_string(lineno)));
    if (m.rows == 0) m.cols = row.size();
    if (row.size() != m.cols)
      fail(ErrorCode::kParse, "csv line " + std::to_string(lineno) + ": expected " + std::to_string(m.cols) + " columns");
    m.data.insert(m.data.end(), row.begin(), row.end());
    ++m.rows;
  }
  if (m.rows == 0) fail(ErrorCode::kParse, "csv: no rows");
  return m;
}

void save_csv_matrix(const std::string& path, const Matrix& m) {
  auto f = open_out(path);
  write_csv_matrix(f, m);
  if (!f) fail(ErrorCode::kIo, "write failed: " + path);
}

Matrix load_csv_matrix(const std::string& path) {
  auto f = open_in(path);
  return read_csv_matrix(f);
}

PgmImage read_pgm(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (in.gcount() != 2 || magic[0] != 'P') fail(ErrorCode::kParse, "pgm: bad magic");
  if (magic[1] != '2' && magic[1] != '5')
    fail(ErrorCode::kUnsupported, std::string("unsupported format: P") + magic[1]);
  const bool binary = magic[1] == '5';
  const auto width = pgm_number(in, "width");
  const auto height = pgm_number(in, "height");
  const auto maxval = pgm_number(in, "maxval");
  if (width == 0 || height == 0) fail(ErrorCode::kParse, "pgm: empty image");
  if (maxval == 0 || maxval > 65535) fail(ErrorCode::kParse, "pgm: maxval must lie in [1, 65535]");

  PgmImage img;
  img.maxval = static_cast<unsigned>(maxval);
  img.pixels = Matrix(height, width);
  const double scale = static_cast<double>(maxval);
  const std::size_t count = width * height;
  if (binary) {
    // pgm_token consumed exactly one whitespace byte after maxval.
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(count * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) fail(ErrorCode::kParse, "pgm: truncated payload");
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned v = bytes == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
      if (v > maxval) fail(ErrorCode::kParse, "pgm: pixel exceeds maxval");
      img.pixels.data[i] = v / scale;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      unsigned long v = 0;
      if (!(in >> v)) fail(ErrorCode::kParse, "pgm: truncated payload");
      if (v > maxval) fail(ErrorCode::kParse, "pgm: pixel exceeds maxval");
      img.pixels.data[i] = static_cast<double>(v) / scale;
    }
  }
  return img;
}

void write_pgm(std::ostream& out, const PgmImage& image, bool binary) {
  require(image.maxval >= 1 && image.maxval <= 65535, "pgm: maxval must lie in [1, 65535]");
  require(image.pixels.rows > 0 && image.pixels.cols > 0, "pgm: empty image");
  const double scale = image.maxval;
  auto raw = [&](double v) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<unsigned>(std::lround(c * scale));
  };
  out << (binary ? "P5" : "P2") << '\n' << image.pixels.cols << ' ' << image.pixels.rows << '\n' << image.maxval << '\n';
  if (binary) {
    for (double v : image.pixels.data) {
      const unsigned p = raw(v);
      if (image.maxval > 255) out.put(static_cast<char>(p >> 8));
      out.put(static_cast<char>(p & 0xff));
    }
  } else {
    for (std::size_t i = 0; i < image.pixels.rows; ++i) {
      for (std::size_t j = 0; j < image.pixels.cols; ++j) out << (j ? " " : "") << raw(image.pixels(i, j));
      out << '\n';
    }
  }
}

PgmImage load_pgm(const std::string& path) {
  auto f = open_in(path, std::ios::in | std::ios::binary);
  return read_pgm(f);
}

void save_pgm(const std::string& path, const PgmImage& image, bool binary) {
  auto f = open_out(path, std::ios::out | std::ios::binary);
  write_pgm(f, image, binary);
  if (!f) fail(ErrorCode::kIo, "write failed: " + path);
}

RatingsData parse_movielens(std::istream& in) {
  RatingsData data;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    if (fields.size() != 4) fail(ErrorCode::kParse, where + ": expected 4 tab-separated fields");
    auto id = [&](const std::string& s, const char* name) {
      std::size_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size() || v == 0)
        fail(ErrorCode::kParse, where + ": bad " + name + " id '" + s + "'");
      return v - 1;
    };
    const std::size_t user = id(fields[0], "user");
    const std::size_t item = id(fields[1], "item");
    const double value = parse_double(fields[2], where + ": rating");
    if (!std::isfinite(value)) fail(ErrorCode::kParse, where + ": rating is not finite");
    parse_double(fields[3], where + ": timestamp");

    auto [it, inserted] = seen.try_emplace({user, item}, data.ratings.size());
    if (inserted) {
      data.ratings.push_back({user, item, value});
    } else {
      data.ratings[it->second].value = value;
      ++data.duplicates;
    }
    data.users = std::max(data.users, user + 1);
    data.items = std::max(data.items, item + 1);
  }
  if (data.ratings.empty()) fail(ErrorCode::kParse, "no ratings");
  return data;
}

RatingsData load_movielens(const std::string& path) {
  auto f = open_in(path);
  return parse_movielens(f);
}

RatingsSplit split_ratings(const RatingsData& data, std::uint64_t seed, double test_fraction) {
  require(test_fraction >= 0.0 && test_fraction <= 1.0, "split: test_fraction must lie in [0,1]");
  RatingsSplit split;
  for (const Rating& r : data.ratings) {
    const std::uint64_t h =
        splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(r.user)) ^ static_cast<std::uint64_t>(r.item));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    (u < test_fraction ? split.test : split.train).push_back(r);
  }
  return split;
}

std::pair<Matrix, Matrix> ratings_matrix(const std::vector<Rating>& ratings, std::size_t users, std::size_t items) {
  require(users > 0 && items > 0, "ratings_matrix: empty shape");
  Matrix X(users, items), M(users, items);
  for (const Rating& r : ratings) {
    require(r.user < users && r.item < items, "ratings_matrix: id outside the shape");
    X(r.user, r.item) = r.value;
    M(r.user, r.item) = 1.0;
  }
  return {std::move(X), std::move(M)};
}

}  // namespace psgm
