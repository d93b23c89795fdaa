// Drives the installed-style binary end to end.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string output;
};

Result run_cli(const std::string& args) {
  const std::string cmd = std::string(PSGM_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("psgm_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::map<std::string, std::string> read_kv(const fs::path& p) {
  std::map<std::string, std::string> kv;
  std::ifstream f(p);
  std::string line;
  while (std::getline(f, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("solve with flags") {
  auto dir = fresh_dir("solve");
  auto r = run_cli("solve --problem sharp_norm --rule scaled_polyak --sigma 4 --f-target 0 --max-iter 30 --out " +
                   dir.string());
  CHECK(r.code == 0);
  std::ifstream f(dir / "history.csv");
  std::string header;
  std::getline(f, header);
  CHECK(header == "k,f,f_best,alpha,grad_norm,dist");
  std::size_t rows = 0;
  for (std::string line; std::getline(f, line);) ++rows;
  CHECK(rows == 31);
  CHECK(read_kv(dir / "summary.txt")["rule"] == "scaled_polyak");
}

TEST_CASE("config file plus overrides") {
  auto dir = fresh_dir("config");
  {
    std::ofstream(dir / "run.cfg") << "problem = para1d\nrule = constant\nalpha = 0.01\npairs = 300\n";
  }
  auto r = run_cli("certify --config " + (dir / "run.cfg").string() + " --seed 3 --set pairs=200 --out " +
                   dir.string());
  CHECK(r.code == 0);
  auto kv = read_kv(dir / "report.txt");
  CHECK(kv.count("rho_hat") == 1);
  CHECK(kv.count("tube_radius") == 1);
  CHECK(kv["pairs"] == "200");
}

TEST_CASE("bench and recover") {
  auto dir = fresh_dir("bench");
  auto r = run_cli("bench --problem synth_rmc --set m=15 --set n=12 --rank 2 --max-iter 100 --out " + dir.string());
  CHECK(r.code == 0);
  std::ifstream f(dir / "comparison.csv");
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(count_lines(ss.str()) == 5);

  auto rec = run_cli("recover --problem synth_rmc --set m=15 --set n=12 --rank 2 --max-iter 200 --out " + dir.string());
  CHECK(rec.code == 0);
  CHECK(read_kv(dir / "recovery.txt").count("relative_error") == 1);
}

TEST_CASE("failures print one machine-parsable line and exit nonzero") {
  auto dir = fresh_dir("errors");
  auto unknown = run_cli("solve --problem bogus --out " + dir.string());
  CHECK(unknown.code != 0);
  CHECK(count_lines(unknown.output) == 1);
  CHECK(unknown.output.rfind("error: invalid_argument: config field 'problem'", 0) == 0);

  auto missing = run_cli("recover --problem csv --data /nonexistent.csv --out " + dir.string());
  CHECK(missing.code != 0);
  CHECK(count_lines(missing.output) == 1);
  CHECK(missing.output.find("config field 'data'") != std::string::npos);

  auto badcfg = run_cli("solve --config " + (dir / "absent.cfg").string());
  CHECK(badcfg.code != 0);
  CHECK(count_lines(badcfg.output) == 1);

  auto usage = run_cli("frobnicate");
  CHECK(usage.code == 2);

  auto badset = run_cli("solve --set noequals --out " + dir.string());
  CHECK(badset.code != 0);
  CHECK(count_lines(badset.output) == 1);
}
