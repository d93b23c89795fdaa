#include "execute.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include "error.hpp"
#include "metrics.hpp"
#include "paracheck.hpp"
#include "schedule.hpp"
#include "solver.hpp"

namespace psgm {
namespace {

namespace fs = std::filesystem;

// Key=value report writer; numbers use the shortest round-trip form.
class Report {
 public:
  void add(const std::string& key, const std::string& value) { os_ << key << '=' << value << '\n'; }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
  void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }
  void raw(const std::string& text) { os_ << text; }

  void save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) fail(ErrorCode::kIo, "cannot write " + path);
    f << os_.str();
    if (!f) fail(ErrorCode::kIo, "write failed: " + path);
  }

 private:
  std::ostringstream os_;
};

std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory " + cfg.out + ": " + ec.message());
  return (fs::path(cfg.out) / name).string();
}

Vector random_direction(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(n);
  double s = 0.0;
  do {
    for (double& v : u) v = normal(rng);
    s = norm2(u);
  } while (s == 0.0);
  for (double& v : u) v /= s;
  return u;
}

PreparedProblem factorization_problem(RobustFactorizationInstance inst, const RunConfig& cfg) {
  inst.nonnegative = cfg.nonnegative;
  inst.rank = cfg.rank;
  inst.validate();
  PreparedProblem p;
  p.max_value = 0.0;
  p.problem = rmc_oracle(inst);
  p.x0 = initialize_factors(inst.X, inst.M, inst.rank, cfg.init == "svd" ? InitMethod::Svd : InitMethod::Random,
                            inst.nonnegative, cfg.seed);
  if (inst.ground_truth)
    for (double v : inst.ground_truth->data) p.max_value = std::max(p.max_value, std::abs(v));
  if (!(p.max_value > 0.0)) p.max_value = 1.0;
  p.factorization = std::move(inst);
  return p;
}

Matrix hide_entries(const Matrix& shape, double fraction, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix M(shape.rows, shape.cols, 1.0);
  for (double& v : M.data)
    if (unit(rng) < fraction) v = 0.0;
  return M;
}

void add_history_summary(Report& rep, const RunHistory& h) {
  const IterateRecord& last = h.records.back();
  rep.add("termination", std::string(to_string(h.termination)));
  rep.add("iterations", last.k);
  rep.add("f_final", last.f_value);
  rep.add("f_best", last.f_best);
  rep.add("grad_norm_final", last.grad_norm);
  if (last.dist) rep.add("dist_final", *last.dist);
  rep.add("surrogate_target", h.surrogate_target);
}

void add_certificate(Report& rep, const PreparedProblem& p, const RunConfig& cfg) {
  if (!p.problem.theory) {
    rep.add("certificate", std::string("none"));
    return;
  }
  try {
    const double dist0 = p.problem.has_distance() ? p.problem.distance(p.x0) : 0.0;
    rep.raw(describe(rate_certificate(cfg.step_rule(), *p.problem.theory, cfg.gamma, dist0)));
  } catch (const Error& e) {
    rep.add("certificate_error", std::string(e.what()));
  }
}

std::vector<std::string> run_solve(const RunConfig& cfg) {
  const PreparedProblem p = prepare_problem(cfg);
  const RunHistory h = run(p.problem, cfg.step_rule(), cfg.solver_config(), p.x0);
  std::vector<std::string> written;
  written.push_back(out_path(cfg, "history.csv"));
  write_history_csv(written.back(), h);

  Report rep;
  rep.add("command", std::string("solve"));
  rep.add("problem", p.problem.name);
  rep.add("rule", cfg.step_rule().name());
  rep.add("seed", static_cast<std::size_t>(cfg.seed));
  add_history_summary(rep, h);
  if (!p.problem.theory_note.empty()) rep.add("theory", p.problem.theory_note);
  add_certificate(rep, p, cfg);
  if (cfg.audit) {
    const AuditReport a = audit(h, p.problem);
    rep.add("audit_pass", a.pass());
    rep.add("audit_L", a.L_used);
    rep.add("audit_empirical_L", a.empirical_L);
    rep.add("audit_iterations", a.audited_iterations);
    for (const auto& c : a.checks) {
      rep.add("audit_" + c.name + "_max_violation", c.max_violation);
      rep.add("audit_" + c.name + "_pass", c.pass);
    }
  }
  written.push_back(out_path(cfg, "summary.txt"));
  rep.save(written.back());
  return written;
}

std::vector<std::string> run_certify(const RunConfig& cfg) {
  const PreparedProblem p = prepare_problem(cfg);
  const ProblemInstance& prob = p.problem;
  const double nu = cfg.nu ? *cfg.nu : (prob.theory ? prob.theory->nu() : 1.0);
  const SamplingDomain domain = SamplingDomain::cube(prob.dimension, cfg.domain_lo, cfg.domain_hi, cfg.pairs, cfg.seed);

  const ParaEstimate mid = midpoint_rho(prob.value, domain, nu);
  const ParaEstimate sub = subgradient_rho(prob.value, prob.subgradient, domain, nu);
  const double rho_hat = std::max(mid.rho_hat, sub.rho_hat);

  Report rep;
  rep.add("command", std::string("certify"));
  rep.add("problem", prob.name);
  rep.add("nu", nu);
  rep.add("pairs", cfg.pairs);
  rep.add("domain_lo", cfg.domain_lo);
  rep.add("domain_hi", cfg.domain_hi);
  rep.add("rho_hat_midpoint", mid.rho_hat);
  rep.add("rho_hat_subgradient", sub.rho_hat);
  rep.add("rho_hat", rho_hat);
  rep.add("note", std::string("sampled lower bounds; no violation beyond rho_hat found"));

  // The first-order characterization implies the monotonicity one with C = 2 rho.
  const CriterionResult mono = paramonotone_check(prob.subgradient, domain, nu, 2.0 * sub.rho_hat);
  rep.add("paramonotone_C", 2.0 * sub.rho_hat);
  rep.add("paramonotone_pass", mono.pass);
  rep.add("paramonotone_worst_violation", mono.worst);
  if (prob.hessian) {
    const CriterionResult hc = hessian_criterion(prob.hessian, domain, nu, sub.rho_hat);
    rep.add("hessian_pass", hc.pass);
    rep.add("hessian_min_eigenvalue", hc.worst);
    rep.add("hessian_skipped", hc.skipped);
  }

  std::optional<HebFit> heb;
  if (prob.reference && prob.f_star) {
    try {
      heb = heb_fit(prob, domain);
      rep.add("heb_mu_hat", heb->mu_hat);
      rep.add("heb_delta_hat", heb->delta_hat);
      rep.add("heb_residual", heb->residual);
      rep.add("heb_dist_min", heb->dist_min);
      rep.add("heb_dist_max", heb->dist_max);
    } catch (const Error& e) {
      rep.add("heb_error", std::string(e.what()));
    }
  }

  if (prob.theory) {
    rep.add("theory", prob.theory_note.empty() ? std::string("given") : prob.theory_note);
    rep.add("tube_radius", tube_radius(1.0, *prob.theory));
    rep.add("tube_radius_gamma", tube_radius(cfg.gamma, *prob.theory));
  } else {
    rep.add("tube_radius", std::string("none"));
  }
  // Same radius with the sampled constants substituted where available.
  const double delta = heb ? heb->delta_hat : (prob.theory ? prob.theory->delta() : 0.0);
  const double mu = heb ? heb->mu_hat : (prob.theory ? prob.theory->mu() : 0.0);
  if (delta * (1.0 + nu) > 1.0 && mu > 0.0) {
    const TheoryConstants estimated(nu, rho_hat, delta, mu, prob.theory ? prob.theory->L() : 1.0);
    rep.add("tube_radius_estimated", tube_radius(1.0, estimated));
  } else {
    rep.add("tube_radius_estimated", std::string("none"));
  }
  add_certificate(rep, p, cfg);

  std::vector<std::string> written;
  written.push_back(out_path(cfg, "report.txt"));
  rep.save(written.back());

  written.push_back(out_path(cfg, "worst_pairs.csv"));
  std::ofstream f(written.back());
  if (!f) fail(ErrorCode::kIo, "cannot write " + written.back());
  f << "method,rho_hat,pair_index,lambda,x,y\n";
  auto join = [](const Vector& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
    return s;
  };
  for (const ParaEstimate* e : {&mid, &sub})
    f << to_string(e->method) << ',' << format_double(e->rho_hat) << ',' << e->worst_index << ','
      << format_double(e->worst_pair.lambda) << ',' << join(e->worst_pair.x) << ',' << join(e->worst_pair.y) << '\n';
  return written;
}

struct Strategy {
  std::string name;
  StepSizeRule rule;
};

std::vector<std::string> run_bench(const RunConfig& cfg) {
  const PreparedProblem p = prepare_problem(cfg);
  const std::vector<Strategy> strategies = {
      {"polyak", StepSizeRule::polyak(cfg.f_target)},
      {"scaled_polyak", StepSizeRule::scaled_polyak(cfg.bench_sigma, cfg.f_target)},
      {"diminishing", StepSizeRule::diminishing(cfg.bench_alpha0, 1.0, 0.5)},
      {"decaying", StepSizeRule::geometric(cfg.bench_decay_alpha0, cfg.bench_decay_q)},
  };
  const SolverConfig sc = cfg.solver_config();
  // Independent runs on pure oracles; each task owns its history.
  std::vector<std::future<RunHistory>> runs;
  for (const auto& s : strategies)
    runs.push_back(std::async(std::launch::async, [&p, &sc, rule = s.rule] { return run(p.problem, rule, sc, p.x0); }));

  std::vector<std::string> written;
  std::ostringstream table;
  table << "strategy,rule,iterations,final_f,best_f,final_dist,termination\n";
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    const RunHistory h = runs[i].get();
    const IterateRecord& last = h.records.back();
    table << strategies[i].name << ',' << strategies[i].rule.name() << ',' << last.k << ','
          << format_double(last.f_value) << ',' << format_double(last.f_best) << ','
          << (last.dist ? format_double(*last.dist) : std::string()) << ',' << to_string(h.termination) << '\n';
    written.push_back(out_path(cfg, "history_" + strategies[i].name + ".csv"));
    write_history_csv(written.back(), h);
  }
  written.push_back(out_path(cfg, "comparison.csv"));
  std::ofstream f(written.back());
  if (!f) fail(ErrorCode::kIo, "cannot write " + written.back());
  f << table.str();
  return written;
}

std::vector<std::string> run_recover(const RunConfig& cfg) {
  const PreparedProblem p = prepare_problem(cfg);
  if (!p.factorization) fail(ErrorCode::kInvalidArgument, "recover requires a factorization problem (synth_rmc, csv, movielens, pgm)");
  const RobustFactorizationInstance& inst = *p.factorization;
  const RunHistory h = run(p.problem, cfg.step_rule(), cfg.solver_config(), p.x0);
  auto [U, V] = unpack_factors(h.final_point, inst.X.rows, inst.X.cols, inst.rank);
  const Matrix recon = multiply(U, V);

  Report rep;
  rep.add("command", std::string("recover"));
  rep.add("problem", cfg.problem);
  rep.add("rule", cfg.step_rule().name());
  rep.add("rank", inst.rank);
  rep.add("init", cfg.init);
  add_history_summary(rep, h);
  rep.add("train_rmse", rmse(recon, inst.X, inst.M));
  if (p.holdout_mask && p.holdout_values &&
      std::any_of(p.holdout_mask->data.begin(), p.holdout_mask->data.end(), [](double v) { return v != 0.0; }))
    rep.add("test_rmse", rmse(recon, *p.holdout_values, *p.holdout_mask));
  if (inst.ground_truth) {
    const Matrix full(inst.X.rows, inst.X.cols, 1.0);
    rep.add("truth_rmse", rmse(recon, *inst.ground_truth, full));
    rep.add("relative_error", relative_reconstruction_error(*inst.ground_truth, h.final_point, inst.rank));
    Matrix shown = recon;
    if (p.is_image)
      for (double& v : shown.data) v = std::clamp(v, 0.0, 1.0);
    const SignalRatios s = psnr_snr(shown, *inst.ground_truth, p.max_value);
    rep.add("psnr_db", s.psnr_db);
    rep.add("snr_db", s.snr_db);
  }

  std::vector<std::string> written;
  written.push_back(out_path(cfg, "history.csv"));
  write_history_csv(written.back(), h);
  if (p.is_image) {
    PgmImage img;
    img.pixels = recon;
    img.maxval = 255;
    written.push_back(out_path(cfg, "reconstruction.pgm"));
    save_pgm(written.back(), img);
  }
  written.push_back(out_path(cfg, "recovery.txt"));
  rep.save(written.back());
  return written;
}

}  // namespace

PreparedProblem prepare_problem(const RunConfig& cfg) {
  cfg.validate();
  const std::string& name = cfg.problem;
  const auto builtins = builtin_names();
  if (std::find(builtins.begin(), builtins.end(), name) != builtins.end()) {
    PreparedProblem p;
    p.problem = builtin_instance(name, cfg.dimension);
    if (cfg.x0) {
      require(cfg.x0->size() == p.problem.dimension, "config field 'x0': dimension mismatch");
      p.x0 = Point(*cfg.x0);
    } else {
      Vector x = p.problem.reference->points.front().values();
      const Vector u = random_direction(x.size(), cfg.seed);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += cfg.x0_norm * u[i];
      p.x0 = Point(std::move(x));
    }
    return p;
  }
  if (name == "synth_rmc")
    return factorization_problem(
        synth_rmc(cfg.m, cfg.n, cfg.rank, cfg.observed_fraction, cfg.outlier_fraction, cfg.outlier_scale, cfg.seed), cfg);
  if (name == "synth_phase") {
    const PhaseRetrievalInstance inst = synth_phase(cfg.m, cfg.n, cfg.seed);
    PreparedProblem p;
    p.problem = phase_oracle(inst);
    Vector x = *inst.ground_truth;
    const Vector u = random_direction(x.size(), cfg.seed + 1);
    const double scale = 0.1 * cfg.x0_norm * norm2(x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += scale * u[i];
    p.x0 = Point(std::move(x));
    return p;
  }
  RobustFactorizationInstance inst;
  PreparedProblem prepared;
  if (name == "csv") {
    inst.X = load_csv_matrix(cfg.data);
    inst.M = cfg.mask.empty() ? Matrix(inst.X.rows, inst.X.cols, 1.0) : load_csv_matrix(cfg.mask);
    require(inst.M.same_shape(inst.X), "config field 'mask': shape differs from data");
    for (std::size_t i = 0; i < inst.X.size(); ++i)
      if (inst.M.data[i] == 0.0) inst.X.data[i] = 0.0;
    prepared = factorization_problem(inst, cfg);
  } else if (name == "movielens") {
    const RatingsData data = load_movielens(cfg.data);
    const RatingsSplit split = split_ratings(data, cfg.seed, cfg.test_fraction);
    std::tie(inst.X, inst.M) = ratings_matrix(split.train, data.users, data.items);
    auto [TX, TM] = ratings_matrix(split.test, data.users, data.items);
    prepared = factorization_problem(inst, cfg);
    prepared.holdout_values = std::move(TX);
    prepared.holdout_mask = std::move(TM);
  } else if (name == "pgm") {
    const PgmImage img = load_pgm(cfg.data);
    std::mt19937_64 rng(cfg.seed);
    inst.ground_truth = img.pixels;
    inst.M = cfg.mask.empty() ? hide_entries(img.pixels, cfg.mask_fraction, rng) : load_csv_matrix(cfg.mask);
    require(inst.M.same_shape(img.pixels), "config field 'mask': shape differs from the image");
    inst.X = img.pixels;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < inst.X.size(); ++i) {
      if (inst.M.data[i] == 0.0) {
        inst.X.data[i] = 0.0;
      } else if (cfg.outlier_fraction > 0.0 && unit(rng) < cfg.outlier_fraction) {
        inst.X.data[i] += (unit(rng) < 0.5 ? -1.0 : 1.0) * cfg.outlier_scale;
      }
    }
    inst.realizable = false;
    Matrix hidden(inst.M.rows, inst.M.cols);
    for (std::size_t i = 0; i < hidden.size(); ++i) hidden.data[i] = inst.M.data[i] == 0.0 ? 1.0 : 0.0;
    prepared = factorization_problem(inst, cfg);
    prepared.holdout_values = img.pixels;
    prepared.holdout_mask = std::move(hidden);
    prepared.is_image = true;
    prepared.max_value = 1.0;
  } else {
    fail(ErrorCode::kInvalidArgument, "config field 'problem': unknown problem '" + name + "'");
  }
  return prepared;
}

void write_history_csv(const std::string& path, const RunHistory& history) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::kIo, "cannot write " + path);
  f << "k,f,f_best,alpha,grad_norm,dist\n";
  for (const auto& r : history.records) {
    f << r.k << ',' << format_double(r.f_value) << ',' << format_double(r.f_best) << ',' << format_double(r.alpha)
      << ',' << format_double(r.grad_norm) << ',' << (r.dist ? format_double(*r.dist) : std::string()) << '\n';
  }
  if (!f) fail(ErrorCode::kIo, "write failed: " + path);
}

std::vector<std::string> execute(const std::string& command, const RunConfig& config) {
  if (command == "solve") return run_solve(config);
  if (command == "certify") return run_certify(config);
  if (command == "bench") return run_bench(config);
  if (command == "recover") return run_recover(config);
  fail(ErrorCode::kInvalidArgument, "unknown command '" + command + "' (expected solve, certify, bench or recover)");
}

}  // namespace psgm
