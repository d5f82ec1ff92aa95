#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ozf/certify.hpp"
#include "ozf/io.hpp"
#include "ozf/validate.hpp"

namespace fs = std::filesystem;
using ozf::io::json;

namespace {

struct SolverConfig {
  double eps = 1e-7;
  double gap_abs = 1e-9;
  double gap_rel = 1e-9;
  double time_limit = 0.0;
  std::vector<double> mu_grid = ozf::default_mu_grid();
};

// Defaults may come from the file named by OZFCERT_SOLVER_OPTIONS; flags override.
SolverConfig config_from_env() {
  SolverConfig cfg;
  const char* path = std::getenv("OZFCERT_SOLVER_OPTIONS");
  if (!path || !*path) return cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string("cannot open solver options file ") + path);
  json doc;
  in >> doc;
  cfg.eps = doc.value("eps", cfg.eps);
  cfg.gap_abs = doc.value("gap_abs", cfg.gap_abs);
  cfg.gap_rel = doc.value("gap_rel", cfg.gap_rel);
  cfg.time_limit = doc.value("time_limit", cfg.time_limit);
  if (doc.contains("mu_grid")) cfg.mu_grid = doc["mu_grid"].get<std::vector<double>>();
  return cfg;
}

ozf::sdp::SolverOptions solver_options(const SolverConfig& cfg) {
  ozf::sdp::SolverOptions opt;
  opt.gap_abs = cfg.gap_abs;
  opt.gap_rel = cfg.gap_rel;
  opt.time_limit_seconds = cfg.time_limit;
  return opt;
}

std::vector<double> parse_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::runtime_error("empty list: " + spec);
  return out;
}

std::vector<double> parse_grid(const std::string& spec) {
  double a = 0.0, b = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::stringstream ss(spec);
  if (!(ss >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
    throw std::runtime_error("grid must be a:b:step with positive step: " + spec);
  std::vector<double> out;
  for (double v = a; v <= b + 1e-12; v += step) out.push_back(v);
  if (out.empty()) throw std::runtime_error("empty grid: " + spec);
  return out;
}

ozf::Vector parse_vector(const std::string& spec) {
  const std::vector<double> vals = parse_list(spec);
  ozf::Vector v(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
  return v;
}

std::string certificate_summary(const ozf::Certificate& cert, const std::string& path) {
  std::ostringstream os;
  os << "status: feasible\n"
     << "gamma: " << cert.gamma << "\n"
     << "size (1/gamma): " << 1.0 / cert.gamma << "\n";
  if (cert.sector_enabled) os << "mu: " << cert.mu << "\n";
  os << "margins:";
  for (const auto& m : cert.margins) os << ' ' << m.name << '=' << m.value;
  os << "\ncertificate: " << path << "\n";
  return os.str();
}

int run_certify(const std::string& problem_path, const std::string& out_dir,
                const SolverConfig& cfg) {
  std::string sha;
  const ozf::AnalysisProblem problem = ozf::io::load_problem(problem_path, &sha);
  fs::create_directories(out_dir);
  const std::string cert_path = (fs::path(out_dir) / "certificate.json").string();

  ozf::AssembleOptions assemble;
  assemble.eps = cfg.eps;
  const ozf::sdp::SolverOptions sopt = solver_options(cfg);

  std::optional<ozf::Certificate> best;
  std::string status = "infeasible";
  if (problem.sector.enabled) {
    const ozf::LineSearchResult ls = ozf::mu_linesearch(problem, cfg.mu_grid, assemble, sopt);
    best = ls.best;
    if (!best) {
      bool stalled = false;
      for (const auto& p : ls.profile) stalled = stalled || p.status == ozf::sdp::SolveStatus::Stalled;
      status = stalled ? "stalled" : "infeasible";
    }
  } else {
    const ozf::CertifyReport rep = ozf::solve(ozf::assemble_stability_program(problem, assemble), sopt);
    best = rep.certificate;
    if (!best) status = ozf::sdp::to_string(rep.status) + (rep.message.empty() ? "" : ": " + rep.message);
  }
  if (!best) {
    std::cout << "status: " << status << "\n";
    return 2;
  }
  best->problem_sha = sha;
  ozf::io::save_certificate(*best, cert_path);
  const std::string summary = certificate_summary(*best, cert_path);
  std::ofstream(fs::path(out_dir) / "summary.txt") << summary;
  std::cout << summary;
  return 0;
}

int run_sweep(const std::string& problem_path, const std::string& out_dir,
              const std::string& grid_spec, const std::string& variant_spec,
              const SolverConfig& cfg) {
  const ozf::AnalysisProblem problem = ozf::io::load_problem(problem_path);
  if (!(problem.sector.l > 0.0))
    throw std::runtime_error("sweep requires a positive sector width l in the problem file");
  const std::vector<double> gains = parse_grid(grid_spec);

  std::vector<ozf::SweepVariant> variants;
  if (variant_spec == "sector")
    variants = {ozf::SweepVariant::SectorOnly};
  else if (variant_spec == "ozf")
    variants = {ozf::SweepVariant::SectorPlusOzf};
  else if (variant_spec == "both")
    variants = {ozf::SweepVariant::SectorOnly, ozf::SweepVariant::SectorPlusOzf};
  else
    throw std::runtime_error("unknown variant: " + variant_spec);

  ozf::SweepOptions opt;
  opt.shape = problem.shape;
  opt.rho = problem.rho;
  opt.alpha = problem.alpha;
  opt.beta = problem.beta;
  opt.mu_grid = cfg.mu_grid;
  opt.assemble.eps = cfg.eps;
  opt.solver = solver_options(cfg);

  const auto cells =
      ozf::sweep_gain_grid(problem.system, problem.sector.l, gains, variants, opt);
  fs::create_directories(out_dir);
  const std::string csv_path = (fs::path(out_dir) / "sweep.csv").string();
  ozf::io::write_sweep_csv(cells, csv_path);
  int feasible = 0;
  for (const auto& c : cells) feasible += c.feasible ? 1 : 0;
  std::cout << "sweep: " << cells.size() << " cells, " << feasible << " feasible\n"
            << "csv: " << csv_path << "\n";
  return 0;
}

int run_simulate(const std::string& problem_path, const std::string& out_dir,
                 const std::string& x0_spec, int horizon, const std::string& nonlin_spec) {
  const ozf::AnalysisProblem problem = ozf::io::load_problem(problem_path);
  const ozf::Vector x0 = parse_vector(x0_spec);
  const double l = problem.sector.l, L = problem.band.L;

  ozf::NonlinMap nonlin;
  if (nonlin_spec == "sat")
    nonlin = [l, L](const ozf::Vector& z) { return ozf::saturation(z, l, L); };
  else if (nonlin_spec == "dzn")
    nonlin = [l, L](const ozf::Vector& z) { return ozf::deadzone(z, l, L); };
  else if (nonlin_spec == "zero")
    nonlin = [](const ozf::Vector& z) { return ozf::Vector(ozf::Vector::Zero(z.size())); };
  else if (nonlin_spec == "linear")
    nonlin = [L](const ozf::Vector& z) { return ozf::Vector(L * z); };
  else
    throw std::runtime_error("unknown nonlinearity: " + nonlin_spec);

  const ozf::Trajectory traj = ozf::simulate_loop(problem.system, nonlin, x0, horizon);
  fs::create_directories(out_dir);
  const std::string csv_path = (fs::path(out_dir) / "trajectory.csv").string();
  ozf::io::write_trajectory_csv(traj, csv_path);
  std::cout << "trajectory: " << csv_path << " (" << traj.horizon << " steps)\n";
  return 0;
}

int run_validate(const std::string& problem_path, const std::string& cert_path, int horizon,
                 int samples, std::uint64_t seed) {
  std::string sha;
  const ozf::AnalysisProblem problem = ozf::io::load_problem(problem_path, &sha);
  const ozf::Certificate cert = ozf::io::load_certificate(cert_path);
  if (cert.problem_sha != sha) {
    std::cout << "fingerprint mismatch: certificate was issued for a different problem\n";
    return 1;
  }
  ozf::VerifyOptions vopt;
  vopt.horizon = horizon;
  vopt.n_initial = samples;
  vopt.seed = seed;
  const ozf::VerificationReport report = ozf::verify_certificate(cert, problem, vopt, sha);
  for (const auto& item : report.items)
    std::cout << (item.pass ? "[PASS] " : "[FAIL] ") << item.name << ": worst=" << item.worst
              << " tol=" << item.tol << (item.detail.empty() ? "" : " (" + item.detail + ")")
              << "\n";
  const ozf::CheckReport perf =
      ozf::check_closed_loop_performance(cert, problem, samples, horizon, seed);
  std::cout << perf.summary() << "\n";
  const bool ok = report.pass && perf.pass;
  std::cout << (ok ? "validation passed" : "validation FAILED") << "\n";
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"O'Shea-Zames-Falb multiplier certification for saturated/slope-restricted loops"};
  app.require_subcommand(1);

  SolverConfig cfg;
  try {
    cfg = config_from_env();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::string problem_path, out_dir = ".", cert_path;
  std::string grid_spec = "0.1:1.3:0.1", variant_spec = "both";
  std::string x0_spec = "0", nonlin_spec = "sat", mu_grid_spec;
  int horizon = 200, samples = 100;
  std::uint64_t seed = 1;

  CLI::App* certify = app.add_subcommand("certify", "solve the LMI program for one problem");
  certify->add_option("--problem", problem_path, "problem JSON file")->required();
  certify->add_option("--out", out_dir, "output directory");
  certify->add_option("--eps", cfg.eps, "strictness margin for definite blocks");
  certify->add_option("--mu-grid", mu_grid_spec, "comma-separated mu line-search grid");
  certify->add_option("--time-limit", cfg.time_limit, "solver time limit per solve [s]");

  CLI::App* sweep = app.add_subcommand("sweep", "saturation-gain sweep (writes sweep.csv)");
  sweep->add_option("--problem", problem_path, "saturated-loop problem JSON file")->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--grid-L", grid_spec, "gain grid a:b:step");
  sweep->add_option("--variant", variant_spec, "sector|ozf|both");
  sweep->add_option("--eps", cfg.eps, "strictness margin");
  sweep->add_option("--mu-grid", mu_grid_spec, "comma-separated mu grid");
  sweep->add_option("--time-limit", cfg.time_limit, "solver time limit per solve [s]");

  CLI::App* simulate = app.add_subcommand("simulate", "simulate the loop (writes trajectory.csv)");
  simulate->add_option("--problem", problem_path, "problem JSON file")->required();
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--x0", x0_spec, "initial state, comma-separated")->required();
  simulate->add_option("--horizon", horizon, "number of steps");
  simulate->add_option("--nonlin", nonlin_spec, "sat|dzn|zero|linear");

  CLI::App* validate = app.add_subcommand("validate", "re-verify a certificate");
  validate->add_option("--problem", problem_path, "problem JSON file")->required();
  validate->add_option("--certificate", cert_path, "certificate JSON file")->required();
  validate->add_option("--horizon", horizon, "simulation horizon");
  validate->add_option("--samples", samples, "number of boundary initial conditions");
  validate->add_option("--seed", seed, "sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (!mu_grid_spec.empty()) cfg.mu_grid = parse_list(mu_grid_spec);
    if (certify->parsed()) return run_certify(problem_path, out_dir, cfg);
    if (sweep->parsed()) return run_sweep(problem_path, out_dir, grid_spec, variant_spec, cfg);
    if (simulate->parsed())
      return run_simulate(problem_path, out_dir, x0_spec, horizon, nonlin_spec);
    if (validate->parsed()) return run_validate(problem_path, cert_path, horizon, samples, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
