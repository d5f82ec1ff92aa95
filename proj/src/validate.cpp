#include "ozf/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ozf/sdp.hpp"

namespace ozf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Vector sample_ball(int dim, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
  const double norm = v.norm();
  if (norm == 0.0) return Vector::Zero(dim);
  return v * (radius * std::pow(unit(rng), 1.0 / dim) / norm);
}

}  // namespace

std::string CheckReport::summary() const {
  std::ostringstream os;
  os << (pass ? "[PASS] " : "[FAIL] ") << name << ": worst=" << worst << " tol=" << tol
     << " samples=" << samples << " seed=" << seed;
  if (!detail.empty()) os << " (" << detail << ")";
  return os.str();
}

CheckReport check_dissipation(const SlopeRestrictedFunction& f, int n_samples, double radius,
                              double tol, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "dissipation";
  rep.tol = tol;
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  rep.worst = kNegInf;
  for (int k = 0; k < n_samples; ++k) {
    const Vector u = sample_ball(f.dim, radius, rng);
    const Vector y = sample_ball(f.dim, radius, rng);
    const double Vu = storage_V(f, u), Vy = storage_V(f, y);
    const double violation = (Vu - Vy - supply_S(f, u, y)) / (1.0 + std::abs(Vu) + std::abs(Vy));
    rep.worst = std::max(rep.worst, violation);
    ++rep.samples;
  }
  rep.pass = rep.worst <= rep.tol;
  return rep;
}

CheckReport check_static_qc(const SlopeRestrictedFunction& f, const Matrix& M, int n_samples,
                            double radius, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "static-qc";
  rep.tol = 1e-8;
  rep.seed = seed;
  const int h = static_cast<int>(M.rows());
  const DhdReport dhd = dhd_check(M, 1e-12);
  if (!dhd.ok) rep.detail = "matrix is not d.h.d.; violations are informative";

  const SlopeRestrictedFunction g = lift(f, h);
  const Matrix Mk = kron_identity(M, f.dim);
  std::mt19937_64 rng(seed);
  rep.worst = kNegInf;
  for (int k = 0; k < n_samples; ++k) {
    const Vector u = sample_ball(g.dim, radius, rng);
    const double form = g.grad_fm(u).dot(Mk * g.grad_fL(u));
    rep.worst = std::max(rep.worst, -form / (1.0 + std::abs(form)));
    ++rep.samples;
  }
  rep.pass = rep.worst <= rep.tol;
  return rep;
}

CheckReport check_iqc(const SlopeRestrictedFunction& f, const FirMultiplier& mult,
                      const SlopeBand& band, double rho, int n_signals, int T_max,
                      std::uint64_t seed) {
  const DhdConstraintSystem sys = dhd_constraint_system(mult.nu1, mult.nu2, rho);
  if (!sys.feasible(mult, 1e-9))
    throw std::invalid_argument("check_iqc: (lambda, E) violates the multiplier constraints");
  if (f.band.m != band.m || f.band.L != band.L)
    throw std::invalid_argument("check_iqc: function band differs from multiplier band");

  CheckReport rep;
  rep.name = "iqc";
  rep.tol = 1e-8;
  rep.seed = seed;
  rep.worst = kNegInf;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> amp(0.3, 3.0);

  const FilterRealization fil = filter_realization(mult, band, f.dim);
  const Matrix P = running_cost_P(f.dim);
  const Matrix Z = terminal_cost_Z(mult.E, f.dim);

  for (int s = 0; s < n_signals; ++s) {
    const double a = amp(rng);
    std::vector<Vector> zbar(T_max);
    for (auto& zt : zbar) {
      zt = Vector(f.dim);
      for (int i = 0; i < f.dim; ++i) zt[i] = a * gauss(rng);
    }
    const std::vector<Vector> wbar = delta_rho_apply(f, rho, zbar);
    const FilterRun run = run_filter(fil, zbar, wbar);
    double running = 0.0;
    for (int T = 1; T <= T_max; ++T) {
      running += run.v[T - 1].dot(P * run.v[T - 1]);
      const double terminal =
          fil.state_dim() > 0 ? run.xi[T].dot(Z * run.xi[T]) : 0.0;
      const double violation =
          (terminal - running) / (1.0 + std::abs(running) + std::abs(terminal));
      rep.worst = std::max(rep.worst, violation);
      ++rep.samples;
    }
  }
  rep.pass = rep.worst <= rep.tol;
  return rep;
}

CheckReport check_closed_loop_performance(const Certificate& cert, const AnalysisProblem& problem,
                                          int n_initial, int horizon, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "closed-loop-performance";
  rep.tol = 1e-6;
  rep.seed = seed;
  rep.worst = kNegInf;

  const Matrix X = cert.X();
  double dissipation_margin = 0.0;
  for (const ConstraintMargin& m : cert.margins)
    if (m.name == "dissipation") dissipation_margin = m.value;
  const double decay_K = dissipation_margin > 0.0 ? std::sqrt(1.0 / dissipation_margin)
                                           : std::numeric_limits<double>::infinity();

  std::vector<SlopeRestrictedFunction> funcs;
  if (cert.sector_enabled) {
    funcs.push_back(deadzone_function(cert.sector_l, cert.band.L, cert.d));
  } else {
    const ProfileKind kinds[] = {ProfileKind::RandomPiecewiseLinear, ProfileKind::Saturating,
                                 ProfileKind::SmoothSigmoid, ProfileKind::Linear,
                                 ProfileKind::Zero};
    for (int k = 0; k < 10; ++k)
      funcs.push_back(make_profile(kinds[k % 5], cert.band, cert.d, seed + 31 * k));
  }

  std::mt19937_64 rng(seed);
  for (int k = 0; k < n_initial; ++k) {
    const Vector x0 = sample_ellipsoid_boundary(X, rng);
    const SlopeRestrictedFunction& f = funcs[k % funcs.size()];
    const NonlinMap nonlin = [&f](const Vector& z) { return f.gradient(z); };
    const TrajectoryBounds tb =
        evaluate_trajectory_bounds(cert, problem, nonlin, x0, horizon, decay_K);
    rep.worst = std::max(rep.worst, -tb.worst_per_slack);
    if (cert.beta == 1.0 && cert.sector_enabled)
      rep.worst = std::max(rep.worst, tb.sup_z - 1.0);
    if (cert.sector_enabled) rep.worst = std::max(rep.worst, tb.sup_Hx - cert.sector_l);
    ++rep.samples;
  }
  rep.pass = rep.worst <= rep.tol;
  return rep;
}

CheckReport finite_diff_check(const SlopeRestrictedFunction& f, int n_points, double step,
                              std::uint64_t seed) {
  CheckReport rep;
  rep.name = "finite-diff";
  rep.tol = 0.0;
  rep.seed = seed;
  rep.worst = kNegInf;
  std::mt19937_64 rng(seed);
  const double kink_bound = (std::abs(f.band.m) + f.band.width() + 1.0) * step;
  for (int k = 0; k < n_points; ++k) {
    const Vector x = sample_ball(f.dim, 8.0, rng);
    const Vector g = f.gradient(x);
    for (int i = 0; i < f.dim; ++i) {
      Vector xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      const double fd = (f.value(xp) - f.value(xm)) / (2.0 * step);
      const double abs_err = std::abs(fd - g[i]);
      const double rel_err = abs_err / (1.0 + std::abs(g[i]));
      // smooth criterion, else the kink-consistent absolute bound
      rep.worst = std::max(rep.worst, std::min(rel_err - 1e-6, abs_err - kink_bound));
      ++rep.samples;
    }
  }
  rep.pass = rep.worst <= rep.tol;
  return rep;
}

FirMultiplier find_feasible_multiplier(int nu1, int nu2, double rho, std::uint64_t seed) {
  const DhdConstraintSystem sys = dhd_constraint_system(nu1, nu2, rho);
  sdp::ConeProgram lp;
  lp.num_vars = sys.num_vars;
  lp.inequalities = sys.constraints;
  const double box = 3.0;
  for (int i = 0; i < sys.num_vars; ++i) {
    AffineScalar lo, hi;
    lo.constant = box;
    lo.add(i, 1.0);  // x_i >= -box
    hi.constant = box;
    hi.add(i, -1.0);  // x_i <= box
    lp.inequalities.push_back(std::move(lo));
    lp.inequalities.push_back(std::move(hi));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  lp.objective = Vector(sys.num_vars);
  for (int i = 0; i < sys.num_vars; ++i) lp.objective[i] = gauss(rng);
  lp.objective.normalize();

  const sdp::Solution sol = sdp::solve(lp);
  if (sol.status != sdp::SolveStatus::Optimal)
    throw std::runtime_error("find_feasible_multiplier: LP solve failed (" + sol.message + ")");
  Vector lambda = sol.x.head(nu1 + 1 + nu2);
  Matrix E(nu2, nu1);
  for (int r = 0; r < nu2; ++r)
    for (int c = 0; c < nu1; ++c) E(r, c) = sol.x[sys.E_offset + r * nu1 + c];
  return FirMultiplier::make(nu1, nu2, std::move(lambda), std::move(E));
}

}  // namespace ozf
