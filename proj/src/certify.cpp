#include "ozf/certify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace ozf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

FirMultiplier multiplier_for(const Vector& lambda, int nu1, int nu2) {
  return FirMultiplier::make(nu1, nu2, lambda, Matrix::Zero(nu2, nu1));
}

Matrix stack_cols(const Matrix& left, const Matrix& right) {
  Matrix out(left.rows(), left.cols() + right.cols());
  out << left, right;
  return out;
}

AffineMatrix probe_affine(int nvars, const std::function<Matrix(const Vector&)>& eval) {
  AffineMatrix am;
  Vector x = Vector::Zero(nvars);
  am.constant = eval(x);
  for (int i = 0; i < nvars; ++i) {
    x[i] = 1.0;
    Matrix K = eval(x) - am.constant;
    x[i] = 0.0;
    if (K.size() > 0 && K.cwiseAbs().maxCoeff() > 0.0) am.terms.emplace_back(i, std::move(K));
  }
  return am;
}

}  // namespace

InterconnectionMatrices build_interconnection(const AnalysisProblem& problem) {
  problem.validate();
  const LtiSystem& sys = problem.system;
  const int n = sys.n(), d = sys.d();
  const int nu1 = problem.shape.nu1, nu2 = problem.shape.nu2;
  const int n_psi = (nu1 + nu2) * d;
  const double rho_inv = 1.0 / problem.rho;

  const FirMultiplier zero_mult = multiplier_for(Vector::Zero(nu1 + 1 + nu2), nu1, nu2);
  const FilterRealization fil = filter_realization(zero_mult, problem.band, d);

  Matrix Cz(2 * d, n);  // [C; 0]: filter input share coming from the plant state
  Cz << sys.C, Matrix::Zero(d, n);
  Matrix Iw(2 * d, d);  // [0; I]: share coming from the loop input
  Iw << Matrix::Zero(d, d), Matrix::Identity(d, d);

  InterconnectionMatrices ic;
  ic.n_psi = n_psi;
  ic.n = n;
  ic.d = d;
  ic.nu1 = nu1;
  ic.nu2 = nu2;
  ic.band = problem.band;
  ic.rho = problem.rho;

  ic.calA = Matrix::Zero(n_psi + n, n_psi + n);
  ic.calA.topLeftCorner(n_psi, n_psi) = fil.A;
  ic.calA.topRightCorner(n_psi, n) = fil.B * Cz;
  ic.calA.bottomRightCorner(n, n) = rho_inv * sys.A;

  ic.calB = Matrix::Zero(n_psi + n, d);
  ic.calB.topRows(n_psi) = fil.B * Iw;
  ic.calB.bottomRows(n) = rho_inv * sys.B;

  ic.calCp = Matrix::Zero(d, n_psi + n);
  ic.calCp.rightCols(n) = sys.C;
  return ic;
}

Matrix InterconnectionMatrices::calC_at(const Vector& lambda) const {
  const FilterRealization fil =
      filter_realization(multiplier_for(lambda, nu1, nu2), band, d);
  Matrix Cz(2 * d, n);
  Cz << calCp.rightCols(n), Matrix::Zero(d, n);
  Matrix out(4 * d, n_psi + n);
  out.leftCols(n_psi) = fil.C;
  out.rightCols(n) = fil.D * Cz;
  return out;
}

Matrix InterconnectionMatrices::calD_at(const Vector& lambda) const {
  const FilterRealization fil =
      filter_realization(multiplier_for(lambda, nu1, nu2), band, d);
  Matrix Iw(2 * d, d);
  Iw << Matrix::Zero(d, d), Matrix::Identity(d, d);
  return fil.D * Iw;
}

int VarLayout::sym_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  return X_off + i * X_dim - i * (i - 1) / 2 + (j - i);
}

Matrix VarLayout::unpack_X(const Vector& vars) const {
  Matrix X(X_dim, X_dim);
  for (int i = 0; i < X_dim; ++i)
    for (int j = i; j < X_dim; ++j) X(i, j) = X(j, i) = vars[sym_index(i, j)];
  return X;
}

Vector VarLayout::lambda_of(const Vector& vars) const {
  return lam_len > 0 ? Vector(vars.segment(lam_off, lam_len)) : Vector();
}

Matrix VarLayout::E_of(const Vector& vars) const {
  Matrix E(E_rows, E_cols);
  for (int r = 0; r < E_rows; ++r)
    for (int c = 0; c < E_cols; ++c) E(r, c) = vars[E_off + r * E_cols + c];
  return E;
}

Vector VarLayout::H_of(const Vector& vars) const {
  return H_len > 0 ? Vector(vars.segment(H_off, H_len)) : Vector();
}

namespace {

SdpProblem assemble_core(const AnalysisProblem& problem, bool sector_mode, double mu,
                         const AssembleOptions& opt) {
  problem.validate();
  if (sector_mode) {
    if (problem.system.d() != 1)
      throw std::invalid_argument("assemble_sector_program: sector path requires d = 1");
    if (!problem.sector.enabled)
      throw std::invalid_argument("assemble_sector_program: sector is not enabled in the problem");
    if (mu < 0.0) throw std::invalid_argument("assemble_sector_program: mu must be nonnegative");
  }

  SdpProblem sp;
  sp.problem = problem;
  sp.sector_mode = sector_mode;
  sp.multiplier_enabled = opt.enable_multiplier;
  sp.mu = sector_mode ? mu : 0.0;
  sp.eps = opt.effective_eps();
  if (!(sp.eps > 0.0)) throw std::invalid_argument("assemble: eps must be positive");

  AnalysisProblem shaped = problem;
  if (!opt.enable_multiplier) shaped.shape = MultiplierShape{0, 0};
  const int nu1 = shaped.shape.nu1, nu2 = shaped.shape.nu2;
  const int h0 = nu1 + 1 + nu2;

  const InterconnectionMatrices ic = build_interconnection(shaped);
  const int N = ic.n_psi + ic.n, n = ic.n, d = ic.d;

  VarLayout& lay = sp.layout;
  lay.X_off = 0;
  lay.X_dim = N;
  int cursor = N * (N + 1) / 2;
  if (opt.enable_multiplier) {
    lay.lam_off = cursor;
    lay.lam_len = h0;
    cursor += h0;
    if (nu1 > 0 && nu2 > 0) {
      lay.E_off = cursor;
      lay.E_rows = nu2;
      lay.E_cols = nu1;
      cursor += nu1 * nu2;
    }
  }
  if (sector_mode) {
    lay.H_off = cursor;
    lay.H_len = n;
    cursor += n;
  }
  lay.t_off = cursor++;
  lay.total = cursor;

  auto lambda_at = [&](const Vector& vars) {
    return opt.enable_multiplier ? lay.lambda_of(vars) : Vector::Zero(h0).eval();
  };
  auto calZ_at = [&](const Vector& vars) {
    Matrix calZ = Matrix::Zero(N, N);
    if (lay.E_rows > 0 && lay.E_cols > 0)
      calZ.topLeftCorner(ic.n_psi, ic.n_psi) = terminal_cost_Z(lay.E_of(vars), d);
    return calZ;
  };

  const Matrix P = running_cost_P(d);
  const double alpha = problem.alpha, beta = problem.beta;
  const double L = problem.band.L;

  auto eval_block1 = [&, P](const Vector& vars) {
    const Matrix calX = lay.unpack_X(vars);
    Matrix AB = stack_cols(ic.calA, ic.calB);
    Matrix blk = AB.transpose() * calX * AB;
    blk.topLeftCorner(N, N) -= calX;
    const Vector lam = lambda_at(vars);
    Matrix CD = stack_cols(ic.calC_at(lam), ic.calD_at(lam));
    blk += CD.transpose() * P * CD;
    if (alpha != 0.0) blk.topLeftCorner(N, N) += alpha * ic.calCp.transpose() * ic.calCp;
    if (sector_mode) {
      Matrix G = Matrix::Zero(2, N + d);
      G.block(0, ic.n_psi, 1, n) = problem.system.C - lay.H_of(vars).transpose();
      G(1, N) = 1.0;
      Matrix PL(2, 2);
      PL << 0.0, L, L, -2.0;
      blk += sp.mu * G.transpose() * PL * G;
    }
    return blk;
  };

  auto eval_block2 = [&](const Vector& vars) {
    Matrix blk = lay.unpack_X(vars) + calZ_at(vars);
    if (beta != 0.0) blk -= beta * ic.calCp.transpose() * ic.calCp;
    return blk;
  };

  sp.raw_blocks.push_back(probe_affine(lay.total, eval_block1));
  sp.block_specs.push_back(BlockSpec{"dissipation", true});
  sp.raw_blocks.push_back(probe_affine(lay.total, eval_block2));
  sp.block_specs.push_back(BlockSpec{"positivity", false});

  if (sector_mode) {
    const double l2 = problem.sector.l * problem.sector.l;
    auto eval_block3 = [&, l2](const Vector& vars) {
      Matrix blk = Matrix::Zero(N + 1, N + 1);
      blk.topLeftCorner(N, N) = l2 * (lay.unpack_X(vars) + calZ_at(vars));
      const Vector H = lay.H_of(vars);
      blk.block(N, ic.n_psi, 1, n) = H.transpose();
      blk.block(ic.n_psi, N, n, 1) = H;
      blk(N, N) = 1.0;
      return blk;
    };
    sp.raw_blocks.push_back(probe_affine(lay.total, eval_block3));
    sp.block_specs.push_back(BlockSpec{"amplitude", false});
  }

  if (opt.enable_multiplier) {
    const DhdConstraintSystem dhd = dhd_constraint_system(nu1, nu2, problem.rho);
    for (const AffineScalar& c : dhd.constraints) {
      AffineScalar mapped;
      mapped.name = c.name;
      mapped.constant = c.constant;
      for (const auto& [i, coeff] : c.terms) {
        const int var = (i < h0) ? lay.lam_off + i : lay.E_off + (i - h0);
        mapped.add(var, coeff);
      }
      sp.scalar_ineqs.push_back(std::move(mapped));
    }
  }
  AffineScalar epi;
  epi.name = "epigraph";
  epi.add(lay.t_off, 1.0);
  for (int i = 0; i < n; ++i) epi.add(lay.sym_index(ic.n_psi + i, ic.n_psi + i), -1.0);
  sp.scalar_ineqs.push_back(std::move(epi));

  // folded conic form
  sp.program.num_vars = lay.total;
  sp.program.objective = Vector::Zero(lay.total);
  sp.program.objective[lay.t_off] = 1.0;
  for (std::size_t b = 0; b < sp.raw_blocks.size(); ++b) {
    AffineMatrix folded = sp.raw_blocks[b];
    if (sp.block_specs[b].negdef) {
      folded.constant = -folded.constant;
      for (auto& [i, C] : folded.terms) C = -C;
    }
    folded.constant -= sp.eps * Matrix::Identity(folded.size(), folded.size());
    sp.program.blocks.push_back(std::move(folded));
  }
  sp.program.inequalities = sp.scalar_ineqs;
  return sp;
}

Vector pack_certificate(const SdpProblem& sp, const Certificate& cert) {
  const VarLayout& lay = sp.layout;
  Vector vars = Vector::Zero(lay.total);
  if (cert.calX.rows() != lay.X_dim)
    throw std::invalid_argument("certificate calX dimension does not match the problem");
  for (int i = 0; i < lay.X_dim; ++i)
    for (int j = i; j < lay.X_dim; ++j) vars[lay.sym_index(i, j)] = cert.calX(i, j);
  if (lay.lam_len > 0) {
    if (cert.lambda.size() != lay.lam_len)
      throw std::invalid_argument("certificate lambda length mismatch");
    vars.segment(lay.lam_off, lay.lam_len) = cert.lambda;
  }
  if (lay.E_rows > 0)
    for (int r = 0; r < lay.E_rows; ++r)
      for (int c = 0; c < lay.E_cols; ++c) vars[lay.E_off + r * lay.E_cols + c] = cert.E(r, c);
  if (lay.H_len > 0) {
    if (cert.H.size() != lay.H_len) throw std::invalid_argument("certificate H length mismatch");
    vars.segment(lay.H_off, lay.H_len) = cert.H;
  }
  vars[lay.t_off] = cert.gamma * cert.gamma;
  return vars;
}

std::vector<ConstraintMargin> evaluate_margins(const SdpProblem& sp, const Vector& vars) {
  std::vector<ConstraintMargin> margins;
  for (std::size_t b = 0; b < sp.raw_blocks.size(); ++b) {
    const Matrix M = sp.raw_blocks[b].eval(vars);
    const double margin =
        sp.block_specs[b].negdef ? -max_eigenvalue(M) : min_eigenvalue(M);
    margins.push_back({sp.block_specs[b].name, margin});
  }
  double worst_dhd = kInf, epi_slack = kInf;
  for (const AffineScalar& c : sp.scalar_ineqs) {
    if (c.terms.empty()) continue;  // structural zeros of the Toeplitz pattern
    if (c.name == "epigraph")
      epi_slack = std::min(epi_slack, c.eval(vars));
    else
      worst_dhd = std::min(worst_dhd, c.eval(vars));
  }
  if (worst_dhd != kInf) margins.push_back({"dhd", worst_dhd});
  margins.push_back({"epigraph", epi_slack});
  return margins;
}

}  // namespace

SdpProblem assemble_stability_program(const AnalysisProblem& problem, const AssembleOptions& opt) {
  return assemble_core(problem, /*sector_mode=*/false, 0.0, opt);
}

SdpProblem assemble_sector_program(const AnalysisProblem& problem, double mu,
                               const AssembleOptions& opt) {
  return assemble_core(problem, /*sector_mode=*/true, mu, opt);
}

CertifyReport solve(const SdpProblem& sp, const sdp::SolverOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  CertifyReport report;
  const sdp::Solution sol = sdp::solve(sp.program, options);
  report.status = sol.status;
  report.message = sol.message;
  report.newton_steps = sol.newton_steps;
  if (sol.status == sdp::SolveStatus::Optimal) {
    const VarLayout& lay = sp.layout;
    Certificate cert;
    cert.calX = lay.unpack_X(sol.x);
    cert.lambda = lay.lambda_of(sol.x);
    cert.E = lay.E_of(sol.x);
    cert.H = lay.H_of(sol.x);
    cert.mu = sp.mu;
    cert.gamma = std::sqrt(std::max(sol.x[lay.t_off], 0.0));
    cert.rho = sp.problem.rho;
    cert.alpha = sp.problem.alpha;
    cert.beta = sp.problem.beta;
    cert.band = sp.problem.band;
    cert.shape = sp.multiplier_enabled ? sp.problem.shape : MultiplierShape{0, 0};
    cert.sector_enabled = sp.sector_mode;
    cert.sector_l = sp.problem.sector.l;
    cert.multiplier_enabled = sp.multiplier_enabled;
    cert.n = sp.problem.system.n();
    cert.d = sp.problem.system.d();
    cert.eps = sp.eps;
    cert.solver_name = "ozf-barrier";
    cert.solver_status = sdp::to_string(sol.status);
    cert.margins = evaluate_margins(sp, sol.x);
    report.certificate = std::move(cert);
  }
  const std::chrono::duration<double> el = std::chrono::steady_clock::now() - t0;
  report.seconds = el.count();
  return report;
}

std::vector<double> default_mu_grid() {
  std::vector<double> grid{0.0};
  for (int k = 0; k < 25; ++k) grid.push_back(std::pow(10.0, -3.0 + 6.0 * k / 24.0));
  return grid;
}

LineSearchResult mu_linesearch(const AnalysisProblem& problem, const std::vector<double>& mu_grid,
                               const AssembleOptions& assemble, const sdp::SolverOptions& solver) {
  if (mu_grid.empty()) throw std::invalid_argument("mu_linesearch: empty grid");
  const auto t0 = std::chrono::steady_clock::now();
  LineSearchResult result;
  for (double mu : mu_grid) {
    const SdpProblem sp = assemble_sector_program(problem, mu, assemble);
    const CertifyReport rep = solve(sp, solver);
    MuPoint point{mu, rep.status, 0.0};
    if (rep.certificate) {
      point.gamma = rep.certificate->gamma;
      if (!result.best || point.gamma < result.best->gamma) result.best = rep.certificate;
    }
    result.profile.push_back(point);
  }
  const std::chrono::duration<double> el = std::chrono::steady_clock::now() - t0;
  result.seconds = el.count();
  return result;
}

std::string to_string(SweepVariant variant) {
  return variant == SweepVariant::SectorOnly ? "sector" : "ozf";
}

std::vector<SweepCell> sweep_gain_grid(const LtiSystem& plant, double l,
                                       const std::vector<double>& gains,
                                       const std::vector<SweepVariant>& variants,
                                       const SweepOptions& opt) {
  for (double L : gains)
    if (!(L > 0.0)) throw std::invalid_argument("sweep_gain_grid: gains must be positive");
  std::vector<SweepCell> cells;
  for (double L : gains) {
    for (SweepVariant variant : variants) {
      SweepCell cell;
      cell.L = L;
      cell.variant = variant;
      try {
        const DeadzoneLoop loop = loop_transform_saturation(plant, l, L);
        AnalysisProblem p;
        p.system = loop.system;
        p.band = SlopeBand::make(0.0, L);
        p.rho = opt.rho;
        p.alpha = opt.alpha;
        p.beta = opt.beta;
        p.sector = SectorSpec{l, true};
        p.shape = variant == SweepVariant::SectorPlusOzf ? opt.shape : MultiplierShape{0, 0};
        AssembleOptions assemble = opt.assemble;
        assemble.enable_multiplier = variant == SweepVariant::SectorPlusOzf;
        const LineSearchResult ls = mu_linesearch(p, opt.mu_grid, assemble, opt.solver);
        cell.seconds = ls.seconds;
        if (ls.best) {
          cell.feasible = true;
          cell.gamma = ls.best->gamma;
          cell.size = 1.0 / ls.best->gamma;
          cell.mu = ls.best->mu;
          cell.status = "optimal";
        } else {
          bool stalled = false;
          for (const MuPoint& p2 : ls.profile)
            stalled = stalled || p2.status == sdp::SolveStatus::Stalled;
          cell.status = stalled ? "stalled" : "infeasible";
        }
      } catch (const std::exception& e) {
        cell.status = std::string("error: ") + e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

Vector sample_ellipsoid_boundary(const Matrix& X, std::mt19937_64& rng) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(X));
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("sample_ellipsoid_boundary: X must be positive definite");
  std::normal_distribution<double> gauss;
  Vector u(X.rows());
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = gauss(rng);
  u.normalize();
  const Vector scaled = eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * u;
  return eig.eigenvectors() * scaled;
}

TrajectoryBounds evaluate_trajectory_bounds(const Certificate& cert,
                                            const AnalysisProblem& problem,
                                            const NonlinMap& nonlin, const Vector& x0,
                                            int horizon, double decay_K) {
  const Trajectory traj = simulate_loop(problem.system, nonlin, x0, horizon);
  const Matrix X = cert.X();
  const double budget = x0.dot(X * x0);
  const double rho = cert.rho;

  TrajectoryBounds out;
  out.worst_per_slack = kInf;
  out.decay_margin = kInf;
  double running = 0.0;  // sum_{t<T} alpha ||rho^-t z_t||^2
  double wT = 1.0;       // rho^-T
  for (int T = 0; T < horizon; ++T) {
    const double znorm2 = traj.z[T].squaredNorm();
    out.worst_per_slack =
        std::min(out.worst_per_slack, budget - (running + cert.beta * wT * wT * znorm2));
    out.sup_z = std::max(out.sup_z, std::sqrt(znorm2));
    if (cert.H.size() > 0)
      out.sup_Hx = std::max(out.sup_Hx, std::abs(cert.H.dot(traj.x[T])) * wT);
    out.decay_margin =
        std::min(out.decay_margin, decay_K / wT - traj.x[T].norm());
    running += cert.alpha * wT * wT * znorm2;
    wT /= rho;
  }
  return out;
}

VerificationReport verify_certificate(const Certificate& cert, const AnalysisProblem& problem,
                                      const VerifyOptions& opt, const std::string& expected_sha) {
  if (!expected_sha.empty() && !cert.problem_sha.empty() && expected_sha != cert.problem_sha)
    throw std::invalid_argument("verify_certificate: problem fingerprint mismatch");

  AnalysisProblem shaped = problem;
  shaped.shape = cert.shape;
  if (cert.n != problem.system.n() || cert.d != problem.system.d())
    throw std::invalid_argument("verify_certificate: certificate does not match the plant size");

  AssembleOptions aopt;
  aopt.eps = cert.eps;
  aopt.scale_estimate = 0.0;
  aopt.enable_multiplier = cert.multiplier_enabled;
  const SdpProblem sp = cert.sector_enabled
                            ? assemble_sector_program(shaped, cert.mu, aopt)
                            : assemble_stability_program(shaped, aopt);
  const Vector vars = pack_certificate(sp, cert);

  VerificationReport report;
  report.pass = true;
  auto push = [&](CheckItem item) {
    report.pass = report.pass && item.pass;
    report.items.push_back(std::move(item));
  };

  // constraint blocks at the certified values
  const std::vector<ConstraintMargin> fresh = evaluate_margins(sp, vars);
  double dissipation_margin = 0.0;
  for (const ConstraintMargin& m : fresh) {
    CheckItem item;
    item.name = "margin:" + m.name;
    item.worst = m.value;
    double stored = std::numeric_limits<double>::quiet_NaN();
    for (const ConstraintMargin& s : cert.margins)
      if (s.name == m.name) stored = s.value;
    const bool exact = (m.name == "dhd" || m.name == "epigraph");
    item.tol = exact ? -1e-12 : 0.0;
    item.pass = m.value >= item.tol &&
                (std::isnan(stored) ||
                 m.value >= stored - opt.margin_rel * (1.0 + std::abs(stored)));
    item.detail = "recomputed " + sci(m.value) +
                  (std::isnan(stored) ? "" : ", stored " + sci(stored));
    if (m.name == "dissipation") dissipation_margin = m.value;
    push(std::move(item));
  }

  // trace(X) <= gamma^2
  const Matrix X = cert.X();
  {
    CheckItem item;
    item.name = "trace(X) <= gamma^2";
    item.worst = cert.gamma * cert.gamma - X.trace();
    item.tol = -1e-9 * (1.0 + cert.gamma * cert.gamma);
    item.pass = item.worst >= item.tol;
    push(std::move(item));
  }

  // eta0 = col(0, x0) identity defining X
  {
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    for (int k = 0; k < 8; ++k) {
      Vector x0(cert.n);
      for (int i = 0; i < cert.n; ++i) x0[i] = gauss(rng);
      Vector eta0 = Vector::Zero(cert.calX.rows());
      eta0.tail(cert.n) = x0;
      worst = std::max(worst, std::abs(eta0.dot(cert.calX * eta0) - x0.dot(X * x0)));
    }
    CheckItem item;
    item.name = "eta0 identity";
    item.worst = worst;
    item.tol = 1e-10 * (1.0 + cert.calX.cwiseAbs().maxCoeff());
    item.pass = worst <= item.tol;
    push(std::move(item));
  }

  const double xmin = min_eigenvalue(X);
  {
    CheckItem item;
    item.name = "X positive definite";
    item.worst = xmin;
    item.tol = 0.0;
    item.pass = xmin > 0.0;
    push(std::move(item));
  }
  if (xmin <= 0.0 || dissipation_margin <= 0.0) return report;  // cannot sample trajectories

  // trajectory bounds from boundary initial conditions
  const double decay_K = std::sqrt(1.0 / dissipation_margin);
  std::vector<SlopeRestrictedFunction> funcs;
  if (cert.sector_enabled) {
    funcs.push_back(deadzone_function(cert.sector_l, cert.band.L, cert.d));
  } else {
    const ProfileKind kinds[] = {ProfileKind::RandomPiecewiseLinear, ProfileKind::Saturating,
                                 ProfileKind::SmoothSigmoid, ProfileKind::Linear,
                                 ProfileKind::Zero};
    for (int k = 0; k < std::max(1, opt.n_functions); ++k)
      funcs.push_back(make_profile(kinds[k % 5], cert.band, cert.d, opt.seed + 100 + k));
  }

  std::mt19937_64 rng(opt.seed);
  TrajectoryBounds worst;
  worst.worst_per_slack = kInf;
  worst.decay_margin = kInf;
  for (int k = 0; k < opt.n_initial; ++k) {
    const Vector x0 = sample_ellipsoid_boundary(X, rng);
    const SlopeRestrictedFunction& f = funcs[k % funcs.size()];
    const NonlinMap nonlin = [&f](const Vector& z) { return f.gradient(z); };
    const TrajectoryBounds tb =
        evaluate_trajectory_bounds(cert, problem, nonlin, x0, opt.horizon, decay_K);
    worst.worst_per_slack = std::min(worst.worst_per_slack, tb.worst_per_slack);
    worst.sup_z = std::max(worst.sup_z, tb.sup_z);
    worst.sup_Hx = std::max(worst.sup_Hx, tb.sup_Hx);
    worst.decay_margin = std::min(worst.decay_margin, tb.decay_margin);
  }

  {
    CheckItem item;
    item.name = "performance inequality";
    item.worst = worst.worst_per_slack;
    item.tol = -opt.per_tol;
    item.pass = item.worst >= item.tol;
    push(std::move(item));
  }
  if (cert.beta == 1.0) {
    CheckItem item;
    item.name = "output invariance sup||z|| <= 1";
    item.worst = worst.sup_z;
    item.tol = 1.0 + opt.z_tol;
    item.pass = item.worst <= item.tol;
    push(std::move(item));
  }
  if (cert.sector_enabled) {
    CheckItem item;
    item.name = "sector amplitude |H xbar| <= l";
    item.worst = worst.sup_Hx;
    item.tol = cert.sector_l + opt.h_tol;
    item.pass = item.worst <= item.tol;
    push(std::move(item));
  }
  {
    CheckItem item;
    item.name = "decay envelope ||x_t|| <= K rho^t";
    item.worst = worst.decay_margin;
    item.tol = -1e-6 * decay_K;
    item.pass = item.worst >= item.tol;
    item.detail = "K = " + sci(decay_K);
    push(std::move(item));
  }
  return report;
}

}  // namespace ozf
