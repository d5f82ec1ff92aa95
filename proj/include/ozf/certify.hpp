#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ozf/multiplier.hpp"
#include "ozf/nonlin.hpp"
#include "ozf/sdp.hpp"

namespace ozf {

/// Series interconnection of the exponentially weighted plant (rho^-1 A,
/// rho^-1 B) with the multiplier filter; eta = (xi, xbar). calA is block
/// upper-triangular with diagonal blocks A_Psi and rho^-1 A; the output maps
/// calC, calD are affine in lambda and evaluated on demand.
struct InterconnectionMatrices {
  Matrix calA, calB, calCp;
  int n_psi = 0, n = 0, d = 0;
  int nu1 = 0, nu2 = 0;
  SlopeBand band;
  double rho = 1.0;

  Matrix calC_at(const Vector& lambda) const;
  Matrix calD_at(const Vector& lambda) const;
};

InterconnectionMatrices build_interconnection(const AnalysisProblem& problem);

/// Scalar decision variables: packed upper triangle of symmetric calX, then
/// lambda, E (row-major), H, epigraph scalar t.
struct VarLayout {
  int total = 0;
  int X_off = 0, X_dim = 0;
  int lam_off = -1, lam_len = 0;
  int E_off = -1, E_rows = 0, E_cols = 0;
  int H_off = -1, H_len = 0;
  int t_off = -1;

  int sym_index(int i, int j) const;
  Matrix unpack_X(const Vector& vars) const;
  Vector lambda_of(const Vector& vars) const;
  Matrix E_of(const Vector& vars) const;
  Vector H_of(const Vector& vars) const;
};

struct BlockSpec {
  std::string name;
  bool negdef = false;  // true: block <= -eps I required; false: block >= eps I
};

/// Assembled semidefinite program; `program` carries the folded (>= 0) form
/// handed to the solver, raw_blocks keep the original orientation for
/// a-posteriori verification.
struct SdpProblem {
  AnalysisProblem problem;
  bool sector_mode = false;
  bool multiplier_enabled = true;
  double mu = 0.0;
  double eps = 1e-7;
  VarLayout layout;
  std::vector<AffineMatrix> raw_blocks;
  std::vector<BlockSpec> block_specs;
  std::vector<AffineScalar> scalar_ineqs;  // d.h.d. system (remapped) + epigraph
  sdp::ConeProgram program;
};

struct AssembleOptions {
  double eps = 1e-7;            // strictness margin, eps_effective = eps*(1+scale_estimate)
  double scale_estimate = 0.0;  // optional size estimate of calX
  bool enable_multiplier = true;

  double effective_eps() const { return eps * (1.0 + scale_estimate); }
};

/// Global stability/performance program with epigraph objective trace(X) <= t, min t.
SdpProblem assemble_stability_program(const AnalysisProblem& problem, const AssembleOptions& opt = {});

/// Regional program for fixed mu >= 0 (d = 1 only): adds the generalized
/// sector row H, the mu-weighted sector term in the first block, and the
/// Schur-enlarged amplitude block [[l^2 (calX + calZ(E)), (0 H)^T], [(0 H), 1]].
SdpProblem assemble_sector_program(const AnalysisProblem& problem, double mu,
                               const AssembleOptions& opt = {});

struct ConstraintMargin {
  std::string name;
  double value = 0.0;
};

/// Persisted proof object: solved variables plus enough metadata to re-verify
/// every constraint and every trajectory bound from scratch.
struct Certificate {
  Matrix calX;
  Vector lambda;  // empty when the multiplier was disabled
  Matrix E;
  double mu = 0.0;
  Vector H;  // empty outside sector mode
  double gamma = 0.0;
  double rho = 1.0, alpha = 0.0, beta = 0.0;
  SlopeBand band;
  MultiplierShape shape;
  bool sector_enabled = false;
  double sector_l = 0.0;
  bool multiplier_enabled = true;
  int n = 0, d = 0;
  double eps = 0.0;
  std::string problem_sha;
  std::string solver_name, solver_status;
  std::vector<ConstraintMargin> margins;

  /// Bottom-right n x n block of calX (eta_0 = col(0, x0)).
  Matrix X() const { return calX.bottomRightCorner(n, n); }
};

struct CertifyReport {
  sdp::SolveStatus status = sdp::SolveStatus::Stalled;
  std::optional<Certificate> certificate;
  std::string message;
  double seconds = 0.0;
  int newton_steps = 0;
};

/// Runs the conic solver and extracts a Certificate with re-evaluated margins.
CertifyReport solve(const SdpProblem& sdp_problem, const sdp::SolverOptions& options = {});

std::vector<double> default_mu_grid();

struct MuPoint {
  double mu = 0.0;
  sdp::SolveStatus status = sdp::SolveStatus::Stalled;
  double gamma = 0.0;
};

struct LineSearchResult {
  std::optional<Certificate> best;
  std::vector<MuPoint> profile;
  double seconds = 0.0;
};

/// Solves the sector program per grid point and keeps the gamma-minimal
/// certificate (first minimum on ties; duplicated grid values are idempotent).
LineSearchResult mu_linesearch(const AnalysisProblem& problem, const std::vector<double>& mu_grid,
                               const AssembleOptions& assemble = {},
                               const sdp::SolverOptions& solver = {});

enum class SweepVariant { SectorOnly, SectorPlusOzf };
std::string to_string(SweepVariant variant);

struct SweepCell {
  double L = 0.0;
  SweepVariant variant = SweepVariant::SectorOnly;
  bool feasible = false;
  double gamma = 0.0;
  double size = 0.0;  // 1/gamma
  double mu = 0.0;
  double seconds = 0.0;
  std::string status;
};

struct SweepOptions {
  MultiplierShape shape{1, 1};  // used by the SectorPlusOzf variant
  double rho = 1.0, alpha = 0.0, beta = 1.0;
  std::vector<double> mu_grid = default_mu_grid();
  AssembleOptions assemble;
  sdp::SolverOptions solver;
};

/// Per saturation gain L: transforms the saturated loop to deadzone form and
/// line-searches mu for each requested variant. Cells are ordered (L, variant);
/// per-cell failures are recorded, never thrown.
std::vector<SweepCell> sweep_gain_grid(const LtiSystem& plant, double l,
                                       const std::vector<double>& gains,
                                       const std::vector<SweepVariant>& variants,
                                       const SweepOptions& opt = {});

struct CheckItem {
  std::string name;
  bool pass = false;
  double worst = 0.0;
  double tol = 0.0;
  std::string detail;
};

struct VerificationReport {
  bool pass = false;
  std::vector<CheckItem> items;
};

struct VerifyOptions {
  int n_initial = 100;
  int horizon = 200;
  int n_functions = 20;
  std::uint64_t seed = 1;
  double per_tol = 1e-6;    // slack on the performance inequality
  double z_tol = 1e-6;      // slack on sup ||z|| <= 1
  double h_tol = 1e-8;      // slack on |H xbar| <= l
  double margin_rel = 1e-6; // allowed drift between stored and recomputed margins
};

/// Re-assembles every constraint block at the certified values (extreme
/// eigenvalues), re-checks the d.h.d. system, and simulates the loop from
/// sampled initial conditions on {x0: x0^T X x0 <= 1}: performance inequality,
/// output invariance for beta = 1, |H xbar_t| <= l in sector mode, and the
/// certificate-implied exponential decay envelope.
/// Throws std::invalid_argument when expected_sha is nonempty and differs from
/// the certificate fingerprint.
VerificationReport verify_certificate(const Certificate& cert, const AnalysisProblem& problem,
                                      const VerifyOptions& opt = {},
                                      const std::string& expected_sha = "");

/// Worst-case statistics of the certified bounds along one simulated loop
/// trajectory; shared by verify_certificate and the validate module.
struct TrajectoryBounds {
  double worst_per_slack = 0.0;  // min over T of x0^T X x0 - performance sum
  double sup_z = 0.0;
  double sup_Hx = 0.0;           // sup_t |H xbar_t| (0 when H is empty)
  double decay_margin = 0.0;     // min over t of K rho^t - ||x_t||
};

TrajectoryBounds evaluate_trajectory_bounds(const Certificate& cert,
                                            const AnalysisProblem& problem,
                                            const NonlinMap& nonlin, const Vector& x0,
                                            int horizon, double decay_K);

/// Samples x0 on the boundary {x0^T X x0 = 1}; X must be positive definite.
Vector sample_ellipsoid_boundary(const Matrix& X, std::mt19937_64& rng);

}  // namespace ozf
