#pragma once

#include <string>
#include <vector>

#include "ozf/affine.hpp"

namespace ozf::sdp {

/// Linear conic program
///   minimize objective . x
///   s.t.     blocks[j](x)       positive semidefinite
///            inequalities[k](x) >= 0.
/// A zero objective turns solve() into a pure feasibility search.
struct ConeProgram {
  int num_vars = 0;
  Vector objective;
  std::vector<AffineMatrix> blocks;
  std::vector<AffineScalar> inequalities;
};

enum class SolveStatus { Optimal, Infeasible, Stalled };

std::string to_string(SolveStatus status);

struct Solution {
  SolveStatus status = SolveStatus::Stalled;
  Vector x;
  double objective = 0.0;
  double gap = 0.0;           // final barrier duality-gap estimate
  double phase1_slack = 0.0;  // minimized uniform slack; negative means strictly feasible
  int newton_steps = 0;
  std::string message;
  std::vector<double> block_min_eig;  // smallest eigenvalue per block at x
  std::vector<double> ineq_slack;    // inequality values at x
};

struct SolverOptions {
  double gap_abs = 1e-9;
  double gap_rel = 1e-9;
  double infeasibility_tol = 1e-9;  // phase-1 optimum above this reports Infeasible
  double mu_factor = 0.2;
  int max_newton_per_center = 300;
  int max_total_newton = 60000;
  double time_limit_seconds = 0.0;  // 0 disables the limit
  // internal box |x_i| <= variable_bound keeping barrier centers well defined
  // (the feasible sets of Lyapunov-type programs are scaling-unbounded)
  double variable_bound = 1e8;
  bool verbose = false;
};

/// Two-phase log-barrier interior-point method. Returned points are strictly
/// feasible whenever status is Optimal.
Solution solve(const ConeProgram& program, const SolverOptions& options = {});

}  // namespace ozf::sdp
