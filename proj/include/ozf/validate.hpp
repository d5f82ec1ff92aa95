#pragma once

#include <cstdint>
#include <string>

#include "ozf/certify.hpp"
#include "ozf/multiplier.hpp"
#include "ozf/nonlin.hpp"

namespace ozf {

/// Result of one sampling-based falsification check. pass <=> worst <= tol.
/// worst is the largest normalized violation seen (negative = inequality held
/// with slack everywhere); seed replays the exact sample stream.
struct CheckReport {
  std::string name;
  long samples = 0;
  double worst = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  std::string detail;

  std::string summary() const;  // one-line CI summary
};

/// Dissipation inequality V(u) - V(y) <= S(u,y), normalized by 1+|V(u)|+|V(y)|.
CheckReport check_dissipation(const SlopeRestrictedFunction& f, int n_samples, double radius,
                              double tol, std::uint64_t seed);

/// Static quadratic constraint 0 <= grad fm~(u)^T (M (x) I_d) grad fL~(u) on
/// the h-lift of f, h = M.rows(). When M is not d.h.d. the report notes that
/// violations are expected (informative falsification mode).
CheckReport check_static_qc(const SlopeRestrictedFunction& f, const Matrix& M, int n_samples,
                            double radius, std::uint64_t seed);

/// Terminal-cost IQC: for random zbar and wbar = Delta_rho^f(zbar), the running
/// cost dominates the terminal cost at every truncation T <= T_max.
/// Throws std::invalid_argument when (lambda, E) violates the constraint
/// system (the IQC's precondition).
CheckReport check_iqc(const SlopeRestrictedFunction& f, const FirMultiplier& mult,
                      const SlopeBand& band, double rho, int n_signals, int T_max,
                      std::uint64_t seed);

/// Certified stability/invariance conclusions along simulated loop trajectories from
/// boundary initial conditions.
CheckReport check_closed_loop_performance(const Certificate& cert, const AnalysisProblem& problem,
                                          int n_initial, int horizon, std::uint64_t seed);

/// Central finite differences of f's value against its gradient; near profile
/// kinks the comparison relaxes to the curvature-jump bound (L-m+1)*step.
CheckReport finite_diff_check(const SlopeRestrictedFunction& f, int n_points, double step,
                              std::uint64_t seed);

/// Feasible (lambda, E) produced by a linear-program feasibility solve of
/// dhd_constraint_system with a seeded random objective and box bounds.
FirMultiplier find_feasible_multiplier(int nu1, int nu2, double rho, std::uint64_t seed);

}  // namespace ozf
