#pragma once

#include <random>
#include <vector>

#include "ozf/affine.hpp"
#include "ozf/model.hpp"

namespace ozf {

/// FIR multiplier coefficients lambda = (lambda_{nu1},...,lambda_1 | lambda_0 |
/// lambda_{-1},...,lambda_{-nu2}) plus terminal-cost matrix E (nu2 x nu1).
/// Feasibility w.r.t. the doubly-hyperdominant constraint system is checkable
/// via dhd_constraint_system, never assumed.
struct FirMultiplier {
  int nu1 = 0;
  int nu2 = 0;
  Vector lambda;  // length nu1 + 1 + nu2
  Matrix E;       // nu2 x nu1 (0x0 when either length is zero)

  static FirMultiplier make(int nu1, int nu2, Vector lambda, Matrix E);
  /// Static multiplier lambda_0 = value, no dynamics.
  static FirMultiplier static_gain(double lambda0);

  int h0() const { return nu1 + 1 + nu2; }
  /// lambda_k for -nu2 <= k <= nu1, zero outside.
  double coeff(int k) const;
};

/// T^h(lambda): entry (i,j) = lambda_{i-j} for -nu2 <= i-j <= nu1, else 0.
Matrix toeplitz_matrix(const Vector& lambda, int nu1, int nu2, int h);

/// Partition of T^{nu1+1+nu2}(lambda) in rows (nu1+1)+nu2, cols (nu2+1)+nu1:
/// [[T12, T11], [T22, T21]].
struct ToeplitzBlocks {
  Matrix T12, T11, T22, T21;
};
ToeplitzBlocks toeplitz_blocks(const Vector& lambda, int nu1, int nu2);

/// Causal convolution matrices of the two FIR channels:
/// D1^h = T^h(lambda^1, lambda_0, 0), D2^h = T^h(lambda^2, 0, 0), so that
/// stacked y1 = (D1 (x) I_d) u1, y2 = (D2 (x) I_d) u2 and D2^T + D1 = T^h(lambda).
Matrix channel1_conv_matrix(const FirMultiplier& mult, int h);
Matrix channel2_conv_matrix(const FirMultiplier& mult, int h);

/// B_j^h = (J^{h-1} e_nu, ..., J e_nu, e_nu): maps stacked inputs to the filter
/// state after h steps; equals [0 I_nu] for h = nu1+1+nu2.
Matrix impulse_basis(int nu, int h);

/// State-space realization of the filter whose output is v = (y1, u1, y2, u2)
/// when driven with (z, w); (u1, u2) = (S_{m,L} (x) I_d)(z, w), y1 = psi1 u1,
/// y2 = psi2 u2. A is block-Jordan nilpotent. The output ordering is fixed;
/// running_cost_P depends on it.
struct FilterRealization {
  Matrix A, B, C, D;
  int nu1 = 0, nu2 = 0, d = 1;
  SlopeBand band;

  int state_dim() const { return (nu1 + nu2) * d; }
};

FilterRealization filter_realization(const FirMultiplier& mult, const SlopeBand& band, int d);

/// Filter response v_0..v_{T-1} and states xi_0..xi_T (xi_0 = 0) for inputs (z, w).
struct FilterRun {
  std::vector<Vector> v;
  std::vector<Vector> xi;
};
FilterRun run_filter(const FilterRealization& fil, const std::vector<Vector>& z,
                     const std::vector<Vector>& w);

/// 4d x 4d running cost: v^T P v = 2 (y1^T u2 + u1^T y2).
Matrix running_cost_P(int d);

/// Z(E) = [[0, E^T (x) I_d], [E (x) I_d, 0]], size (nu1+nu2)d.
Matrix terminal_cost_Z(const Matrix& E, int d);

struct DhdReport {
  bool ok = false;
  double worst_offdiag = 0.0;  // max off-diagonal entry (<= tol required)
  double worst_row_sum = 0.0;  // min row sum (>= -tol required)
  double worst_col_sum = 0.0;  // min column sum (>= -tol required)
};
/// Doubly hyperdominant test: off-diagonals <= tol, row/column sums >= -tol.
DhdReport dhd_check(const Matrix& M, double tol);

/// [[T12, T11], [T22, T21 - E]], the bracket of the feasibility constraint;
/// equals T^{h0}(lambda) with E subtracted from the bottom-right corner.
Matrix constraint_bracket(const FirMultiplier& mult);

/// Affine inequality system over variables (lambda | E row-major):
/// non-positivity of off-diagonal entries of F * bracket * F, nonnegativity of
/// its row and column sums, and the two weighted coefficient sums
/// sum_k lambda_k rho^{±k} >= 0. All constraints are of the form expr >= 0.
struct DhdConstraintSystem {
  int nu1 = 0, nu2 = 0;
  double rho = 1.0;
  int num_vars = 0;  // h0 + nu1*nu2
  int lambda_offset = 0;
  int E_offset = 0;  // E stored row-major after lambda
  std::vector<AffineScalar> constraints;

  Vector pack(const FirMultiplier& mult) const;
  /// Worst (most negative) slack of all constraints at the given multiplier.
  double worst_slack(const FirMultiplier& mult) const;
  bool feasible(const FirMultiplier& mult, double tol = 0.0) const;
};
DhdConstraintSystem dhd_constraint_system(int nu1, int nu2, double rho);

/// M^h_{rho^-1} = F^h [T^h(lambda) - (B2^h)^T E B1^h] F^h.
Matrix lifted_multiplier_matrix(const FirMultiplier& mult, double rho, int h);

/// Constructive sampler of a feasible (lambda, E): off-diagonal coefficients
/// drawn nonpositive, E compatible entrywise, lambda_0 lifted to cover all
/// weighted sum constraints with a random positive slack.
FirMultiplier sample_feasible_multiplier(int nu1, int nu2, double rho, std::mt19937_64& rng);

/// Both sides of the lifted identities: running = 0.5 sum v^T P v from the
/// simulated realization, terminal = 0.5 xi_h^T Z(E) xi_h, toeplitz_form =
/// u2^T (T^h (x) I_d) u1, terminal_form = u2^T ((B2^T E B1) (x) I_d) u1.
/// running == toeplitz_form and terminal == terminal_form up to round-off.
struct LiftedFormCheck {
  double running = 0.0;
  double terminal = 0.0;
  double toeplitz_form = 0.0;
  double terminal_form = 0.0;
};
LiftedFormCheck lifted_form_oracle(const FirMultiplier& mult, const SlopeBand& band, int d,
                                   const std::vector<Vector>& u1, const std::vector<Vector>& u2);

}  // namespace ozf
