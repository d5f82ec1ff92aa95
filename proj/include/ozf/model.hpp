#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ozf/dense.hpp"

namespace ozf {

/// Discrete-time plant x+ = A x + B w, z = C x + D w.
struct LtiSystem {
  Matrix A, B, C, D;

  int n() const { return static_cast<int>(A.rows()); }
  int d() const { return static_cast<int>(C.rows()); }

  /// Validates dimension consistency; D defaults to the zero matrix.
  static LtiSystem make(Matrix A, Matrix B, Matrix C, std::optional<Matrix> D = std::nullopt);

  bool has_zero_feedthrough() const { return D.size() == 0 || D.isZero(0.0); }
  /// Analysis and explicit simulation both require D = 0 exactly.
  void require_explicit() const;
};

/// Slope interval [m, L], m < L, both finite.
struct SlopeBand {
  double m = 0.0;
  double L = 1.0;

  static SlopeBand make(double m, double L);
  double width() const { return L - m; }
};

struct SectorSpec {
  double l = 0.0;
  bool enabled = false;
};

struct MultiplierShape {
  int nu1 = 0;
  int nu2 = 0;
};

struct AnalysisProblem {
  LtiSystem system;
  SlopeBand band;
  double rho = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  SectorSpec sector;
  MultiplierShape shape;

  /// Throws std::invalid_argument on any violated precondition
  /// (rho in (0,1], alpha/beta >= 0, l > 0 when sector enabled, D = 0, m < L).
  void validate() const;
};

/// Sampled loop trajectory; x has horizon+1 entries, z and w have horizon entries,
/// with x[t+1] = A x[t] + B w[t], z[t] = C x[t], w[t] = nonlin(z[t]).
struct Trajectory {
  std::vector<Vector> x, z, w;
  int horizon = 0;
};

/// Raised when simulate_loop encounters a non-finite state.
struct SimulationDiverged : std::runtime_error {
  int step;
  explicit SimulationDiverged(int step_);
};

/// S_{m,L} = [[L, -1], [-m, 1]]; maps (z, w) to (Lz - w, -mz + w).
Matrix sector_transform_matrix(const SlopeBand& band);

/// t-th output sample is rho^t * input sample. exp_weight(., rho) and
/// exp_weight(., 1/rho) are mutually inverse.
std::vector<Vector> exp_weight(const std::vector<Vector>& signal, double rho);

double deadzone(double x, double l, double L);
double saturation(double x, double l, double L);
Vector deadzone(const Vector& x, double l, double L);
Vector saturation(const Vector& x, double l, double L);

/// Deadzone-form loop produced by loop_transform_saturation.
struct DeadzoneLoop {
  LtiSystem system;  // A + L*B*C, -B, C
  double l = 0.0;
  double L = 0.0;
};

/// Rewrites x+ = A x + B sat_{l,L}(Cx) as x+ = (A + L B C) x - B dzn_{l,L}(Cx);
/// both loops produce identical state trajectories.
DeadzoneLoop loop_transform_saturation(const LtiSystem& system, double l, double L);

using NonlinMap = std::function<Vector(const Vector&)>;

/// Simulates the explicit loop (D = 0). Throws SimulationDiverged with the
/// first non-finite step index if the iteration blows up.
Trajectory simulate_loop(const LtiSystem& system, const NonlinMap& nonlin, const Vector& x0,
                         int horizon);

}  // namespace ozf
