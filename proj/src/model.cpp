#include "ozf/model.hpp"

#include <cmath>
#include <string>

namespace ozf {

LtiSystem LtiSystem::make(Matrix A, Matrix B, Matrix C, std::optional<Matrix> D) {
  if (A.rows() != A.cols()) throw std::invalid_argument("LtiSystem: A must be square");
  const auto n = A.rows();
  if (B.rows() != n) throw std::invalid_argument("LtiSystem: B row count != n");
  if (C.cols() != n) throw std::invalid_argument("LtiSystem: C column count != n");
  const auto d = C.rows();
  if (B.cols() != d) throw std::invalid_argument("LtiSystem: B column count != d");
  Matrix Dm = D.value_or(Matrix::Zero(d, d));
  if (Dm.rows() != d || Dm.cols() != d) throw std::invalid_argument("LtiSystem: D must be d x d");
  return LtiSystem{std::move(A), std::move(B), std::move(C), std::move(Dm)};
}

void LtiSystem::require_explicit() const {
  if (!has_zero_feedthrough())
    throw std::invalid_argument("LtiSystem: D must be exactly zero for this operation");
}

SlopeBand SlopeBand::make(double m, double L) {
  if (!std::isfinite(m) || !std::isfinite(L))
    throw std::invalid_argument("SlopeBand: m and L must be finite");
  if (!(m < L)) throw std::invalid_argument("SlopeBand: need m < L strictly");
  return SlopeBand{m, L};
}

void AnalysisProblem::validate() const {
  SlopeBand::make(band.m, band.L);
  system.require_explicit();
  if (!(rho > 0.0) || rho > 1.0)
    throw std::invalid_argument("AnalysisProblem: rho must lie in (0, 1]");
  if (alpha < 0.0 || beta < 0.0)
    throw std::invalid_argument("AnalysisProblem: alpha and beta must be nonnegative");
  if (sector.enabled && !(sector.l > 0.0))
    throw std::invalid_argument("AnalysisProblem: sector width l must be positive");
  if (shape.nu1 < 0 || shape.nu2 < 0)
    throw std::invalid_argument("AnalysisProblem: multiplier lengths must be nonnegative");
}

SimulationDiverged::SimulationDiverged(int step_)
    : std::runtime_error("simulation diverged (non-finite value) at step " +
                         std::to_string(step_)),
      step(step_) {}

Matrix sector_transform_matrix(const SlopeBand& band) {
  SlopeBand::make(band.m, band.L);
  Matrix S(2, 2);
  S << band.L, -1.0, -band.m, 1.0;
  return S;
}

std::vector<Vector> exp_weight(const std::vector<Vector>& signal, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("exp_weight: rho must be positive");
  std::vector<Vector> out;
  out.reserve(signal.size());
  double w = 1.0;
  for (const Vector& s : signal) {
    out.push_back(w * s);
    w *= rho;
  }
  return out;
}

namespace {
void check_deadzone_params(double l, double L) {
  if (!(l > 0.0)) throw std::invalid_argument("deadzone: l must be positive");
  if (!(L > 0.0)) throw std::invalid_argument("deadzone: L must be positive");
}
}  // namespace

double deadzone(double x, double l, double L) {
  check_deadzone_params(l, L);
  if (x >= l) return L * (x - l);
  if (x <= -l) return L * (x + l);
  return 0.0;
}

double saturation(double x, double l, double L) { return L * x - deadzone(x, l, L); }

Vector deadzone(const Vector& x, double l, double L) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = deadzone(x[i], l, L);
  return out;
}

Vector saturation(const Vector& x, double l, double L) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = saturation(x[i], l, L);
  return out;
}

DeadzoneLoop loop_transform_saturation(const LtiSystem& system, double l, double L) {
  system.require_explicit();
  if (!(l > 0.0)) throw std::invalid_argument("loop_transform_saturation: l must be positive");
  if (L < 0.0) throw std::invalid_argument("loop_transform_saturation: L must be nonnegative");
  LtiSystem transformed = system;
  transformed.A = system.A + L * system.B * system.C;
  transformed.B = -system.B;
  return DeadzoneLoop{std::move(transformed), l, L};
}

Trajectory simulate_loop(const LtiSystem& system, const NonlinMap& nonlin, const Vector& x0,
                         int horizon) {
  system.require_explicit();
  if (x0.size() != system.n()) throw std::invalid_argument("simulate_loop: x0 has wrong size");
  if (horizon < 0) throw std::invalid_argument("simulate_loop: horizon must be nonnegative");

  Trajectory traj;
  traj.horizon = horizon;
  traj.x.reserve(horizon + 1);
  traj.z.reserve(horizon);
  traj.w.reserve(horizon);

  Vector x = x0;
  for (int t = 0; t < horizon; ++t) {
    if (!x.allFinite()) throw SimulationDiverged(t);
    traj.x.push_back(x);
    Vector z = system.C * x;
    Vector w = nonlin(z);
    if (!z.allFinite() || !w.allFinite()) throw SimulationDiverged(t);
    traj.z.push_back(z);
    traj.w.push_back(std::move(w));
    x = system.A * traj.x.back() + system.B * traj.w.back();
  }
  if (!x.allFinite()) throw SimulationDiverged(horizon);
  traj.x.push_back(std::move(x));
  return traj;
}

}  // namespace ozf
