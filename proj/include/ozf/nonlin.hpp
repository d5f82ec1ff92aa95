#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ozf/model.hpp"

namespace ozf {

/// Scalar profile s: monotone nondecreasing, 1-Lipschitz, s(0) = 0, with an
/// exact antiderivative. Either piecewise linear (breakpoints + per-segment
/// slopes in [0,1]) or tanh.
class Profile {
 public:
  enum class Type { PiecewiseLinear, Tanh };

  static Profile linear() { return piecewise_linear({}, {1.0}); }
  static Profile zero() { return piecewise_linear({}, {0.0}); }
  static Profile constant_slope(double sigma) { return piecewise_linear({}, {sigma}); }
  /// clamp(y, -a, a)
  static Profile saturating(double a);
  /// max(0, y-l) + min(0, y+l)
  static Profile deadzone(double l);
  static Profile smooth_sigmoid();
  /// slopes.size() == breakpoints.size() + 1; slopes in [0,1]; breakpoints increasing.
  static Profile piecewise_linear(std::vector<double> breakpoints, std::vector<double> slopes);

  double value(double y) const;
  /// Integral of value from 0 to y, segmentwise closed form for the pwl case.
  double antiderivative(double y) const;

  Type type() const { return type_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& slopes() const { return slopes_; }

 private:
  Profile() = default;
  Type type_ = Type::PiecewiseLinear;
  std::vector<double> breakpoints_;
  std::vector<double> slopes_;
  // per-breakpoint value/antiderivative tables, anchored at 0
  std::vector<double> value_at_bp_;
  std::vector<double> anti_at_bp_;
};

/// Member of S^0_{m,L}: gradient(x) = Q^T (m y + (L-m) s(y)), y = Q x, with
/// componentwise profiles s and orthogonal mixing Q. f(0) = 0, grad f(0) = 0,
/// and every gradient slope lies in [m, L] by construction.
struct SlopeRestrictedFunction {
  SlopeBand band;
  int dim = 1;
  std::vector<Profile> profiles;  // size dim
  Matrix mixing;                  // dim x dim orthogonal; identity when trivial
  std::string kind = "custom";
  std::uint64_t seed = 0;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// f_m = f - m q (convex); value and gradient.
  double fm_value(const Vector& x) const;
  Vector grad_fm(const Vector& x) const;  // gradient(x) - m x
  Vector grad_fL(const Vector& x) const;  // L x - gradient(x)
};

enum class ProfileKind { Saturating, SmoothSigmoid, RandomPiecewiseLinear, Linear, Zero };

ProfileKind profile_kind_from_string(const std::string& name);
std::string to_string(ProfileKind kind);

/// Test-function generator for the class. Random kinds draw all randomness
/// from the seed; RandomPiecewiseLinear additionally applies a random
/// orthogonal mixing for d > 1.
SlopeRestrictedFunction make_profile(ProfileKind kind, const SlopeBand& band, int d,
                                     std::uint64_t seed);

/// f with gradient dzn_{l,L} componentwise; member of S^0_{0,L}.
SlopeRestrictedFunction deadzone_function(double l, double L, int d);

/// Haar-like random orthogonal matrix (QR of a Gaussian sample).
Matrix random_orthogonal(int d, std::mt19937_64& rng);

std::pair<double, Vector> evaluate(const SlopeRestrictedFunction& f, const Vector& x);
std::pair<Vector, Vector> split_gradients(const SlopeRestrictedFunction& f, const Vector& x);

/// V(x) = (L-m) f_m(x) - 0.5 ||grad f_m(x)||^2.
double storage_V(const SlopeRestrictedFunction& f, const Vector& x);
/// S(u,y) = grad f_m(u)^T [grad f^L(u) - grad f^L(y)]; S(u,u) = 0.
double supply_S(const SlopeRestrictedFunction& f, const Vector& u, const Vector& y);

/// h-lift: value is the sum of blockwise values, gradient the blockwise stack.
SlopeRestrictedFunction lift(const SlopeRestrictedFunction& f, int h);

/// (Delta_rho^f zbar)_t = rho^-t grad f(rho^t zbar_t).
std::vector<Vector> delta_rho_apply(const SlopeRestrictedFunction& f, double rho,
                                    const std::vector<Vector>& zbar);

struct SubgradientBoundReport {
  long samples = 0;
  double worst_lower = 0.0;  // max over samples of f(x)+d^Th+m q(h)-f(x+h), <= 0 expected
  double worst_upper = 0.0;  // max over samples of f(x+h)-f(x)-d^Th-L q(h), <= 0 expected
  std::uint64_t seed = 0;
  bool pass(double tol) const { return worst_lower <= tol && worst_upper <= tol; }
};

/// Samples increments h and evaluates both quadratic subgradient bounds at x.
SubgradientBoundReport check_subgradient_bounds(const SlopeRestrictedFunction& f, const Vector& x,
                                                int n_samples, std::uint64_t seed);

}  // namespace ozf
