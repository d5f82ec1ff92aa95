#include "ozf/nonlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ozf {

Profile Profile::saturating(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("Profile::saturating: a must be positive");
  return piecewise_linear({-a, a}, {0.0, 1.0, 0.0});
}

Profile Profile::deadzone(double l) {
  if (!(l > 0.0)) throw std::invalid_argument("Profile::deadzone: l must be positive");
  return piecewise_linear({-l, l}, {1.0, 0.0, 1.0});
}

Profile Profile::smooth_sigmoid() {
  Profile p;
  p.type_ = Type::Tanh;
  return p;
}

Profile Profile::piecewise_linear(std::vector<double> breakpoints, std::vector<double> slopes) {
  if (slopes.size() != breakpoints.size() + 1)
    throw std::invalid_argument("Profile: need one slope per segment");
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (!(breakpoints[i] < breakpoints[i + 1]))
      throw std::invalid_argument("Profile: breakpoints must be strictly increasing");
  for (double s : slopes)
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("Profile: slopes must lie in [0,1]");

  Profile p;
  p.type_ = Type::PiecewiseLinear;
  p.breakpoints_ = std::move(breakpoints);
  p.slopes_ = std::move(slopes);

  const auto& b = p.breakpoints_;
  const auto& sl = p.slopes_;
  const std::size_t K = b.size();
  p.value_at_bp_.assign(K, 0.0);
  p.anti_at_bp_.assign(K, 0.0);
  if (K > 0) {
    // segment index containing 0: slopes[j] applies on (b[j-1], b[j])
    std::size_t j0 = std::upper_bound(b.begin(), b.end(), 0.0) - b.begin();
    // propagate s and its integral outward from the anchor s(0)=0, S(0)=0
    auto seg = [&](double from, double s_from, double S_from, double slope, double to,
                   double& s_to, double& S_to) {
      s_to = s_from + slope * (to - from);
      S_to = S_from + s_from * (to - from) + 0.5 * slope * (to - from) * (to - from);
    };
    if (j0 < K) seg(0.0, 0.0, 0.0, sl[j0], b[j0], p.value_at_bp_[j0], p.anti_at_bp_[j0]);
    for (std::size_t i = j0; i + 1 < K; ++i)
      seg(b[i], p.value_at_bp_[i], p.anti_at_bp_[i], sl[i + 1], b[i + 1], p.value_at_bp_[i + 1],
          p.anti_at_bp_[i + 1]);
    if (j0 > 0)
      seg(0.0, 0.0, 0.0, sl[j0], b[j0 - 1], p.value_at_bp_[j0 - 1], p.anti_at_bp_[j0 - 1]);
    for (std::size_t i = j0; i >= 2; --i)
      seg(b[i - 1], p.value_at_bp_[i - 1], p.anti_at_bp_[i - 1], sl[i - 1], b[i - 2],
          p.value_at_bp_[i - 2], p.anti_at_bp_[i - 2]);
  }
  return p;
}

double Profile::value(double y) const {
  if (type_ == Type::Tanh) return std::tanh(y);
  const auto& b = breakpoints_;
  if (b.empty()) return slopes_[0] * y;
  std::size_t j = std::upper_bound(b.begin(), b.end(), y) - b.begin();
  std::size_t anchor = (j == 0) ? 0 : j - 1;
  return value_at_bp_[anchor] + slopes_[j] * (y - b[anchor]);
}

double Profile::antiderivative(double y) const {
  if (type_ == Type::Tanh) {
    // log cosh, overflow-safe
    double a = std::abs(y);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
  }
  const auto& b = breakpoints_;
  if (b.empty()) return 0.5 * slopes_[0] * y * y;
  std::size_t j = std::upper_bound(b.begin(), b.end(), y) - b.begin();
  std::size_t anchor = (j == 0) ? 0 : j - 1;
  const double p = b[anchor];
  const double sp = value_at_bp_[anchor];
  const double dy = y - p;
  return anti_at_bp_[anchor] + sp * dy + 0.5 * slopes_[j] * dy * dy;
}

namespace {

Vector mixed_coords(const SlopeRestrictedFunction& f, const Vector& x) {
  return f.mixing.size() == 0 ? x : Vector(f.mixing * x);
}

void check_dim(const SlopeRestrictedFunction& f, const Vector& x) {
  if (x.size() != f.dim)
    throw std::invalid_argument("SlopeRestrictedFunction: argument has wrong dimension");
}

}  // namespace

double SlopeRestrictedFunction::value(const Vector& x) const {
  check_dim(*this, x);
  const Vector y = mixed_coords(*this, x);
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) acc += profiles[i].antiderivative(y[i]);
  return 0.5 * band.m * x.squaredNorm() + band.width() * acc;
}

Vector SlopeRestrictedFunction::gradient(const Vector& x) const {
  check_dim(*this, x);
  const Vector y = mixed_coords(*this, x);
  Vector sy(dim);
  for (int i = 0; i < dim; ++i) sy[i] = profiles[i].value(y[i]);
  Vector g = band.m * y + band.width() * sy;
  return mixing.size() == 0 ? g : Vector(mixing.transpose() * g);
}

double SlopeRestrictedFunction::fm_value(const Vector& x) const {
  return value(x) - 0.5 * band.m * x.squaredNorm();
}

Vector SlopeRestrictedFunction::grad_fm(const Vector& x) const {
  return gradient(x) - band.m * x;
}

Vector SlopeRestrictedFunction::grad_fL(const Vector& x) const {
  return band.L * x - gradient(x);
}

ProfileKind profile_kind_from_string(const std::string& name) {
  if (name == "saturating") return ProfileKind::Saturating;
  if (name == "smooth-sigmoid") return ProfileKind::SmoothSigmoid;
  if (name == "random-piecewise-linear") return ProfileKind::RandomPiecewiseLinear;
  if (name == "linear") return ProfileKind::Linear;
  if (name == "zero") return ProfileKind::Zero;
  throw std::invalid_argument("unknown profile kind: " + name);
}

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Saturating: return "saturating";
    case ProfileKind::SmoothSigmoid: return "smooth-sigmoid";
    case ProfileKind::RandomPiecewiseLinear: return "random-piecewise-linear";
    case ProfileKind::Linear: return "linear";
    case ProfileKind::Zero: return "zero";
  }
  throw std::invalid_argument("unknown profile kind");
}

Matrix random_orthogonal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  // fix column signs so the factorization is unique-ish
  Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  return Q;
}

namespace {

Profile random_pwl_profile(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nbp(2, 6);
  std::uniform_real_distribution<double> pos(-8.0, 8.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int K = nbp(rng);
  std::vector<double> bp(K);
  for (double& b : bp) b = pos(rng);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  std::vector<double> sl(bp.size() + 1);
  for (double& s : sl) {
    const double u = unit(rng);
    // occasionally pin to the extreme slopes so the band edges get exercised
    s = (u < 0.15) ? 0.0 : (u > 0.85 ? 1.0 : unit(rng));
  }
  return Profile::piecewise_linear(std::move(bp), std::move(sl));
}

}  // namespace

SlopeRestrictedFunction make_profile(ProfileKind kind, const SlopeBand& band, int d,
                                     std::uint64_t seed) {
  SlopeBand::make(band.m, band.L);
  if (d < 1) throw std::invalid_argument("make_profile: dimension must be positive");
  std::mt19937_64 rng(seed);
  SlopeRestrictedFunction f;
  f.band = band;
  f.dim = d;
  f.kind = to_string(kind);
  f.seed = seed;
  f.profiles.reserve(d);
  switch (kind) {
    case ProfileKind::Linear:
      for (int i = 0; i < d; ++i) f.profiles.push_back(Profile::linear());
      break;
    case ProfileKind::Zero:
      for (int i = 0; i < d; ++i) f.profiles.push_back(Profile::zero());
      break;
    case ProfileKind::Saturating: {
      std::uniform_real_distribution<double> cap(0.5, 3.0);
      for (int i = 0; i < d; ++i) f.profiles.push_back(Profile::saturating(cap(rng)));
      break;
    }
    case ProfileKind::SmoothSigmoid:
      for (int i = 0; i < d; ++i) f.profiles.push_back(Profile::smooth_sigmoid());
      break;
    case ProfileKind::RandomPiecewiseLinear:
      for (int i = 0; i < d; ++i) f.profiles.push_back(random_pwl_profile(rng));
      if (d > 1) f.mixing = random_orthogonal(d, rng);
      break;
  }
  return f;
}

SlopeRestrictedFunction deadzone_function(double l, double L, int d) {
  if (!(L > 0.0)) throw std::invalid_argument("deadzone_function: L must be positive");
  SlopeRestrictedFunction f;
  f.band = SlopeBand::make(0.0, L);
  f.dim = d;
  f.kind = "deadzone";
  for (int i = 0; i < d; ++i) f.profiles.push_back(Profile::deadzone(l));
  return f;
}

std::pair<double, Vector> evaluate(const SlopeRestrictedFunction& f, const Vector& x) {
  return {f.value(x), f.gradient(x)};
}

std::pair<Vector, Vector> split_gradients(const SlopeRestrictedFunction& f, const Vector& x) {
  const Vector g = f.gradient(x);
  return {g - f.band.m * x, f.band.L * x - g};
}

double storage_V(const SlopeRestrictedFunction& f, const Vector& x) {
  const Vector gm = f.grad_fm(x);
  return f.band.width() * f.fm_value(x) - 0.5 * gm.squaredNorm();
}

double supply_S(const SlopeRestrictedFunction& f, const Vector& u, const Vector& y) {
  return f.grad_fm(u).dot(f.grad_fL(u) - f.grad_fL(y));
}

SlopeRestrictedFunction lift(const SlopeRestrictedFunction& f, int h) {
  if (h < 1) throw std::invalid_argument("lift: h must be at least 1");
  SlopeRestrictedFunction g;
  g.band = f.band;
  g.dim = f.dim * h;
  g.kind = f.kind;
  g.seed = f.seed;
  g.profiles.reserve(g.dim);
  for (int k = 0; k < h; ++k)
    g.profiles.insert(g.profiles.end(), f.profiles.begin(), f.profiles.end());
  if (f.mixing.size() != 0) {
    g.mixing = Matrix::Zero(g.dim, g.dim);
    for (int k = 0; k < h; ++k) g.mixing.block(k * f.dim, k * f.dim, f.dim, f.dim) = f.mixing;
  }
  return g;
}

std::vector<Vector> delta_rho_apply(const SlopeRestrictedFunction& f, double rho,
                                    const std::vector<Vector>& zbar) {
  if (!(rho > 0.0)) throw std::invalid_argument("delta_rho_apply: rho must be positive");
  std::vector<Vector> out;
  out.reserve(zbar.size());
  double w = 1.0;  // rho^t
  for (const Vector& zt : zbar) {
    out.push_back(f.gradient(w * zt) / w);
    w *= rho;
  }
  return out;
}

SubgradientBoundReport check_subgradient_bounds(const SlopeRestrictedFunction& f, const Vector& x,
                                                int n_samples, std::uint64_t seed) {
  check_dim(f, x);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> scale(0.0, 5.0);
  SubgradientBoundReport rep;
  rep.seed = seed;
  const double fx = f.value(x);
  const Vector d = f.gradient(x);
  rep.worst_lower = rep.worst_upper = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    Vector h(f.dim);
    for (int i = 0; i < f.dim; ++i) h[i] = gauss(rng);
    h *= scale(rng);
    const double fxh = f.value(x + h);
    const double lin = fx + d.dot(h);
    const double q = 0.5 * h.squaredNorm();
    rep.worst_lower = std::max(rep.worst_lower, lin + f.band.m * q - fxh);
    rep.worst_upper = std::max(rep.worst_upper, fxh - lin - f.band.L * q);
    ++rep.samples;
  }
  return rep;
}

}  // namespace ozf
