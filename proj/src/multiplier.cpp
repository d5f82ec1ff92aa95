#include "ozf/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ozf {

FirMultiplier FirMultiplier::make(int nu1, int nu2, Vector lambda, Matrix E) {
  if (nu1 < 0 || nu2 < 0) throw std::invalid_argument("FirMultiplier: negative filter length");
  if (lambda.size() != nu1 + 1 + nu2)
    throw std::invalid_argument("FirMultiplier: lambda length must be nu1+1+nu2");
  if (E.rows() != nu2 || E.cols() != nu1)
    throw std::invalid_argument("FirMultiplier: E must be nu2 x nu1");
  return FirMultiplier{nu1, nu2, std::move(lambda), std::move(E)};
}

FirMultiplier FirMultiplier::static_gain(double lambda0) {
  Vector lam(1);
  lam << lambda0;
  return FirMultiplier{0, 0, std::move(lam), Matrix(0, 0)};
}

double FirMultiplier::coeff(int k) const {
  if (k > nu1 || k < -nu2) return 0.0;
  return lambda[nu1 - k];
}

Matrix toeplitz_matrix(const Vector& lambda, int nu1, int nu2, int h) {
  if (h < 1) throw std::invalid_argument("toeplitz_matrix: h must be positive");
  if (lambda.size() != nu1 + 1 + nu2)
    throw std::invalid_argument("toeplitz_matrix: lambda length must be nu1+1+nu2");
  Matrix T = Matrix::Zero(h, h);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j) {
      const int k = i - j;
      if (k <= nu1 && k >= -nu2) T(i, j) = lambda[nu1 - k];
    }
  return T;
}

ToeplitzBlocks toeplitz_blocks(const Vector& lambda, int nu1, int nu2) {
  const int h0 = nu1 + 1 + nu2;
  const Matrix T = toeplitz_matrix(lambda, nu1, nu2, h0);
  ToeplitzBlocks b;
  b.T12 = T.topLeftCorner(nu1 + 1, nu2 + 1);
  b.T11 = T.topRightCorner(nu1 + 1, nu1);
  b.T22 = T.bottomLeftCorner(nu2, nu2 + 1);
  b.T21 = T.bottomRightCorner(nu2, nu1);
  return b;
}

Matrix channel1_conv_matrix(const FirMultiplier& mult, int h) {
  Matrix D = Matrix::Zero(h, h);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j <= i; ++j)
      if (i - j <= mult.nu1) D(i, j) = mult.coeff(i - j);
  return D;
}

Matrix channel2_conv_matrix(const FirMultiplier& mult, int h) {
  Matrix D = Matrix::Zero(h, h);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < i; ++j)
      if (i - j <= mult.nu2) D(i, j) = mult.coeff(-(i - j));
  return D;
}

Matrix impulse_basis(int nu, int h) {
  if (nu < 0 || h < 1) throw std::invalid_argument("impulse_basis: bad dimensions");
  Matrix B = Matrix::Zero(nu, h);
  for (int s = 0; s < h; ++s) {
    const int p = h - 1 - s;  // column is J^p e_nu
    if (p < nu) B(nu - 1 - p, s) = 1.0;
  }
  return B;
}

FilterRealization filter_realization(const FirMultiplier& mult, const SlopeBand& band, int d) {
  SlopeBand::make(band.m, band.L);
  if (d < 1) throw std::invalid_argument("filter_realization: d must be positive");
  const int nu1 = mult.nu1, nu2 = mult.nu2;
  const int ns = nu1 + nu2;
  const Matrix S = sector_transform_matrix(band);

  Matrix A_small = Matrix::Zero(ns, ns);
  A_small.topLeftCorner(nu1, nu1) = jordan_shift(nu1);
  A_small.bottomRightCorner(nu2, nu2) = jordan_shift(nu2);

  Matrix Esel = Matrix::Zero(ns, 2);  // blkdiag(e_nu1, e_nu2)
  if (nu1 > 0) Esel(nu1 - 1, 0) = 1.0;
  if (nu2 > 0) Esel(ns - 1, 1) = 1.0;

  // the last state slot of each delay line holds the newest input, so the
  // output rows carry the coefficients oldest-first
  Matrix C_small = Matrix::Zero(4, ns);
  for (int i = 0; i < nu1; ++i) C_small(0, i) = mult.lambda[i];  // (l_nu1 .. l_1)
  for (int j = 0; j < nu2; ++j) C_small(2, nu1 + j) = mult.lambda[nu1 + nu2 - j];

  Matrix D_small = Matrix::Zero(4, 2);
  D_small(0, 0) = mult.coeff(0);
  D_small(1, 0) = 1.0;
  D_small(3, 1) = 1.0;

  FilterRealization fil;
  fil.nu1 = nu1;
  fil.nu2 = nu2;
  fil.d = d;
  fil.band = band;
  fil.A = kron_identity(A_small, d);
  fil.B = kron_identity(Matrix(Esel * S), d);
  fil.C = kron_identity(C_small, d);
  fil.D = kron_identity(Matrix(D_small * S), d);
  return fil;
}

FilterRun run_filter(const FilterRealization& fil, const std::vector<Vector>& z,
                     const std::vector<Vector>& w) {
  if (z.size() != w.size()) throw std::invalid_argument("run_filter: signal length mismatch");
  FilterRun run;
  const std::size_t T = z.size();
  run.v.reserve(T);
  run.xi.reserve(T + 1);
  Vector xi = Vector::Zero(fil.state_dim());
  run.xi.push_back(xi);
  for (std::size_t t = 0; t < T; ++t) {
    Vector in(2 * fil.d);
    in << z[t], w[t];
    run.v.push_back(fil.C * xi + fil.D * in);
    xi = fil.A * xi + fil.B * in;
    run.xi.push_back(xi);
  }
  return run;
}

Matrix running_cost_P(int d) {
  if (d < 1) throw std::invalid_argument("running_cost_P: d must be positive");
  Matrix P = Matrix::Zero(4 * d, 4 * d);
  for (int k = 0; k < d; ++k) {
    P(k, 3 * d + k) = P(3 * d + k, k) = 1.0;          // y1 <-> u2
    P(d + k, 2 * d + k) = P(2 * d + k, d + k) = 1.0;  // u1 <-> y2
  }
  return P;
}

Matrix terminal_cost_Z(const Matrix& E, int d) {
  const int nu2 = static_cast<int>(E.rows());
  const int nu1 = static_cast<int>(E.cols());
  Matrix Z = Matrix::Zero((nu1 + nu2) * d, (nu1 + nu2) * d);
  if (nu1 == 0 || nu2 == 0) return Z;
  Z.topRightCorner(nu1 * d, nu2 * d) = kron_identity(Matrix(E.transpose()), d);
  Z.bottomLeftCorner(nu2 * d, nu1 * d) = kron_identity(E, d);
  return Z;
}

DhdReport dhd_check(const Matrix& M, double tol) {
  if (M.rows() != M.cols()) throw std::invalid_argument("dhd_check: matrix must be square");
  DhdReport rep;
  const int h = static_cast<int>(M.rows());
  rep.worst_offdiag = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j)
      if (i != j) rep.worst_offdiag = std::max(rep.worst_offdiag, M(i, j));
  if (h == 1) rep.worst_offdiag = 0.0;
  rep.worst_row_sum = M.rowwise().sum().minCoeff();
  rep.worst_col_sum = M.colwise().sum().minCoeff();
  rep.ok = rep.worst_offdiag <= tol && rep.worst_row_sum >= -tol && rep.worst_col_sum >= -tol;
  return rep;
}

Matrix constraint_bracket(const FirMultiplier& mult) {
  const int h0 = mult.h0();
  Matrix N = toeplitz_matrix(mult.lambda, mult.nu1, mult.nu2, h0);
  if (mult.nu1 > 0 && mult.nu2 > 0) N.bottomRightCorner(mult.nu2, mult.nu1) -= mult.E;
  return N;
}

Vector DhdConstraintSystem::pack(const FirMultiplier& mult) const {
  if (mult.nu1 != nu1 || mult.nu2 != nu2)
    throw std::invalid_argument("DhdConstraintSystem: multiplier shape mismatch");
  Vector x(num_vars);
  x.head(mult.lambda.size()) = mult.lambda;
  for (int r = 0; r < nu2; ++r)
    for (int c = 0; c < nu1; ++c) x[E_offset + r * nu1 + c] = mult.E(r, c);
  return x;
}

double DhdConstraintSystem::worst_slack(const FirMultiplier& mult) const {
  const Vector x = pack(mult);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : constraints) {
    if (c.terms.empty()) continue;  // structural zeros carry no information
    worst = std::min(worst, c.eval(x));
  }
  return worst;
}

bool DhdConstraintSystem::feasible(const FirMultiplier& mult, double tol) const {
  return worst_slack(mult) >= -tol;
}

DhdConstraintSystem dhd_constraint_system(int nu1, int nu2, double rho) {
  if (nu1 < 0 || nu2 < 0) throw std::invalid_argument("dhd_constraint_system: negative length");
  if (!(rho > 0.0) || rho > 1.0)
    throw std::invalid_argument("dhd_constraint_system: rho must lie in (0, 1]");
  DhdConstraintSystem sys;
  sys.nu1 = nu1;
  sys.nu2 = nu2;
  sys.rho = rho;
  const int h0 = nu1 + 1 + nu2;
  sys.lambda_offset = 0;
  sys.E_offset = h0;
  sys.num_vars = h0 + nu1 * nu2;

  // bracket entry (i,j) as an affine expression in (lambda, E)
  auto entry = [&](int i, int j) {
    AffineScalar e;
    const int k = i - j;
    if (k <= nu1 && k >= -nu2) e.add(nu1 - k, 1.0);
    const int r = i - (nu1 + 1), c = j - (nu2 + 1);
    if (r >= 0 && c >= 0) e.add(sys.E_offset + r * nu1 + c, -1.0);
    return e;
  };
  const Matrix F = exp_weight_matrix(rho, h0);

  for (int i = 0; i < h0; ++i)
    for (int j = 0; j < h0; ++j) {
      if (i == j) continue;
      AffineScalar c = entry(i, j);
      for (auto& t : c.terms) t.second *= -F(i, i) * F(j, j);  // -(F N F)_{ij} >= 0
      c.name = "offdiag(" + std::to_string(i) + "," + std::to_string(j) + ")";
      sys.constraints.push_back(std::move(c));
    }
  for (int i = 0; i < h0; ++i) {
    AffineScalar row;
    row.name = "rowsum(" + std::to_string(i) + ")";
    for (int j = 0; j < h0; ++j) {
      AffineScalar e = entry(i, j);
      for (auto& t : e.terms) row.add(t.first, t.second * F(i, i) * F(j, j));
    }
    sys.constraints.push_back(std::move(row));
  }
  for (int j = 0; j < h0; ++j) {
    AffineScalar col;
    col.name = "colsum(" + std::to_string(j) + ")";
    for (int i = 0; i < h0; ++i) {
      AffineScalar e = entry(i, j);
      for (auto& t : e.terms) col.add(t.first, t.second * F(i, i) * F(j, j));
    }
    sys.constraints.push_back(std::move(col));
  }
  AffineScalar sp, sm;
  sp.name = "coeffsum(rho)";
  sm.name = "coeffsum(1/rho)";
  for (int k = -nu2; k <= nu1; ++k) {
    sp.add(nu1 - k, std::pow(rho, k));
    sm.add(nu1 - k, std::pow(rho, -k));
  }
  sys.constraints.push_back(std::move(sp));
  sys.constraints.push_back(std::move(sm));
  return sys;
}

Matrix lifted_multiplier_matrix(const FirMultiplier& mult, double rho, int h) {
  if (h < 1) throw std::invalid_argument("lifted_multiplier_matrix: h must be positive");
  Matrix bracket = toeplitz_matrix(mult.lambda, mult.nu1, mult.nu2, h);
  if (mult.nu1 > 0 && mult.nu2 > 0) {
    const Matrix B1 = impulse_basis(mult.nu1, h);
    const Matrix B2 = impulse_basis(mult.nu2, h);
    bracket -= B2.transpose() * mult.E * B1;
  }
  const Matrix F = exp_weight_matrix(rho, h);
  return F * bracket * F;
}

FirMultiplier sample_feasible_multiplier(int nu1, int nu2, double rho, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int h0 = nu1 + 1 + nu2;
  Vector lambda = Vector::Zero(h0);
  for (int k = 1; k <= nu1; ++k) lambda[nu1 - k] = -0.8 * unit(rng);
  for (int k = 1; k <= nu2; ++k) lambda[nu1 + k] = -0.8 * unit(rng);

  Matrix E(nu2, nu1);
  for (int r = 0; r < nu2; ++r)
    for (int c = 0; c < nu1; ++c) {
      const int i = nu1 + 1 + r, j = nu2 + 1 + c;
      const int k = i - j;
      const double lam = (k <= nu1 && k >= -nu2) ? lambda[nu1 - k] : 0.0;
      if (i == j)
        E(r, c) = 0.8 * (unit(rng) - 0.5);
      else
        E(r, c) = -lam * unit(rng) + 0.3 * unit(rng);  // keeps lam - E <= 0
    }

  // lift lambda_0 until every weighted sum constraint holds
  FirMultiplier mult{nu1, nu2, lambda, E};
  const Matrix N0 = constraint_bracket(mult);
  const Matrix F = exp_weight_matrix(rho, h0);
  const Matrix M0 = F * N0 * F;
  double need = 0.0;
  for (int i = 0; i < h0; ++i) {
    need = std::max(need, -M0.row(i).sum() / (F(i, i) * F(i, i)));
    need = std::max(need, -M0.col(i).sum() / (F(i, i) * F(i, i)));
  }
  double sp = 0.0, sm = 0.0;
  for (int k = -nu2; k <= nu1; ++k) {
    if (k == 0) continue;
    sp += lambda[nu1 - k] * std::pow(rho, k);
    sm += lambda[nu1 - k] * std::pow(rho, -k);
  }
  need = std::max({need, -sp, -sm});
  mult.lambda[nu1] = need + 0.05 + 0.55 * unit(rng);
  return mult;
}

LiftedFormCheck lifted_form_oracle(const FirMultiplier& mult, const SlopeBand& band, int d,
                                   const std::vector<Vector>& u1, const std::vector<Vector>& u2) {
  if (u1.size() != u2.size()) throw std::invalid_argument("lifted_form_oracle: horizon mismatch");
  const int h = static_cast<int>(u1.size());
  if (h < 1) throw std::invalid_argument("lifted_form_oracle: empty blocks");

  // drive the filter so its internal (u1, u2) reproduce the given blocks:
  // (z, w) = S^{-1} (u1, u2), S = [[L, -1], [-m, 1]], det = L - m
  const double det = band.width();
  std::vector<Vector> z(h), w(h);
  for (int t = 0; t < h; ++t) {
    z[t] = (u1[t] + u2[t]) / det;
    w[t] = (band.m * u1[t] + band.L * u2[t]) / det;
  }

  const FilterRealization fil = filter_realization(mult, band, d);
  const FilterRun run = run_filter(fil, z, w);
  const Matrix P = running_cost_P(d);

  LiftedFormCheck check;
  for (int t = 0; t < h; ++t) check.running += 0.5 * run.v[t].dot(P * run.v[t]);
  if (fil.state_dim() > 0) {
    const Matrix Z = terminal_cost_Z(mult.E, d);
    check.terminal = 0.5 * run.xi.back().dot(Z * run.xi.back());
  }

  Vector U1(h * d), U2(h * d);
  for (int t = 0; t < h; ++t) {
    U1.segment(t * d, d) = u1[t];
    U2.segment(t * d, d) = u2[t];
  }
  const Matrix T = toeplitz_matrix(mult.lambda, mult.nu1, mult.nu2, h);
  check.toeplitz_form = U2.dot(kron_identity(T, d) * U1);
  if (mult.nu1 > 0 && mult.nu2 > 0) {
    const Matrix B1 = impulse_basis(mult.nu1, h);
    const Matrix B2 = impulse_basis(mult.nu2, h);
    const Matrix EB = B2.transpose() * mult.E * B1;
    check.terminal_form = U2.dot(kron_identity(EB, d) * U1);
  }
  return check;
}

}  // namespace ozf
