#include "ozf/sdp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

namespace ozf::sdp {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Stalled: return "stalled";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PreBlock {
  Matrix constant;
  std::vector<std::pair<int, Matrix>> terms;  // unique variable indices
};

struct PreIneq {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;  // unique variable indices
};

// Internal solver state over a fixed constraint set.
struct Barrier {
  std::vector<PreBlock> blocks;
  std::vector<PreIneq> ineqs;
  int nvars = 0;
  bool trivially_infeasible = false;

  static Barrier build(const ConeProgram& p, bool phase1, double box) {
    Barrier b;
    b.nvars = p.num_vars + (phase1 ? 1 : 0);
    const int slack_var = p.num_vars;
    if (box > 0.0) {
      for (int i = 0; i < b.nvars; ++i) {
        PreIneq lo, hi;
        lo.constant = hi.constant = box;
        lo.terms.emplace_back(i, 1.0);
        hi.terms.emplace_back(i, -1.0);
        b.ineqs.push_back(std::move(lo));
        b.ineqs.push_back(std::move(hi));
      }
    }
    for (const auto& blk : p.blocks) {
      PreBlock pb;
      pb.constant = 0.5 * (blk.constant + blk.constant.transpose());
      std::map<int, Matrix> merged;
      for (const auto& [i, C] : blk.terms) {
        Matrix Cs = 0.5 * (C + C.transpose());
        auto it = merged.find(i);
        if (it == merged.end())
          merged.emplace(i, std::move(Cs));
        else
          it->second += Cs;
      }
      if (phase1) merged[slack_var] = Matrix::Identity(blk.size(), blk.size());
      for (auto& [i, C] : merged) pb.terms.emplace_back(i, std::move(C));
      b.blocks.push_back(std::move(pb));
    }
    for (const auto& iq : p.inequalities) {
      PreIneq pi;
      pi.constant = iq.constant;
      std::map<int, double> merged;
      for (const auto& [i, c] : iq.terms) merged[i] += c;
      bool vacuous = true;
      for (const auto& [i, c] : merged) vacuous = vacuous && c == 0.0;
      if (vacuous) {  // constraints like structural zeros of a Toeplitz pattern
        if (pi.constant < 0.0) b.trivially_infeasible = true;
        continue;
      }
      if (phase1) merged[slack_var] += 1.0;
      for (auto& [i, c] : merged)
        if (c != 0.0) pi.terms.emplace_back(i, c);
      b.ineqs.push_back(std::move(pi));
    }
    return b;
  }

  double barrier_degree() const {
    double deg = static_cast<double>(ineqs.size());
    for (const auto& b : blocks) deg += static_cast<double>(b.constant.rows());
    return std::max(deg, 1.0);
  }

  Matrix eval_block(const PreBlock& b, const Vector& x) const {
    Matrix G = b.constant;
    for (const auto& [i, C] : b.terms) G += x[i] * C;
    return G;
  }

  double eval_ineq(const PreIneq& q, const Vector& x) const {
    double s = q.constant;
    for (const auto& [i, c] : q.terms) s += c * x[i];
    return s;
  }

  // Barrier value; nullopt outside the strict interior.
  std::optional<double> value(const Vector& x) const {
    double phi = 0.0;
    for (const auto& b : blocks) {
      if (b.constant.rows() == 0) continue;
      Eigen::LLT<Matrix> llt(eval_block(b, x));
      if (llt.info() != Eigen::Success) return std::nullopt;
      const auto& L = llt.matrixLLT();
      double logdet = 0.0;
      for (Eigen::Index i = 0; i < L.rows(); ++i) {
        if (!(L(i, i) > 0.0)) return std::nullopt;
        logdet += std::log(L(i, i));
      }
      phi -= 2.0 * logdet;
    }
    for (const auto& q : ineqs) {
      const double s = eval_ineq(q, x);
      if (!(s > 0.0)) return std::nullopt;
      phi -= std::log(s);
    }
    return phi;
  }

  // Gradient and Hessian of the barrier; returns false outside the interior.
  bool derivatives(const Vector& x, Vector& grad, Matrix& hess) const {
    grad = Vector::Zero(nvars);
    hess = Matrix::Zero(nvars, nvars);
    for (const auto& b : blocks) {
      if (b.constant.rows() == 0) continue;
      Eigen::LLT<Matrix> llt(eval_block(b, x));
      if (llt.info() != Eigen::Success) return false;
      const int nt = static_cast<int>(b.terms.size());
      std::vector<Matrix> W(nt);
      for (int a = 0; a < nt; ++a) {
        W[a] = llt.solve(b.terms[a].second);  // G^{-1} K_a
        grad[b.terms[a].first] -= W[a].trace();
      }
      for (int a = 0; a < nt; ++a)
        for (int c = a; c < nt; ++c) {
          const double h = (W[a].array() * W[c].transpose().array()).sum();
          const int ia = b.terms[a].first, ic = b.terms[c].first;
          hess(ia, ic) += h;
          if (ia != ic) hess(ic, ia) += h;
        }
    }
    for (const auto& q : ineqs) {
      const double s = eval_ineq(q, x);
      if (!(s > 0.0)) return false;
      for (const auto& [i, c] : q.terms) {
        grad[i] -= c / s;
        for (const auto& [j, cj] : q.terms)
          if (j >= i) {
            hess(i, j) += c * cj / (s * s);
            if (i != j) hess(j, i) += c * cj / (s * s);
          }
      }
    }
    return true;
  }
};

struct CenterResult {
  bool converged = false;
  bool stalled = false;
  int steps = 0;
  double decrement = 0.0;  // last Newton decrement lambda^2
};

// Damped Newton on objective_weight * (c . x) + barrier(x) from a strictly
// feasible start; x is updated in place. early_stop aborts a centering whose
// purpose is already served (phase-1 slack below target).
CenterResult center(const Barrier& bar, const Vector& c, double objective_weight, Vector& x,
                    const SolverOptions& opt,
                    const std::function<bool(const Vector&)>& early_stop = {}) {
  CenterResult res;
  for (int it = 0; it < opt.max_newton_per_center; ++it) {
    if (early_stop && early_stop(x)) {
      res.converged = true;
      return res;
    }
    Vector grad;
    Matrix hess;
    if (!bar.derivatives(x, grad, hess)) {
      res.stalled = true;  // should not happen from a feasible iterate
      return res;
    }
    grad += objective_weight * c;

    Vector step;
    double ridge = 0.0;
    for (int attempt = 0;; ++attempt) {
      Matrix H = hess;
      if (ridge > 0.0) H.diagonal().array() += ridge;
      Eigen::LDLT<Matrix> ldlt(H);
      if (ldlt.info() == Eigen::Success) {
        step = ldlt.solve(-grad);
        if (step.allFinite() && grad.dot(step) < 0.0) break;
      }
      if (attempt >= 6) {
        res.stalled = true;
        return res;
      }
      ridge = (ridge == 0.0) ? 1e-12 * (1.0 + hess.trace() / hess.rows()) : ridge * 100.0;
    }

    const double decrement = -grad.dot(step);  // Newton decrement lambda^2
    res.decrement = decrement;
    if (decrement <= 1e-10) {
      res.converged = true;
      return res;
    }

    const double f0 = objective_weight * c.dot(x) + *bar.value(x);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vector xn = x + alpha * step;
      const auto phi = bar.value(xn);
      if (phi) {
        const double fn = objective_weight * c.dot(xn) + *phi;
        if (fn <= f0 - 0.25 * alpha * decrement) {
          x = xn;
          moved = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    ++res.steps;
    if (!moved) {
      // positive decrement but no admissible step: float resolution of a
      // slack near an active constraint; a near-central point is acceptable
      res.converged = decrement <= 1e-2;
      res.stalled = !res.converged;
      return res;
    }
  }
  res.converged = res.decrement <= 1e-2;
  res.stalled = !res.converged;
  return res;
}

double max_infeasibility(const ConeProgram& p, const Vector& x) {
  double worst = -kInf;
  for (const auto& b : p.blocks) {
    if (b.size() == 0) continue;
    worst = std::max(worst, -min_eigenvalue(b.eval(x)));
  }
  for (const auto& q : p.inequalities) worst = std::max(worst, -q.eval(x));
  return worst;
}

}  // namespace

Solution solve(const ConeProgram& program, const SolverOptions& opt) {
  if (program.num_vars <= 0) throw std::invalid_argument("sdp::solve: program has no variables");
  if (program.objective.size() != 0 && program.objective.size() != program.num_vars)
    throw std::invalid_argument("sdp::solve: objective size mismatch");
  for (const auto& b : program.blocks)
    if (b.constant.rows() != b.constant.cols())
      throw std::invalid_argument("sdp::solve: non-square block");

  const auto t_start = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    if (opt.time_limit_seconds <= 0.0) return false;
    const std::chrono::duration<double> el = std::chrono::steady_clock::now() - t_start;
    return el.count() > opt.time_limit_seconds;
  };

  Solution sol;
  sol.x = Vector::Zero(program.num_vars);

  // ---- phase 1: minimize uniform slack s with G_j(x) + s I >= 0, q_k(x) + s >= 0
  const Barrier bar1 = Barrier::build(program, true, opt.variable_bound);
  if (bar1.trivially_infeasible) {
    sol.status = SolveStatus::Infeasible;
    sol.message = "a constant inequality is violated";
    return sol;
  }
  Vector y = Vector::Zero(program.num_vars + 1);
  const double s0 = max_infeasibility(program, sol.x);
  y[program.num_vars] = s0 + 1.0 + 0.1 * std::abs(s0);

  Vector e_s = Vector::Zero(program.num_vars + 1);
  e_s[program.num_vars] = 1.0;

  const double phase1_target = -1e-7;
  const int slack_var = program.num_vars;
  const auto slack_low = [&](const Vector& z) { return z[slack_var] < phase1_target; };
  double mu = std::max(1.0, std::abs(y[slack_var]));
  double slack = y[slack_var];
  bool interior_found = false;
  while (true) {
    const CenterResult cr = center(bar1, e_s, 1.0 / mu, y, opt, slack_low);
    sol.newton_steps += cr.steps;
    const double improved = slack - y[slack_var];
    slack = y[slack_var];
    if (opt.verbose)
      std::fprintf(stderr, "[sdp] phase1 mu=%.3e slack=%.6e steps=%d stalled=%d\n", mu, slack,
                   cr.steps, cr.stalled ? 1 : 0);
    if (slack < phase1_target) {
      interior_found = true;
      break;
    }
    if (cr.stalled && improved <= 1e-12 * (1.0 + std::abs(slack))) break;
    if (sol.newton_steps > opt.max_total_newton || out_of_time()) break;
    if (mu < 1e-11 * std::max(1.0, std::abs(slack))) break;
    mu *= opt.mu_factor;
  }
  sol.phase1_slack = slack;
  if (!interior_found) {
    if (slack < 0.0) {
      interior_found = true;  // thin but usable interior
    } else if (slack > opt.infeasibility_tol) {
      sol.status = SolveStatus::Infeasible;
      char buf[48];
      std::snprintf(buf, sizeof(buf), "phase 1: minimal uniform slack %.6e", slack);
      sol.message = buf;
      return sol;
    } else {
      sol.status = SolveStatus::Stalled;
      char buf[48];
      std::snprintf(buf, sizeof(buf), "phase 1: marginal problem, slack %.6e", slack);
      sol.message = buf;
      return sol;
    }
  }
  sol.x = y.head(program.num_vars);

  // ---- phase 2: follow the central path of the true objective
  const bool has_objective = program.objective.size() != 0 && program.objective.norm() > 0.0;
  if (has_objective) {
    const Barrier bar2 = Barrier::build(program, false, opt.variable_bound);
    const double degree = bar2.barrier_degree();
    Vector x = sol.x;
    mu = std::max(1.0, std::abs(program.objective.dot(x)));
    while (true) {
      const CenterResult cr = center(bar2, program.objective, 1.0 / mu, x, opt);
      sol.newton_steps += cr.steps;
      if (opt.verbose)
        std::fprintf(stderr, "[sdp] phase2 mu=%.3e obj=%.9e steps=%d stalled=%d\n", mu,
                     program.objective.dot(x), cr.steps, cr.stalled ? 1 : 0);
      if (cr.stalled) {
        sol.status = SolveStatus::Stalled;
        char buf[48];
        std::snprintf(buf, sizeof(buf), "phase 2: centering stalled at gap %.3e", mu * degree);
        sol.message = buf;
        sol.x = x;
        break;
      }
      const double gap = mu * degree;
      const double obj = program.objective.dot(x);
      sol.x = x;
      sol.gap = gap;
      if (gap <= opt.gap_abs + opt.gap_rel * (1.0 + std::abs(obj))) {
        sol.status = SolveStatus::Optimal;
        break;
      }
      if (sol.newton_steps > opt.max_total_newton || out_of_time()) {
        sol.status = SolveStatus::Stalled;
        sol.message = "phase 2: iteration or time budget exhausted";
        break;
      }
      mu *= opt.mu_factor;
    }
  } else {
    sol.status = SolveStatus::Optimal;
  }

  sol.objective = program.objective.size() ? program.objective.dot(sol.x) : 0.0;
  sol.block_min_eig.reserve(program.blocks.size());
  for (const auto& b : program.blocks) sol.block_min_eig.push_back(min_eigenvalue(b.eval(sol.x)));
  sol.ineq_slack.reserve(program.inequalities.size());
  for (const auto& q : program.inequalities) sol.ineq_slack.push_back(q.eval(sol.x));
  return sol;
}

}  // namespace ozf::sdp
