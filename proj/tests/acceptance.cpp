// Acceptance suite: one line per criterion, exit nonzero on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "ozf/certify.hpp"
#include "ozf/validate.hpp"

using namespace ozf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

LtiSystem paper_plant() {
  Matrix A(2, 2), B(2, 1), C(1, 2);
  A << 0.8, 0.5, -0.4, 1.2;
  B << -0.18, 1.0;
  C << 0.3, -1.8;
  return LtiSystem::make(A, B, C);
}

std::vector<SlopeRestrictedFunction> function_pool(const SlopeBand& band, int d, int count,
                                                   std::uint64_t seed0) {
  const ProfileKind kinds[] = {ProfileKind::RandomPiecewiseLinear, ProfileKind::Saturating,
                               ProfileKind::SmoothSigmoid, ProfileKind::Linear,
                               ProfileKind::Zero};
  std::vector<SlopeRestrictedFunction> pool;
  for (int k = 0; k < count; ++k) pool.push_back(make_profile(kinds[k % 5], band, d, seed0 + k));
  return pool;
}

// 1. Dissipation inequality across bands and dimensions.
Outcome criterion1() {
  const SlopeBand bands[] = {{0.0, 1.0}, {-1.0, 2.0}, {0.5, 3.0}};
  long failures = 0, checks = 0;
  double worst = -1e300;
  std::uint64_t seed = 100;
  for (const SlopeBand& band : bands) {
    for (int d : {1, 2, 4}) {
      for (const auto& f : function_pool(band, d, 20, seed += 1000)) {
        const CheckReport rep = check_dissipation(f, 10000, 10.0, 1e-8, seed += 7);
        ++checks;
        worst = std::max(worst, rep.worst);
        if (!rep.pass) ++failures;
      }
    }
  }
  std::ostringstream os;
  os << checks << " function checks, worst normalized violation " << worst;
  return {failures == 0, os.str()};
}

// 2. Lifted multiplier matrices of feasible (lambda, E) are d.h.d. for h <= 20.
Outcome criterion2() {
  long failures = 0, count = 0;
  double worst_off = -1e300, worst_sum = 1e300;
  std::mt19937_64 rng(2025);
  for (double rho : {0.8, 1.0}) {
    for (int nu1 : {0, 1, 2}) {
      for (int nu2 : {0, 1, 2}) {
        const DhdConstraintSystem sys = dhd_constraint_system(nu1, nu2, rho);
        for (int k = 0; k < 200; ++k) {
          const FirMultiplier mult = sample_feasible_multiplier(nu1, nu2, rho, rng);
          if (!sys.feasible(mult, 1e-10)) {
            ++failures;
            continue;
          }
          ++count;
          for (int h = 1; h <= 20; ++h) {
            const DhdReport rep = dhd_check(lifted_multiplier_matrix(mult, rho, h), 1e-12);
            worst_off = std::max(worst_off, rep.worst_offdiag);
            worst_sum = std::min({worst_sum, rep.worst_row_sum, rep.worst_col_sum});
            if (!rep.ok) ++failures;
          }
        }
      }
    }
  }
  std::ostringstream os;
  os << count << " multipliers x 20 horizons, worst offdiag " << worst_off << ", worst sum "
     << worst_sum;
  return {failures == 0, os.str()};
}

// 3. IQC with terminal cost along random weighted loops.
Outcome criterion3() {
  const SlopeBand bands[] = {{0.0, 1.0}, {-1.0, 2.0}, {0.5, 3.0}};
  const int shapes[][2] = {{1, 1}, {2, 2}, {1, 2}, {2, 1}, {0, 2}, {2, 0}, {0, 1}, {1, 0}};
  const double rhos[] = {0.8, 0.9, 1.0};
  std::mt19937_64 rng(77);
  long failures = 0, checks = 0;
  double worst = -1e300;
  for (int i = 0; i < 50; ++i) {
    const double rho = rhos[i % 3];
    const auto& sh = shapes[i % 8];
    const SlopeBand band = bands[i % 3];
    const FirMultiplier mult = sample_feasible_multiplier(sh[0], sh[1], rho, rng);
    const auto pool = function_pool(band, 1, 20, 9000 + 13 * i);
    for (std::size_t j = 0; j < pool.size(); ++j) {
      const CheckReport rep = check_iqc(pool[j], mult, band, rho, 20, 50, 500 + 7 * i + j);
      ++checks;
      worst = std::max(worst, rep.worst);
      if (!rep.pass) ++failures;
    }
  }
  std::ostringstream os;
  os << checks << " (multiplier, function) checks, worst normalized slack deficit " << worst;
  return {failures == 0, os.str()};
}

// 4. Lifted-form identities: filter simulation vs Toeplitz quadratic form.
Outcome criterion4() {
  std::mt19937_64 rng(4444);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> nu_dist(0, 3), h_dist(1, 12), d_dist(1, 3);
  long failures = 0;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const int nu1 = nu_dist(rng), nu2 = nu_dist(rng);
    const int h = h_dist(rng), d = d_dist(rng);
    Vector lambda(nu1 + 1 + nu2);
    for (int i = 0; i < lambda.size(); ++i) lambda[i] = gauss(rng);
    Matrix E(nu2, nu1);
    for (int r = 0; r < nu2; ++r)
      for (int c = 0; c < nu1; ++c) E(r, c) = gauss(rng);
    const FirMultiplier mult = FirMultiplier::make(nu1, nu2, lambda, E);
    const SlopeBand band{-0.4, 1.6};
    std::vector<Vector> u1(h), u2(h);
    for (int t = 0; t < h; ++t) {
      u1[t] = Vector(d);
      u2[t] = Vector(d);
      for (int i = 0; i < d; ++i) {
        u1[t][i] = 2.0 * gauss(rng);
        u2[t][i] = 2.0 * gauss(rng);
      }
    }
    const LiftedFormCheck check = lifted_form_oracle(mult, band, d, u1, u2);
    const double scale = 1.0 + std::abs(check.running) + std::abs(check.toeplitz_form) +
                         std::abs(check.terminal);
    const double err = std::max(std::abs(check.running - check.toeplitz_form),
                                std::abs(check.terminal - check.terminal_form));
    worst = std::max(worst, err / scale);
    if (err > 1e-10 * scale) ++failures;
  }
  std::ostringstream os;
  os << "1000 cases, worst relative identity error " << worst;
  return {failures == 0, os.str()};
}

struct SweepSummary {
  std::vector<SweepCell> cells;
  const SweepCell* find(double L, SweepVariant v) const {
    for (const auto& c : cells)
      if (std::abs(c.L - L) < 1e-12 && c.variant == v) return &c;
    return nullptr;
  }
};

SweepSummary run_example_sweep() {
  SweepOptions opt;
  opt.shape = MultiplierShape{1, 1};
  std::vector<double> gains;
  for (int k = 1; k <= 13; ++k) gains.push_back(0.1 * k);
  SweepSummary s;
  s.cells = sweep_gain_grid(paper_plant(), 0.1, gains,
                            {SweepVariant::SectorOnly, SweepVariant::SectorPlusOzf}, opt);
  return s;
}

// 5. Saturation-gain sweep: feasibility range, dominance, strict improvement.
Outcome criterion5(const SweepSummary& sweep) {
  int both_feasible = 0;
  bool dominance = true, ozf_covers_sector = true;
  double best_rel_gain = 0.0;
  for (int k = 1; k <= 13; ++k) {
    const double L = 0.1 * k;
    const SweepCell* sector = sweep.find(L, SweepVariant::SectorOnly);
    const SweepCell* ozf = sweep.find(L, SweepVariant::SectorPlusOzf);
    if (!sector || !ozf) return {false, "missing sweep cells"};
    if (sector->feasible && !ozf->feasible) ozf_covers_sector = false;
    if (sector->feasible && ozf->feasible) {
      ++both_feasible;
      if (ozf->size < sector->size - 1e-6) dominance = false;
      if (sector->size > 0.0)
        best_rel_gain = std::max(best_rel_gain, (ozf->size - sector->size) / sector->size);
    }
  }
  std::ostringstream os;
  os << both_feasible << " gains feasible for both variants, best relative size gain "
     << 100.0 * best_rel_gain << "%";
  const bool pass =
      both_feasible > 0 && dominance && ozf_covers_sector && best_rel_gain > 0.01;
  return {pass, os.str()};
}

// 6. Soundness of the L = 1 certificate along saturated simulations.
Outcome criterion6() {
  const LtiSystem plant = paper_plant();
  const DeadzoneLoop loop = loop_transform_saturation(plant, 0.1, 1.0);
  AnalysisProblem p;
  p.system = loop.system;
  p.band = SlopeBand{0.0, 1.0};
  p.rho = 1.0;
  p.alpha = 0.0;
  p.beta = 1.0;
  p.sector = SectorSpec{0.1, true};
  p.shape = MultiplierShape{1, 1};
  const LineSearchResult ls = mu_linesearch(p, default_mu_grid());
  if (!ls.best) return {false, "L = 1 certification failed"};
  const Certificate& cert = *ls.best;

  const Matrix X = cert.X();
  const NonlinMap sat_map = [&](const Vector& z) { return saturation(z, 0.1, 1.0); };
  std::mt19937_64 rng(606);
  double sup_z = 0.0, sup_Hx = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector x0 = sample_ellipsoid_boundary(X, rng);
    const Trajectory traj = simulate_loop(plant, sat_map, x0, 200);
    for (int t = 0; t < 200; ++t) {
      sup_z = std::max(sup_z, traj.z[t].norm());
      sup_Hx = std::max(sup_Hx, std::abs(cert.H.dot(traj.x[t])));
    }
  }
  std::ostringstream os;
  os << "gamma " << cert.gamma << ", sup||z|| = " << sup_z << ", sup|Hx| = " << sup_Hx;
  return {sup_z <= 1.0 + 1e-6 && sup_Hx <= 0.1 + 1e-8, os.str()};
}

// 7. Exponential decay at rho = 0.95 with the certificate-implied envelope.
Outcome criterion7() {
  Matrix A(2, 2), B(2, 1), C(1, 2);
  A << 0.6, 0.2, -0.2, 0.5;
  B << 0.5, 0.3;
  C << 0.4, 0.3;
  AnalysisProblem p;
  p.system = LtiSystem::make(A, B, C);
  p.band = SlopeBand{0.0, 0.2};
  p.rho = 0.95;
  p.alpha = 1.0;
  p.beta = 1.0;
  p.shape = MultiplierShape{1, 1};
  const CertifyReport rep = solve(assemble_stability_program(p));
  if (!rep.certificate) return {false, "stability program solve failed: " + rep.message};
  const Certificate& cert = *rep.certificate;

  double margin1 = 0.0;
  for (const auto& m : cert.margins)
    if (m.name == "dissipation") margin1 = m.value;
  if (margin1 <= 0.0) return {false, "first LMI margin is not positive"};
  const double K = std::sqrt(1.0 / margin1);

  const Matrix X = cert.X();
  std::mt19937_64 rng(707);
  double worst_per = 1e300, worst_decay = 1e300;
  const auto pool = function_pool(cert.band, 1, 20, 7000);
  for (int k = 0; k < 60; ++k) {
    const Vector x0 = sample_ellipsoid_boundary(X, rng);
    const auto& f = pool[k % pool.size()];
    const NonlinMap nonlin = [&f](const Vector& z) { return f.gradient(z); };
    const TrajectoryBounds tb = evaluate_trajectory_bounds(cert, p, nonlin, x0, 200, K);
    worst_per = std::min(worst_per, tb.worst_per_slack);
    worst_decay = std::min(worst_decay, tb.decay_margin);
  }
  std::ostringstream os;
  os << "gamma " << cert.gamma << ", K " << K << ", worst performance slack " << worst_per
     << ", worst envelope margin " << worst_decay;
  return {worst_per >= -1e-6 && worst_decay >= -1e-6 * K, os.str()};
}

// 8. Falsification sanity: every non-d.h.d. fixture is refuted within 1e5 samples.
Outcome criterion8() {
  auto dense = [](int r, int c, std::initializer_list<double> vals) {
    Matrix M(r, c);
    int k = 0;
    for (double v : vals) M(k / c, k % c) = v, ++k;
    return M;
  };
  std::vector<Matrix> fixtures = {
      dense(2, 2, {1, -2, 0, 1}),
      dense(2, 2, {1, 0, -2, 1}),
      dense(2, 2, {0.1, 0.5, 0, 0.1}),
      dense(2, 2, {0.1, 0, 0.6, 0.2}),
      dense(3, 3, {1, -1, -1, -0.5, 1, -1, 0, -0.5, 1}),
      dense(3, 3, {0.2, 0.4, 0, 0, 0.2, 0, 0, 0, 0.2}),
      dense(2, 2, {0, -1, -1, 0}),
      dense(2, 2, {0, 0.3, 0.3, 0}),
      dense(4, 4, {0.1, 0, 0.4, 0, 0, 0.1, 0, 0, 0, 0, 0.1, 0, 0, 0, 0, 0.1}),
      dense(2, 2, {1, -3, 1, 1}),
  };
  std::vector<SlopeRestrictedFunction> pool;
  for (double l : {0.5, 1.0, 2.0}) pool.push_back(deadzone_function(l, 1.0, 1));
  pool.push_back(make_profile(ProfileKind::Saturating, SlopeBand{0.0, 1.0}, 1, 81));
  for (std::uint64_t s = 0; s < 4; ++s)
    pool.push_back(make_profile(ProfileKind::RandomPiecewiseLinear, SlopeBand{0.0, 1.0}, 1,
                                820 + s));

  long max_needed = 0;
  int refuted = 0;
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    if (dhd_check(fixtures[i], 1e-12).ok) return {false, "fixture is d.h.d. by mistake"};
    long used = 0;
    bool found = false;
    const int chunk = 2500;
    for (int round = 0; used < 100000 && !found; ++round) {
      const auto& f = pool[round % pool.size()];
      const CheckReport rep =
          check_static_qc(f, fixtures[i], chunk, 10.0, 177 + 13 * i + round);
      used += rep.samples;
      found = rep.worst > rep.tol;
    }
    if (found) ++refuted;
    max_needed = std::max(max_needed, used);
  }
  std::ostringstream os;
  os << refuted << "/" << fixtures.size() << " fixtures refuted, max samples " << max_needed;
  return {refuted == static_cast<int>(fixtures.size()), os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  struct Entry {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  SweepSummary sweep;  // shared between criteria 5 and the sweep timing
  const std::vector<Entry> entries = {
      {1, "dissipation suite", 30.0, criterion1},
      {2, "d.h.d. machinery (lifted multiplier matrices)", 30.0, criterion2},
      {3, "IQC suite with terminal cost", 120.0, criterion3},
      {4, "lifted-form identities", 10.0, criterion4},
      {5, "saturation sweep reproduction", 300.0,
       [&sweep] {
         sweep = run_example_sweep();
         return criterion5(sweep);
       }},
      {6, "certificate soundness at L = 1", 60.0, criterion6},
      {7, "exponential decay at rho = 0.95", 60.0, criterion7},
      {8, "falsification sanity (non-d.h.d. fixtures)", 120.0, criterion8},
  };

  int failures = 0;
  for (const Entry& e : entries) {
    if (only != 0 && e.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = e.run();
    } catch (const std::exception& ex) {
      out = {false, std::string("exception: ") + ex.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < e.limit_seconds;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] criterion %d: %s - %s (%.1f s%s)\n", pass ? "PASS" : "FAIL", e.id, e.name,
                out.detail.c_str(), secs, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
