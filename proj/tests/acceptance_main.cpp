// Acceptance gate: eleven numbered checks, each with its stated tolerance
// and runtime budget, one verdict line per check.  Two checks probe claims
// of the source model that the computed values contradict; they are expected
// to FAIL and say so.  The process exits 0 only when every check lands on
// its expected verdict, so a silent regression and a silently "fixed"
// expected failure are both loud.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbmlab/attractor.hpp"
#include "fbmlab/common.hpp"
#include "fbmlab/experiments.hpp"
#include "fbmlab/fbm.hpp"
#include "fbmlab/fluid.hpp"
#include "fbmlab/io.hpp"
#include "fbmlab/solver.hpp"
#include "fbmlab/spectral.hpp"
#include "fbmlab/stoch_conv.hpp"
#include "oracles.hpp"

using namespace fbmlab;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

std::uint64_t g_master = 18345;  // matches the tool's shipped default

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// --------------------------------------------------------------------------
// shared building blocks

SpectralVelocityField spread_field(int m_max, double amplitude) {
  SpectralVelocityField f = SpectralVelocityField::zero(m_max);
  for (int m = 1; m <= m_max; ++m)
    for (int n = 1; n <= m_max; ++n)
      f.at(m, n) = ((m + n) % 2 == 0 ? 1.0 : -1.0) /
                   static_cast<double>(m * m + n * n);
  const double scale = amplitude / norm_l2(f);
  for (int m = 1; m <= m_max; ++m)
    for (int n = 1; n <= m_max; ++n) f.at(m, n) *= scale;
  return f;
}

SpectralVelocityField random_field(int m_max, std::uint64_t seed) {
  GaussianStream g(seed);
  SpectralVelocityField u = SpectralVelocityField::zero(m_max);
  for (int i = 0; i < u.coeffs.size(); ++i) u.coeffs[i] = g.gaussian();
  return u;
}

double pairing(const SpectralVelocityField& a, const SpectralVelocityField& b) {
  return a.coeffs.dot(b.coeffs);
}

// worst |empirical - exact| / se over the covariance of sampled paths on a
// 64-knot grid (the standard error uses the exact fourth moments)
double cov_max_ratio(std::uint64_t tag, double h, std::size_t n) {
  constexpr int kKnots = 64;
  std::vector<double> times(kKnots + 1);
  for (int k = 0; k <= kKnots; ++k) times[k] = static_cast<double>(k) / kKnots;
  FbmSampler sampler(times, h);
  constexpr std::size_t kChunks = 64;
  std::vector<Eigen::MatrixXd> acc(
      kChunks, Eigen::MatrixXd::Zero(kKnots + 1, kKnots + 1));
  parallel_chunks(n, kChunks,
                  [&](std::size_t c, std::size_t b, std::size_t e) {
                    Eigen::VectorXd x(kKnots + 1);
                    for (std::size_t i = b; i < e; ++i) {
                      const FbmPath p = sampler.sample(derive_seed(g_master, tag, i));
                      for (int k = 0; k <= kKnots; ++k) x[k] = p.values[k];
                      acc[c].selfadjointView<Eigen::Upper>().rankUpdate(x);
                    }
                  });
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(kKnots + 1, kKnots + 1);
  for (const auto& a : acc) sum += a;
  double worst = 0.0;
  for (int i = 1; i <= kKnots; ++i) {
    const double cii = fbm_covariance(times[i], times[i], h);
    for (int j = i; j <= kKnots; ++j) {
      const double cjj = fbm_covariance(times[j], times[j], h);
      const double ex = fbm_covariance(times[i], times[j], h);
      const double emp = sum(i, j) / static_cast<double>(n);
      const double se = std::sqrt((cii * cjj + ex * ex) / static_cast<double>(n));
      worst = std::max(worst, std::abs(emp - ex) / se);
    }
  }
  return worst;
}

std::vector<SmoothFn> smooth_family() {
  return {
      {[](double) { return 1.0; }, [](double) { return 0.0; }},
      {[](double r) { return r; }, [](double) { return 1.0; }},
      {[](double r) { return r * r; }, [](double r) { return 2 * r; }},
      {[](double r) { return r * r * r; }, [](double r) { return 3 * r * r; }},
      {[](double r) { return r * r * r * r; },
       [](double r) { return 4 * r * r * r; }},
      {[](double r) { return std::cos(r); },
       [](double r) { return -std::sin(r); }},
      {[](double r) { return std::sin(r); },
       [](double r) { return std::cos(r); }},
      {[](double r) { return std::cos(2 * r); },
       [](double r) { return -2 * std::sin(2 * r); }},
      {[](double r) { return std::sin(2 * r); },
       [](double r) { return 2 * std::cos(2 * r); }},
      {[](double r) { return std::cos(3 * r); },
       [](double r) { return -3 * std::sin(3 * r); }},
      {[](double r) { return std::sin(3 * r); },
       [](double r) { return 3 * std::cos(3 * r); }},
      {[](double r) { return std::cos(5 * r); },
       [](double r) { return -5 * std::sin(5 * r); }},
      {[](double r) { return std::sin(5 * r); },
       [](double r) { return 5 * std::cos(5 * r); }},
      {[](double r) { return std::exp(-r); },
       [](double r) { return -std::exp(-r); }},
      {[](double r) { return std::exp(0.5 * r); },
       [](double r) { return 0.5 * std::exp(0.5 * r); }},
      {[](double r) { return 1.0 / (1.0 + r); },
       [](double r) { return -1.0 / ((1.0 + r) * (1.0 + r)); }},
      {[](double r) { return r * std::cos(r); },
       [](double r) { return std::cos(r) - r * std::sin(r); }},
      {[](double r) { return r * std::sin(2 * r); },
       [](double r) { return std::sin(2 * r) + 2 * r * std::cos(2 * r); }},
      {[](double r) { return 1.0 / (1.0 + r * r); },
       [](double r) { return -2 * r / ((1.0 + r * r) * (1.0 + r * r)); }},
      {[](double r) { return std::sqrt(1.0 + r); },
       [](double r) { return 0.5 / std::sqrt(1.0 + r); }},
  };
}

// worst |mc - exact| / se for the Wiener isometry over the smooth family
double iso_max_ratio(std::uint64_t tag, double h, std::size_t n) {
  const auto phis = smooth_family();
  std::vector<double> times(513);
  for (std::size_t k = 0; k < times.size(); ++k)
    times[k] = static_cast<double>(k) / 512.0;
  const std::size_t np = phis.size();
  std::vector<double> exact(np);
  std::vector<std::vector<double>> w(np);
  for (std::size_t k = 0; k < np; ++k) {
    SampledFunction s;
    s.grid = times;
    s.values.resize(times.size());
    for (std::size_t j = 0; j < times.size(); ++j)
      s.values[j] = phis[k].f(times[j]);
    exact[k] = kstar_l2_norm_sq(kstar_apply(s, 1.0, h), h);
    w[k] = wiener_weight_vector(phis[k], times);
  }
  FbmSampler sampler(times, h);
  constexpr std::size_t kChunks = 64;
  std::vector<std::vector<double>> acc(kChunks,
                                       std::vector<double>(np, 0.0));
  parallel_chunks(n, kChunks,
                  [&](std::size_t c, std::size_t b, std::size_t e) {
                    for (std::size_t i = b; i < e; ++i) {
                      const FbmPath p = sampler.sample(derive_seed(g_master, tag, i));
                      for (std::size_t k = 0; k < np; ++k) {
                        const double x = apply_weight_vector(w[k], p);
                        acc[c][k] += x * x;
                      }
                    }
                  });
  double worst = 0.0;
  for (std::size_t k = 0; k < np; ++k) {
    double s = 0.0;
    for (const auto& a : acc) s += a[k];
    const double mc = s / static_cast<double>(n);
    const double se = exact[k] * std::sqrt(2.0 / static_cast<double>(n));
    worst = std::max(worst, std::abs(mc - exact[k]) / se);
  }
  return worst;
}

// --------------------------------------------------------------------------
// the eleven checks; each returns measured pass and appends detail lines

bool check_1(std::vector<std::string>& out) {
  bool ok = true;
  for (const auto& [h, tag] : std::vector<std::pair<double, std::uint64_t>>{
           {0.30, 101}, {0.40, 102}}) {
    const double worst = cov_max_ratio(tag, h, 100000);
    ok = ok && worst < 3.0;
    out.push_back("h=" + num(h) + ": 1e5 paths, 64-knot grid, worst |emp-exact|/se = " +
                  num(worst) + " over 2080 entries (gate 3)");
  }
  return ok;
}

bool check_2(std::vector<std::string>& out) {
  bool ok = true;
  double worst_rel = 0.0;
  for (const double h : {0.26, 0.30, 0.40, 0.49}) {
    const auto kernel = kernel_for(h);
    for (const double t : {0.5, 1.0, 2.0}) {
      const double vi = kernel->variance_integral(t);
      const double tw = std::pow(t, 2.0 * h);
      worst_rel = std::max(worst_rel, std::abs(vi - tw) / tw);
    }
  }
  ok = ok && worst_rel <= 1e-4;
  out.push_back("kernel variance identity at t in {0.5, 1, 2}, h in {0.26, 0.3, "
                "0.4, 0.49}: worst relative error " + num(worst_rel) +
                " (gate 1e-4)");
  for (const auto& [h, tag] : std::vector<std::pair<double, std::uint64_t>>{
           {0.30, 103}, {0.40, 104}}) {
    const double worst = iso_max_ratio(tag, h, 10000);
    ok = ok && worst < 3.0;
    out.push_back("isometry h=" + num(h) +
                  ": 20 smooth integrands, 1e4 paths, worst |mc-exact|/se = " +
                  num(worst) + " (gate 3)");
  }
  return ok;
}

bool check_3(std::vector<std::string>& out) {
  bool plateau_ok = true;
  for (const double h : {0.26, 0.30, 0.40, 0.49}) {
    const double v50 = lemma2_integral(h, 50.0);
    const double v100 = lemma2_integral(h, 100.0);
    const double rel = std::abs(v100 - v50) / v50;
    if (rel >= 1e-6) plateau_ok = false;
    out.push_back("damped integral h=" + num(h) + ": cutoff 50 -> 100 changes by " +
                  num(rel) + " relative (claimed gate 1e-6)");
  }
  bool slope_ok = true;
  for (const double h : {0.26, 0.30, 0.40, 0.49}) {
    const TtvWitness wit =
        ttv_divergence_witness(h + 0.5, {20.0, 30.0, 40.0, 50.0});
    if (std::abs(wit.log_slope - 2.0) > 0.2) slope_ok = false;
    out.push_back("undamped witness a=" + num(h + 0.5) + ": log-slope " +
                  num(wit.log_slope) + " (gate 2.0 +- 0.2)");
  }
  if (!plateau_ok)
    out.push_back("analysis: the damped integral is finite and monotone, but its "
                  "tail decays only algebraically (~lambda^{2h-2}), so the "
                  "claimed 1e-6 plateau between cutoffs 50 and 100 cannot "
                  "occur; measured changes sit at 1e-3 scale for every h");
  return plateau_ok && slope_ok;
}

bool check_4(std::vector<std::string>& out) {
  const std::vector<int> Ms = {4, 8, 16, 32};
  std::vector<double> E;
  for (const int M : Ms) {
    double s = 0.0;
    for (int m = 1; m <= M; ++m)
      for (int n = 1; n <= M; ++n)
        s += mode_variance(eigenvalue({m, n}), 1.0, 0.30);
    E.push_back(s);
  }
  bool nondecreasing = true;
  for (std::size_t k = 1; k < E.size(); ++k)
    if (E[k] < E[k - 1]) nondecreasing = false;
  out.push_back("E|z(1)|^2 partial sums at M = 4/8/16/32: " + num(E[0]) + " / " +
                num(E[1]) + " / " + num(E[2]) + " / " + num(E[3]) +
                (nondecreasing ? " (nondecreasing)" : " (NOT nondecreasing)"));

  const I1I2Report diag = i1_i2_diagnostics(0.30, 1.0, 32);
  bool bounded = true;
  for (std::size_t k = 0; k < Ms.size(); ++k)
    if (E[k] > diag.i12_partial[Ms[k] - 1]) bounded = false;
  if (E.back() > diag.lattice_bound_i12) bounded = false;
  out.push_back(std::string("bounded by the fitted i1+i2 shells and the closed "
                            "lattice bound ") + num(diag.lattice_bound_i12) +
                (bounded ? ": yes" : ": NO"));

  const double rel = (E[3] - E[2]) / E[2];
  const bool settled = std::abs(rel) < 0.01;
  out.push_back("relative change M=16 -> M=32: " + num(rel) +
                " (claimed gate 0.01)");

  std::vector<double> lat;
  for (const long long M : {100LL, 1000LL, 10000LL}) {
    std::vector<double> rows(static_cast<std::size_t>(M), 0.0);
    parallel_chunks(static_cast<std::size_t>(M), 64,
                    [&](std::size_t, std::size_t b, std::size_t e) {
                      for (std::size_t i = b; i < e; ++i) {
                        const double m = static_cast<double>(i + 1);
                        double r = 0.0;
                        for (long long n = 1; n <= M; ++n)
                          r += 1.0 / (m * m + static_cast<double>(n) * n);
                        rows[i] = r;
                      }
                    });
    double s = 0.0;
    for (const double r : rows) s += r;
    lat.push_back(s);
  }
  const double inc1 = lat[1] - lat[0];
  const double inc2 = lat[2] - lat[1];
  const bool diverging = inc2 > 0.5 * inc1 && inc2 > 0.1;
  out.push_back("boundary h=0.25 lattice sum (s=1) at M = 1e2/1e3/1e4: " +
                num(lat[0]) + " / " + num(lat[1]) + " / " + num(lat[2]) +
                "; per-decade increments " + num(inc1) + ", " + num(inc2) +
                (diverging ? " (no convergence, as required)"
                           : " (UNEXPECTEDLY settling)"));
  if (!settled)
    out.push_back("analysis: per-mode variances decay like (m^2+n^2)^{-4h}; at "
                  "h=0.3 the lattice tail falls off so slowly that doubling the "
                  "truncation from 16 to 32 still adds ~14%; a 1% settling gate "
                  "at M=32 is inconsistent with the decay rate the same source "
                  "prescribes");
  return nondecreasing && bounded && settled && diverging;
}

bool check_5(std::vector<std::string>& out) {
  const auto coarse =
      NoiseRealization::generate(8, 0.35, 0.0, 1.0, 4096, derive_seed(g_master, 500, 0));
  const YIdentityReport rep = y_identity_check(coarse, 1.0);
  const auto fine =
      NoiseRealization::generate(8, 0.35, 0.0, 1.0, 8192, derive_seed(g_master, 500, 0));
  const YIdentityReport rep2 = y_identity_check(fine, 1.0);
  const bool small = rep.max_residual < 1e-6;
  const bool halves = rep2.max_residual <= 0.5 * rep.max_residual;
  out.push_back("per-mode residual of z + lambda Y - beta at 2^12 knots: max " +
                num(rep.max_residual) + " over 64 modes (gate 1e-6)");
  out.push_back("refined to 2^13 knots: max " + num(rep2.max_residual) +
                (halves ? " (halves or better)" : " (does NOT halve)"));
  return small && halves;
}

bool check_6(std::vector<std::string>& out) {
  const int m_max = 8;
  CollocationContext ctx(m_max);
  const FluidParams p;

  double worst_bvv = 0.0, worst_anti = 0.0;
  for (int k = 0; k < 20; ++k) {
    const SpectralVelocityField u = random_field(m_max, derive_seed(g_master, 600, k));
    const SpectralVelocityField v = random_field(m_max, derive_seed(g_master, 601, k));
    const SpectralVelocityField w = random_field(m_max, derive_seed(g_master, 602, k));
    const double scale_bvv = norm_l2(u) * norm_l2(v) * norm_v(v) + 1.0;
    worst_bvv = std::max(worst_bvv,
                         std::abs(b_trilinear(u, v, v, ctx)) / scale_bvv);
    const double scale_anti =
        norm_l2(u) * (norm_v(v) * norm_l2(w) + norm_l2(v) * norm_v(w)) + 1.0;
    worst_anti = std::max(
        worst_anti, std::abs(b_trilinear(u, v, w, ctx) +
                             b_trilinear(u, w, v, ctx)) / scale_anti);
  }
  const bool b_ok = worst_bvv <= 1e-10 && worst_anti <= 1e-10;
  out.push_back("convection: worst normalized |b(u,v,v)| = " + num(worst_bvv) +
                ", worst antisymmetry defect = " + num(worst_anti) +
                " on 20 dealiased fields (gate 1e-10)");

  bool pos_ok = true;
  for (int k = 0; k < 50; ++k) {
    const SpectralVelocityField u = random_field(m_max, derive_seed(g_master, 603, k));
    if (pairing(N_op(u, p, ctx), u) < 0.0) pos_ok = false;
  }
  out.push_back(std::string("viscosity: <N(u), u> >= 0 on 50 random fields: ") +
                (pos_ok ? "yes" : "NO"));

  const double cap = p.mu0 * std::pow(p.eps, -0.5 * p.alpha);
  bool dual_ok = true;
  double worst_frac = 0.0;
  for (int k = 0; k < 30; ++k) {
    const SpectralVelocityField z = random_field(m_max, derive_seed(g_master, 604, k));
    const SpectralVelocityField v = random_field(m_max, derive_seed(g_master, 605, k));
    const double lhs = std::abs(pairing(N_op(z, p, ctx), v));
    const double rhs = cap * norm_h01(z) * norm_h01(v);
    worst_frac = std::max(worst_frac, lhs / rhs);
    if (lhs > rhs * (1.0 + 1e-12)) dual_ok = false;
  }
  out.push_back("viscosity duality |<N(z), v>| <= mu0 eps^{-alpha/2} "
                "|z|_{H01} |v|_{H01}: worst fraction " + num(worst_frac) +
                " on 30 pairs");
  return b_ok && pos_ok && dual_ok;
}

bool check_7(std::vector<std::string>& out) {
  // linear case: semigroup stepping against the per-mode closed form
  SolveConfig lin;
  lin.m_max = 3;
  lin.convection_on = false;
  lin.viscosity_on = false;
  const SpectralVelocityField u0 = spread_field(3, 1.0);
  const GlobalReport rep = global_solve(u0, nullptr, lin);
  double worst = 0.0;
  for (std::size_t k = 0; k < rep.traj.size(); ++k) {
    const double t = rep.traj.times[k];
    for (int m = 1; m <= 3; ++m)
      for (int n = 1; n <= 3; ++n)
        worst = std::max(worst,
                         std::abs(rep.traj.v[k].at(m, n) -
                                  std::exp(-eigenvalue({m, n}) * t) * u0.at(m, n)));
  }
  const bool lin_ok = worst < 1e-6;
  out.push_back("linear-case exactness: worst coefficient error " + num(worst) +
                " over 1001 knots (gate 1e-6)");

  // Picard contraction on the full problem with noise
  const auto noise = NoiseRealization::generate(8, 0.35, 0.0, 0.3, 1024,
                                                derive_seed(g_master, 700, 0));
  SolveConfig cfg;
  const PicardReport pic = picard_local_solve(spread_field(8, 1.0), &noise, 0.25, cfg);
  bool ratio_ok = pic.converged;
  double worst_ratio = 0.0;
  int measured = 0;
  for (std::size_t j = 2; j < pic.distances.size(); ++j) {
    if (pic.distances[j - 1] < 1e-12) continue;
    const double r = pic.distances[j] / pic.distances[j - 1];
    worst_ratio = std::max(worst_ratio, r);
    ++measured;
    if (r > 0.55) ratio_ok = false;
  }
  if (measured == 0) ratio_ok = false;
  out.push_back("Picard: converged in " + std::to_string(pic.iterations) +
                " iterations, worst contraction ratio " + num(worst_ratio) +
                " over " + std::to_string(measured) + " steps k >= 2 (gate 0.55)");

  // noise off: discrete energy monotone across 10^3 steps
  SolveConfig mono;
  mono.m_max = 8;
  const GlobalReport dec = global_solve(spread_field(8, 1.0), nullptr, mono);
  bool mono_ok = dec.traj.size() == 1001;
  for (std::size_t k = 0; k + 1 < dec.traj.size(); ++k)
    if (dec.traj.energy[k + 1].v_l2_sq >
        dec.traj.energy[k].v_l2_sq * (1.0 + 1e-12))
      mono_ok = false;
  out.push_back(std::string("noise-off |v|^2 monotone nonincreasing over 1000 "
                            "steps: ") + (mono_ok ? "yes" : "NO") +
                " (final/initial = " + num(dec.traj.energy.back().v_l2_sq) + ")");

  // self-convergence order >= 1 against a dt/8 reference
  auto solve_at = [&](double dt, const NoiseRealization* nz) {
    SolveConfig c;
    c.m_max = 6;
    c.dt = dt;
    c.t_final = 0.25;
    return global_solve(spread_field(6, 0.5), nz, c);
  };
  auto sup_err = [](const GlobalReport& coarse, const GlobalReport& ref,
                    std::size_t stride) {
    double mx = 0.0;
    for (std::size_t k = 0; k < coarse.traj.size(); ++k)
      mx = std::max(mx, (coarse.traj.v[k].coeffs -
                         ref.traj.v[k * stride].coeffs).norm());
    return mx;
  };
  const auto cnoise = NoiseRealization::generate(6, 0.35, 0.0, 0.25, 1024,
                                                 derive_seed(g_master, 701, 0));
  const GlobalReport ref = solve_at(2.5e-4, &cnoise);
  const double e1 = sup_err(solve_at(2e-3, &cnoise), ref, 8);
  const double e2 = sup_err(solve_at(1e-3, &cnoise), ref, 4);
  const double order = std::log2(e1 / e2);
  const bool conv_ok = e1 > 0.0 && order >= 1.0;
  out.push_back("self-convergence under dt halving: errors " + num(e1) + " -> " +
                num(e2) + ", order " + num(order) + " (gate >= 1)");
  return lin_ok && ratio_ok && mono_ok && conv_ok;
}

bool check_8(std::vector<std::string>& out) {
  const auto noise = NoiseRealization::generate(8, 0.35, 0.0, 1.0, 2000,
                                                derive_seed(g_master, 800, 0));
  const ConstantsReport chain =
      derive_constants(1.0, 0.5, stationary_ez_l2(8, 0.35));
  const EnergyParams params = energy_params_from(chain, FluidParams{});
  auto run_at = [&](double dt) {
    SolveConfig cfg;
    cfg.m_max = 8;
    cfg.dt = dt;
    cfg.t_final = 1.0;
    const GlobalReport rep = global_solve(spread_field(8, 1.0), &noise, cfg);
    return energy_monitor(rep.traj, params);
  };
  const EnergyReport coarse = run_at(2e-3);
  const EnergyReport fine = run_at(5e-4);
  const bool hold = coarse.passed && fine.passed;
  const bool vanish = fine.violations.size() <= coarse.violations.size() &&
                      fine.violations.empty();
  out.push_back("discrete energy inequality with g2 at dt = 2e-3: " +
                std::to_string(coarse.violations.size()) + " violations in " +
                std::to_string(coarse.lhs.size()) + " steps, max excess " +
                num(coarse.max_excess));
  out.push_back("at dt = 5e-4: " + std::to_string(fine.violations.size()) +
                " violations in " + std::to_string(fine.lhs.size()) +
                " steps, max excess " + num(fine.max_excess));
  return hold && vanish;
}

bool check_9(std::vector<std::string>& out) {
  const auto noise = NoiseRealization::generate(8, 0.35, -5.0, 200.0, 256,
                                                derive_seed(g_master, 900, 0));
  const ErgodicReport rep = ergodic_limit_study(noise, {200.0}, 1.0);
  const double gap =
      std::abs(rep.time_averages.back() / rep.ensemble_mean_grid - 1.0);
  const bool avg_ok = gap <= 0.10;
  out.push_back("Birkhoff average of |Z|^2_{H01} at horizon 200 (M=8, h=0.35): " +
                num(rep.time_averages.back()) + " vs ensemble mean " +
                num(rep.ensemble_mean_grid) + ", gap " + num(gap) +
                " (gate 0.10)");
  out.push_back("closed display 2 c0 beta(4) zeta(4) = " + num(rep.display_value) +
                " vs truncated lattice sum " + num(rep.lattice_sum) +
                ": discrepancy ratio " + num(rep.discrepancy_ratio));
  const bool flagged = !rep.display_consistent;
  out.push_back(flagged
                    ? "the documented display/lattice discrepancy is flagged "
                      "(the display value depends on neither h nor the "
                      "truncation)"
                    : "display UNEXPECTEDLY consistent with the lattice sum");
  return avg_ok && flagged;
}

bool check_10(std::vector<std::string>& out) {
  const ConditionReport cond = condition_check(1.0, 0.5);
  const double oracle_gap = std::abs(cond.rhs - oracle::inv_zeta4_beta4);
  const bool cond_ok = cond.satisfied && oracle_gap < 1e-10;
  out.push_back("condition threshold 1/(beta(4) zeta(4)): computed " +
                num(cond.rhs) + ", |gap to oracle| = " + num(oracle_gap) +
                " (gate 1e-10), condition satisfied at c0=1, C1=0.5");

  PullbackExperiment exp;
  exp.t0_list = {-2.0, -4.0, -8.0};
  for (int k = 0; k < 5; ++k) {
    SpectralVelocityField f = spread_field(8, 0.2 * (k + 1));
    if (k % 2 == 1)
      for (int m = 1; m <= 8; ++m)
        for (int n = 1; n <= 8; ++n) f.at(m, n) = -f.at(m, n);
    exp.initial_conditions.push_back(std::move(f));
  }
  SolveConfig cfg;
  cfg.m_max = 8;

  bool all_ok = true;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto noise = NoiseRealization::generate(
        8, 0.35, -13.0, 0.0, 1000, derive_seed(g_master, 1000, s));
    const PullbackResult res = pullback_run(exp, &noise, cfg, 1.0, 0.5);
    bool monotone = res.monotone_violations.empty();
    std::size_t reexits = 0, absorbed = 0;
    for (const auto& row : res.reexit)
      for (const char r : row) reexits += r ? 1 : 0;
    for (const auto& row : res.absorbed)
      for (const char a : row) absorbed += a ? 1 : 0;
    const bool clean = monotone && reexits == 0;
    all_ok = all_ok && clean;
    out.push_back("noise seed " + std::to_string(s) + ": diameters " +
                  num(res.diameters[0]) + " -> " + num(res.diameters[1]) +
                  " -> " + num(res.diameters[2]) + " (monotone: " +
                  (monotone ? "yes" : "NO") + "), " + std::to_string(absorbed) +
                  "/15 absorbed, " + std::to_string(reexits) +
                  " left rho_H again on [-1, 0]");
  }
  return cond_ok && all_ok;
}

bool check_11(std::vector<std::string>& out) {
  const fs::path d1 = fs::temp_directory_path() / "fbmlab_acceptance_va1";
  const fs::path d2 = fs::temp_directory_path() / "fbmlab_acceptance_va2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  ExperimentConfig cfg;
  cfg.seed = g_master;
  cfg.out = d1.string();
  const RunManifest a = run_experiment("verify-all", cfg);
  cfg.out = d2.string();
  const RunManifest b = run_experiment("verify-all", cfg);
  std::map<std::string, std::uint64_t> ca, cb;
  for (const auto& o : a.outputs) ca[o.name] = o.checksum;
  for (const auto& o : b.outputs) cb[o.name] = o.checksum;
  const bool identical = !ca.empty() && ca == cb;
  const bool no_fail = a.status != "fail" && b.status != "fail";
  out.push_back("verify-all run twice with master seed " +
                std::to_string(g_master) + ": " + std::to_string(ca.size()) +
                " CSV outputs, checksums " +
                (identical ? "bit-identical" : "DIFFER"));
  out.push_back("suite statuses: " + a.status + " / " + b.status +
                " (the ergodic display finding is flagged, not a failure)");
  fs::remove_all(d1);
  fs::remove_all(d2);
  return identical && no_fail;
}

struct Criterion {
  int id;
  const char* label;
  double limit_s;  // 0: no runtime clause
  bool expected_pass;
  const char* expectation_note;
  std::function<bool(std::vector<std::string>&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> cs = {
      {1, "fBm sampler covariance", 60.0, true, "", check_1},
      {2, "kernel identity and Wiener isometry", 120.0, true, "", check_2},
      {3, "damped divergence integral plateau and witness slope", 30.0, false,
       "the 1e-6 plateau claim contradicts the integral's algebraic tail; "
       "the finite limit and the witness slope are reproduced, the plateau "
       "tolerance is not attainable",
       check_3},
      {4, "convolution series partial sums and boundary divergence", 300.0,
       false,
       "the 1% settling claim at M=32 contradicts the (m^2+n^2)^{-4h} decay "
       "rate at h=0.3; monotonicity, the i1+i2 bound, and the boundary "
       "divergence all hold",
       check_4},
      {5, "by-parts identity residual", 60.0, true, "", check_5},
      {6, "fluid form identities and duality bound", 60.0, true, "", check_6},
      {7, "solver exactness, contraction, decay, convergence", 300.0, true, "",
       check_7},
      {8, "discrete energy inequality", 300.0, true, "", check_8},
      {9, "ergodic time average and display comparison", 600.0, true, "",
       check_9},
      {10, "pullback contraction and absorption", 900.0, true, "", check_10},
      {11, "bit-identical reruns", 0.0, true, "", check_11},
  };
  return cs;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      only = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
      g_master = std::strtoull(argv[++i], nullptr, 10);
    else {
      std::fprintf(stderr,
                   "usage: %s [--criterion N] [--seed S]\n", argv[0]);
      return 1;
    }
  }

  int deviations = 0, ran = 0;
  for (const Criterion& c : criteria()) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    std::vector<std::string> detail;
    const auto t0 = clock_type::now();
    bool measured = false;
    try {
      measured = c.run(detail);
    } catch (const std::exception& e) {
      detail.push_back(std::string("exception: ") + e.what());
      measured = false;
    }
    const double elapsed =
        std::chrono::duration<double>(clock_type::now() - t0).count();
    const bool in_budget = c.limit_s <= 0.0 || elapsed < c.limit_s;
    const bool pass = measured && in_budget;

    char timing[96];
    if (c.limit_s > 0.0)
      std::snprintf(timing, sizeof timing, "%.1fs %s %.0fs limit", elapsed,
                    in_budget ? "<" : ">=", c.limit_s);
    else
      std::snprintf(timing, sizeof timing, "%.1fs", elapsed);

    std::printf("criterion %2d: %s (%s) - %s%s\n", c.id,
                pass ? "PASS" : "FAIL", timing, c.label,
                (!c.expected_pass && !pass) ? " [expected failure]" : "");
    for (const auto& line : detail)
      std::printf("              %s\n", line.c_str());
    if (!c.expected_pass)
      std::printf("              expectation: %s\n", c.expectation_note);

    if (pass != c.expected_pass) {
      ++deviations;
      std::printf("              *** DEVIATION: measured %s but expected %s\n",
                  pass ? "PASS" : "FAIL", c.expected_pass ? "PASS" : "FAIL");
    }
  }

  if (ran == 0) {
    std::fprintf(stderr, "no such criterion\n");
    return 1;
  }
  std::printf("%d criterion(s) run, %d deviation(s) from the expected "
              "verdicts\n", ran, deviations);
  return deviations == 0 ? 0 : 1;
}
