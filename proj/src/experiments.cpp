#include "fbmlab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fbmlab/attractor.hpp"
#include "fbmlab/common.hpp"
#include "fbmlab/fbm.hpp"
#include "fbmlab/solver.hpp"
#include "fbmlab/spectral.hpp"
#include "fbmlab/stoch_conv.hpp"

namespace fbmlab {

namespace {

namespace fs = std::filesystem;

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Shared manifest bookkeeping: every experiment opens a Run, records each
// file it wrote, and finishes exactly once.
struct Run {
  fs::path dir;
  RunManifest m;

  Run(const std::string& name, const ExperimentConfig& cfg) {
    dir = fs::path(cfg.out) / name;
    fs::create_directories(dir);
    m.experiment = name;
    m.master_seed = cfg.seed;
    m.parameters = config_echo(cfg);
    m.tool_version = kToolVersion;
    m.started = utc_now_iso();
    m.status = "pass";
  }

  void record(const std::string& name) {
    OutputRecord r;
    r.name = name;
    r.checksum = file_checksum(dir / name);
    r.bytes = static_cast<std::uint64_t>(fs::file_size(dir / name));
    m.outputs.push_back(r);
  }

  void note(const std::string& s) { m.notes.push_back(s); }

  void fail(const std::string& why) {
    m.status = "fail";
    m.notes.push_back(why);
  }

  void flag(const std::string& why) {
    if (m.status == "pass") m.status = "flagged";
    m.notes.push_back(why);
  }

  RunManifest finish() {
    m.finished = utc_now_iso();
    append_manifest(dir, m);
    return m;
  }
};

void require_supercritical(const std::string& name, double hurst) {
  if (hurst > 0.25) return;
  throw std::invalid_argument(
      name + ": hurst = " + num(hurst) +
      " violates the H > 1/4 requirement (the spectral mode sums of the "
      "convolution need 4H > 1 to converge)");
}

void require_rough(const std::string& name, double hurst) {
  if (hurst > 0.0 && hurst < 0.5) return;
  throw std::invalid_argument(name + ": hurst = " + num(hurst) +
                              " outside (0, 1/2), where this integral family "
                              "is defined");
}

std::vector<double> uniform_times(double t_final, int knots_per_unit) {
  const auto cells = std::max<long long>(
      2, std::llround(static_cast<double>(knots_per_unit) * t_final));
  std::vector<double> times(static_cast<std::size_t>(cells) + 1);
  for (std::size_t k = 0; k < times.size(); ++k)
    times[k] = t_final * static_cast<double>(k) / static_cast<double>(cells);
  times.back() = t_final;
  return times;
}

// alternating-sign datum spread over every active mode, scaled to |u|_{L2}
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

// ---------------------------------------------------------------------------
// fbm-sample: empirical covariance of the path sampler against the closed
// form, entrywise within three standard errors.

RunManifest run_fbm_sample(const ExperimentConfig& cfg) {
  if (!(cfg.hurst > 0.0 && cfg.hurst <= 0.5))
    throw std::invalid_argument("fbm-sample: hurst = " + num(cfg.hurst) +
                                " outside the supported range (0, 1/2]");
  Run run("fbm-sample", cfg);

  constexpr int kKnots = 64;
  std::vector<double> times(kKnots + 1);
  for (int k = 0; k <= kKnots; ++k) times[k] = cfg.t_final * k / kKnots;
  FbmSampler sampler(times, cfg.hurst);

  const std::size_t n = static_cast<std::size_t>(cfg.samples);
  constexpr std::size_t kChunks = 64;
  std::vector<Eigen::MatrixXd> acc(
      kChunks, Eigen::MatrixXd::Zero(kKnots + 1, kKnots + 1));
  parallel_chunks(n, kChunks,
                  [&](std::size_t c, std::size_t b, std::size_t e) {
                    Eigen::VectorXd x(kKnots + 1);
                    for (std::size_t i = b; i < e; ++i) {
                      const FbmPath path =
                          sampler.sample(derive_seed(cfg.seed, 1, i));
                      for (int k = 0; k <= kKnots; ++k) x[k] = path.values[k];
                      acc[c].selfadjointView<Eigen::Upper>().rankUpdate(x);
                    }
                  });
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(kKnots + 1, kKnots + 1);
  for (const auto& a : acc) sum += a;  // fixed merge order: deterministic

  CsvFile csv(run.dir / "fbm_covariance.csv",
              "i,j,t_i,t_j,empirical,exact,three_se,ok");
  std::size_t checked = 0, outside = 0;
  double worst = 0.0;
  for (int i = 1; i <= kKnots; ++i) {
    const double cii = fbm_covariance(times[i], times[i], cfg.hurst);
    for (int j = i; j <= kKnots; ++j) {
      const double cjj = fbm_covariance(times[j], times[j], cfg.hurst);
      const double exact = fbm_covariance(times[i], times[j], cfg.hurst);
      const double emp = sum(i, j) / static_cast<double>(n);
      const double se =
          std::sqrt((cii * cjj + exact * exact) / static_cast<double>(n));
      const bool ok = std::abs(emp - exact) <= 3.0 * se;
      worst = std::max(worst, std::abs(emp - exact) / se);
      ++checked;
      if (!ok) ++outside;
      csv.row({static_cast<double>(i), static_cast<double>(j), times[i],
               times[j], emp, exact, 3.0 * se, ok ? 1.0 : 0.0});
    }
  }
  csv.close();
  run.record("fbm_covariance.csv");

  run.note("covariance entries checked: " + std::to_string(checked) +
           ", worst |error|/se = " + num(worst));
  run.note(sampler.uses_dense()
               ? "sampler route: dense Cholesky"
               : "sampler route: circulant embedding, min eigen ratio " +
                     num(sampler.min_eigen_ratio()));
  if (outside > 0)
    run.fail(std::to_string(outside) +
             " covariance entries outside three standard errors");
  return run.finish();
}

// ---------------------------------------------------------------------------
// kernel-check: the kernel variance identity int_0^t K^2 = t^{2H} and the
// Monte Carlo isometry Var(int phi dB) = |K* phi|_{L2}^2.

RunManifest run_kernel_check(const ExperimentConfig& cfg) {
  if (!(cfg.hurst > 0.0 && cfg.hurst <= 0.5))
    throw std::invalid_argument("kernel-check: hurst = " + num(cfg.hurst) +
                                " outside the supported range (0, 1/2]");
  Run run("kernel-check", cfg);
  const double h = cfg.hurst;
  const auto kernel = kernel_for(h);

  bool identity_ok = true;
  {
    CsvFile csv(run.dir / "kernel_identity.csv",
                "t,variance_integral,power,rel_error,ok");
    for (const double t : {0.5, 1.0, 2.0}) {
      const double vi = kernel->variance_integral(t);
      const double tw = std::pow(t, 2.0 * h);
      const double rel = std::abs(vi - tw) / tw;
      const bool ok = rel <= 1e-4;
      identity_ok = identity_ok && ok;
      csv.row({t, vi, tw, rel, ok ? 1.0 : 0.0});
    }
    csv.close();
    run.record("kernel_identity.csv");
  }

  // smooth integrands with hand derivatives; the isometry horizon is fixed
  // at t = 1
  const std::vector<SmoothFn> phis = {
      {[](double) { return 1.0; }, [](double) { return 0.0; }},
      {[](double r) { return r; }, [](double) { return 1.0; }},
      {[](double r) { return r * r; }, [](double r) { return 2.0 * r; }},
      {[](double r) { return std::cos(r); },
       [](double r) { return -std::sin(r); }},
      {[](double r) { return std::sin(2.0 * r); },
       [](double r) { return 2.0 * std::cos(2.0 * r); }}};
  const std::size_t np = phis.size();

  const std::vector<double> times = uniform_times(1.0, 512);
  std::vector<double> exact(np);
  std::vector<std::vector<double>> weights(np);
  for (std::size_t k = 0; k < np; ++k) {
    SampledFunction s;
    s.grid = times;
    s.values.resize(times.size());
    for (std::size_t j = 0; j < times.size(); ++j)
      s.values[j] = phis[k].f(times[j]);
    exact[k] = kstar_l2_norm_sq(kstar_apply(s, 1.0, h), h);
    weights[k] = wiener_weight_vector(phis[k], times);
  }

  FbmSampler sampler(times, h);
  const std::size_t n = static_cast<std::size_t>(cfg.samples);
  constexpr std::size_t kChunks = 64;
  std::vector<std::array<double, 8>> acc(kChunks, std::array<double, 8>{});
  parallel_chunks(n, kChunks,
                  [&](std::size_t c, std::size_t b, std::size_t e) {
                    for (std::size_t i = b; i < e; ++i) {
                      const FbmPath path =
                          sampler.sample(derive_seed(cfg.seed, 2, i));
                      for (std::size_t k = 0; k < np; ++k) {
                        const double x = apply_weight_vector(weights[k], path);
                        acc[c][k] += x * x;
                      }
                    }
                  });

  bool iso_ok = true;
  {
    CsvFile csv(run.dir / "kernel_isometry.csv",
                "phi,mc_variance,exact_norm_sq,three_se,ok");
    for (std::size_t k = 0; k < np; ++k) {
      double sumsq = 0.0;
      for (const auto& a : acc) sumsq += a[k];
      const double mc = sumsq / static_cast<double>(n);
      const double se = exact[k] * std::sqrt(2.0 / static_cast<double>(n));
      const bool ok = std::abs(mc - exact[k]) <= 3.0 * se;
      iso_ok = iso_ok && ok;
      csv.row({static_cast<double>(k), mc, exact[k], 3.0 * se, ok ? 1.0 : 0.0});
    }
    csv.close();
    run.record("kernel_isometry.csv");
  }

  run.note("variance identity checked at t = 0.5, 1, 2 against t^{2H}");
  run.note(std::to_string(np) +
           " integrands, isometry horizon 1, ensemble size " +
           std::to_string(n));
  if (!identity_ok) run.fail("variance identity off by more than 1e-4");
  if (!iso_ok) run.fail("isometry outside three standard errors");
  return run.finish();
}

// ---------------------------------------------------------------------------
// lemma2: the damped divergence integral along a growing cutoff ladder.

RunManifest run_lemma2(const ExperimentConfig& cfg) {
  require_rough("lemma2", cfg.hurst);
  Run run("lemma2", cfg);

  const std::vector<double> ladder = {25.0, 50.0, 100.0, 200.0, 400.0};
  std::vector<double> values(ladder.size());
  for (std::size_t k = 0; k < ladder.size(); ++k)
    values[k] = lemma2_integral(cfg.hurst, ladder[k]);

  CsvFile csv(run.dir / "lemma2.csv", "lambda_upper,value");
  for (std::size_t k = 0; k < ladder.size(); ++k)
    csv.row({ladder[k], values[k]});
  csv.close();
  run.record("lemma2.csv");

  bool monotone = true;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] < values[k - 1] * (1.0 - 1e-12)) monotone = false;
  const double rel_50_100 = std::abs(values[2] - values[1]) / values[1];
  run.note("relative change from cutoff 50 to 100: " + num(rel_50_100) +
           " (the tail decays only algebraically)");
  if (!monotone) run.fail("cutoff ladder is not monotone nondecreasing");
  return run.finish();
}

// ---------------------------------------------------------------------------
// ttv-divergence: the undamped witness grows like e^{2 lambda}.

RunManifest run_ttv(const ExperimentConfig& cfg) {
  require_rough("ttv-divergence", cfg.hurst);
  Run run("ttv-divergence", cfg);

  const double a = cfg.hurst + 0.5;
  const TtvWitness wit = ttv_divergence_witness(a, {20.0, 30.0, 40.0, 50.0});

  CsvFile csv(run.dir / "ttv_witness.csv", "lambda_upper,value");
  for (std::size_t k = 0; k < wit.lambda_upper.size(); ++k)
    csv.row({wit.lambda_upper[k], wit.value[k]});
  csv.close();
  run.record("ttv_witness.csv");

  run.note("inner exponent a = " + num(a) + ", log-slope " +
           num(wit.log_slope) + " (exponential growth rate, expected 2)");
  if (std::abs(wit.log_slope - 2.0) > 0.2)
    run.fail("log-slope " + num(wit.log_slope) + " outside 2.0 +- 0.2");
  return run.finish();
}

// ---------------------------------------------------------------------------
// conv-var: Monte Carlo variance of the per-mode stochastic convolution
// against the exact continuum value.

RunManifest run_conv_var(const ExperimentConfig& cfg) {
  require_supercritical("conv-var", cfg.hurst);
  Run run("conv-var", cfg);

  const std::vector<std::pair<int, int>> modes = {
      {1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}};
  const std::vector<double> times = uniform_times(cfg.t_final, cfg.grid);
  FbmSampler sampler(times, cfg.hurst);
  const std::size_t n = static_cast<std::size_t>(cfg.samples);
  constexpr std::size_t kChunks = 64;

  CsvFile csv(run.dir / "conv_variance.csv",
              "m,n,lambda,mc_variance,exact_variance,three_se,ok");
  std::size_t outside = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const auto [m, mn] = modes[k];
    const double lambda = eigenvalue({m, mn});
    std::vector<double> acc(kChunks, 0.0);
    parallel_chunks(n, kChunks,
                    [&](std::size_t c, std::size_t b, std::size_t e) {
                      for (std::size_t i = b; i < e; ++i) {
                        const FbmPath path = sampler.sample(
                            derive_seed(cfg.seed, 300 + k, i));
                        const double z =
                            mode_convolution(path, lambda, cfg.t_final);
                        acc[c] += z * z;
                      }
                    });
    double sumsq = 0.0;
    for (const double a : acc) sumsq += a;
    const double mc = sumsq / static_cast<double>(n);
    const double exact = mode_variance(lambda, cfg.t_final, cfg.hurst);
    const double se = exact * std::sqrt(2.0 / static_cast<double>(n));
    const bool ok = std::abs(mc - exact) <= 3.0 * se;
    if (!ok) ++outside;
    worst = std::max(worst, std::abs(mc - exact) / se);
    csv.row({static_cast<double>(m), static_cast<double>(mn), lambda, mc,
             exact, 3.0 * se, ok ? 1.0 : 0.0});
  }
  csv.close();
  run.record("conv_variance.csv");

  run.note(std::to_string(modes.size()) + " modes, " + std::to_string(n) +
           " paths each, worst |error|/se = " + num(worst));
  if (outside > 0)
    run.fail(std::to_string(outside) +
             " modes outside three standard errors");
  return run.finish();
}

// ---------------------------------------------------------------------------
// fou-ergodic: Birkhoff time averages of |Z|^2 in the A^{1/4} norm against
// the stationary ensemble mean, plus the closed display value the source
// quotes for that limit.

RunManifest run_fou_ergodic(const ExperimentConfig& cfg) {
  require_supercritical("fou-ergodic", cfg.hurst);
  Run run("fou-ergodic", cfg);

  const std::vector<double> horizons = {25.0, 75.0, 150.0};
  const int grid_eff = std::min(cfg.grid, 256);
  const double origin = -5.0;
  if (grid_eff != cfg.grid)
    run.note("grid capped at " + std::to_string(grid_eff) +
             " knots per unit time for the long ergodic horizon");
  run.note("horizons fixed at 25, 75, 150 with burn-in from t = -5");

  const NoiseRealization noise = NoiseRealization::generate(
      cfg.modes, cfg.hurst, origin, horizons.back(), grid_eff,
      derive_seed(cfg.seed, 6, 0));
  const ErgodicReport rep = ergodic_limit_study(noise, horizons, cfg.c0);

  {
    CsvFile csv(run.dir / "fou_time_average.csv",
                "horizon,time_average,ensemble_mean_grid,ratio");
    for (std::size_t k = 0; k < horizons.size(); ++k)
      csv.row({horizons[k], rep.time_averages[k], rep.ensemble_mean_grid,
               rep.time_averages[k] / rep.ensemble_mean_grid});
    csv.close();
    run.record("fou_time_average.csv");
  }
  {
    CsvFile csv(run.dir / "fou_display.csv",
                "lattice_sum,display_value,discrepancy_ratio,"
                "display_consistent");
    csv.row({rep.lattice_sum, rep.display_value, rep.discrepancy_ratio,
             rep.display_consistent ? 1.0 : 0.0});
    csv.close();
    run.record("fou_display.csv");
  }

  const double ratio = rep.time_averages.back() / rep.ensemble_mean_grid;
  run.note("final time average / grid ensemble mean = " + num(ratio));
  if (!rep.display_consistent)
    run.flag("the closed display value " + num(rep.display_value) +
             " disagrees with the truncated lattice sum " +
             num(rep.lattice_sum) + " (ratio gap " +
             num(rep.discrepancy_ratio) +
             " > 0.25); the display depends on neither the Hurst index nor "
             "the truncation, so the gap is structural, not numerical");
  if (std::abs(ratio - 1.0) > 0.10)
    run.fail("final time average off the ensemble mean by more than 10%");
  return run.finish();
}

// ---------------------------------------------------------------------------
// solve: one forward solve from a spread datum with the discrete energy
// inequality monitored at every step.

RunManifest run_solve(const ExperimentConfig& cfg) {
  require_supercritical("solve", cfg.hurst);
  Run run("solve", cfg);

  SolveConfig sc;
  sc.dt = cfg.dt;
  sc.t_final = cfg.t_final;
  sc.m_max = cfg.modes;
  sc.fluid = cfg.fluid;
  sc.validate();

  const NoiseRealization noise = NoiseRealization::generate(
      cfg.modes, cfg.hurst, 0.0, cfg.t_final, cfg.grid,
      derive_seed(cfg.seed, 7, 0));
  const SpectralVelocityField u0 = spread_field(cfg.modes, 1.0);
  const GlobalReport rep = global_solve(u0, &noise, sc);

  ConstantsReport chain;
  try {
    chain = derive_constants(cfg.c0, cfg.C1,
                             stationary_ez_l2(cfg.modes, cfg.hurst));
  } catch (const std::domain_error& e) {
    throw std::invalid_argument(std::string("solve: ") + e.what());
  }
  const EnergyParams params = energy_params_from(chain, cfg.fluid);
  const EnergyReport energy = energy_monitor(rep.traj, params);

  {
    std::ofstream os(run.dir / "trajectory.csv");
    if (!os)
      throw std::runtime_error("cannot open " +
                               (run.dir / "trajectory.csv").string());
    write_trajectory_csv(os, rep.traj);
  }
  run.record("trajectory.csv");
  {
    CsvFile csv(run.dir / "energy_check.csv", "step,lhs,rhs,slack,violation");
    for (std::size_t k = 0; k < energy.lhs.size(); ++k) {
      const bool bad = std::find(energy.violations.begin(),
                                 energy.violations.end(),
                                 k) != energy.violations.end();
      csv.row({static_cast<double>(k), energy.lhs[k], energy.rhs[k],
               energy.slack[k], bad ? 1.0 : 0.0});
    }
    csv.close();
    run.record("energy_check.csv");
  }

  run.note("sup |v|^2 = " + num(rep.sup_v_l2_sq) + ", dissipation integral " +
           num(rep.int_v_v_sq));
  run.note("energy inequality: " + std::to_string(energy.violations.size()) +
           " violations over " + std::to_string(energy.lhs.size()) +
           " steps, max excess " + num(energy.max_excess));
  if (!energy.passed)
    run.fail("discrete energy inequality violated beyond the O(dt) slack");
  return run.finish();
}

// ---------------------------------------------------------------------------
// pullback: diameters of the pulled-back solution map and absorption into
// the estimated radius.

RunManifest run_pullback(const ExperimentConfig& cfg) {
  require_supercritical("pullback", cfg.hurst);
  Run run("pullback", cfg);

  SolveConfig sc;
  sc.dt = cfg.dt;
  sc.t_final = 1.0;  // unused by the cocycle windows; kept valid
  sc.m_max = cfg.modes;
  sc.fluid = cfg.fluid;
  sc.validate();

  PullbackExperiment exp;
  exp.t0_list = {-2.0, -4.0, -8.0};
  for (int k = 0; k < 5; ++k) {
    SpectralVelocityField f = spread_field(cfg.modes, 0.2 * (k + 1));
    if (k % 2 == 1)
      for (int m = 1; m <= cfg.modes; ++m)
        for (int n = 1; n <= cfg.modes; ++n) f.at(m, n) = -f.at(m, n);
    exp.initial_conditions.push_back(std::move(f));
  }

  // the noise grid matches the solver step so the cocycle can slice the
  // per-mode recursion exactly
  const int gp = std::max<long long>(1, std::llround(1.0 / cfg.dt));
  const double origin = exp.t0_list.back() - 5.0;
  const NoiseRealization noise = NoiseRealization::generate(
      cfg.modes, cfg.hurst, origin, 0.0, gp, derive_seed(cfg.seed, 8, 0));
  run.note("noise grid " + std::to_string(gp) +
           " knots per unit time (matched to dt), burn-in from t = " +
           num(origin));

  const PullbackResult res = pullback_run(exp, &noise, sc, cfg.c0, cfg.C1);

  {
    CsvFile csv(run.dir / "pullback_diameters.csv", "t0,diameter");
    for (std::size_t it = 0; it < res.t0_list.size(); ++it)
      csv.row({res.t0_list[it], res.diameters[it]});
    csv.close();
    run.record("pullback_diameters.csv");
  }
  {
    CsvFile csv(run.dir / "pullback_absorption.csv",
                "t0,ic,absorbed,reexit,endpoint_l2_sq");
    for (std::size_t it = 0; it < res.t0_list.size(); ++it)
      for (std::size_t ic = 0; ic < exp.initial_conditions.size(); ++ic) {
        const double nl2 = norm_l2(res.endpoints[it][ic]);
        csv.row({res.t0_list[it], static_cast<double>(ic),
                 res.absorbed[it][ic] ? 1.0 : 0.0,
                 res.reexit[it][ic] ? 1.0 : 0.0, nl2 * nl2});
      }
    csv.close();
    run.record("pullback_absorption.csv");
  }
  {
    CsvFile csv(run.dir / "pullback_radius.csv",
                "rho_h_sq,integral,tail,sup_z_l2_sq,r2,t_window,"
                "empirical_h_sq,empirical_v_sq");
    csv.row({res.radius.rho_h_sq, res.radius.integral, res.radius.tail,
             res.radius.sup_z_l2_sq, res.radius.r2, res.radius.t_window,
             res.rho_h_sq_empirical, res.rho_v_sq_empirical});
    csv.close();
    run.record("pullback_radius.csv");
  }

  std::size_t absorbed = 0, total = 0, reexits = 0;
  for (std::size_t it = 0; it < res.t0_list.size(); ++it)
    for (std::size_t ic = 0; ic < exp.initial_conditions.size(); ++ic) {
      ++total;
      if (res.absorbed[it][ic]) ++absorbed;
      if (res.reexit[it][ic]) ++reexits;
    }
  run.note("smallness condition: lhs " + num(res.condition.lhs) + " < rhs " +
           num(res.condition.rhs) +
           (res.condition.satisfied ? " (satisfied)" : " (violated)"));
  run.note("radius estimate " + num(res.radius.rho_h_sq) +
           ", empirical sup " + num(res.rho_h_sq_empirical) + ", " +
           std::to_string(absorbed) + "/" + std::to_string(total) +
           " trajectories absorbed at t = -1");

  if (!res.condition.satisfied)
    run.fail("smallness condition violated: c0 C1^2 = " +
             num(res.condition.lhs) + " >= " + num(res.condition.rhs));
  if (!res.monotone_violations.empty())
    run.fail(std::to_string(res.monotone_violations.size()) +
             " diameter monotonicity violations as t0 recedes");
  if (reexits > 0)
    run.fail(std::to_string(reexits) +
             " absorbed trajectories left the ball again on (-1, 0]");
  return run.finish();
}

// ---------------------------------------------------------------------------
// verify-all: every suite above under one master seed, one aggregate record.

const std::vector<std::string> kSuiteNames = {
    "fbm-sample", "kernel-check", "lemma2",  "ttv-divergence",
    "conv-var",   "fou-ergodic",  "solve",   "pullback"};

RunManifest run_verify_all(const ExperimentConfig& cfg) {
  require_supercritical("verify-all", cfg.hurst);
  Run run("verify-all", cfg);

  std::size_t failed = 0, flagged = 0;
  for (const auto& name : kSuiteNames) {
    const RunManifest sub = run_experiment(name, cfg);
    for (const auto& o : sub.outputs)
      run.m.outputs.push_back({name + "/" + o.name, o.checksum, o.bytes});
    run.note(name + ": " + sub.status);
    if (sub.status == "fail") ++failed;
    if (sub.status == "flagged") ++flagged;
  }
  run.note("output names above are relative to the output root");
  if (flagged > 0)
    run.flag(std::to_string(flagged) +
             " suite(s) flagged a reproducible source finding");
  if (failed > 0)
    run.fail(std::to_string(failed) + " suite(s) failed");
  return run.finish();
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "fbm-sample", "kernel-check", "lemma2",    "ttv-divergence", "conv-var",
      "fou-ergodic", "solve",       "pullback",  "verify-all"};
  return names;
}

RunManifest run_experiment(const std::string& name,
                           const ExperimentConfig& cfg) {
  cfg.validate();
  if (name == "fbm-sample") return run_fbm_sample(cfg);
  if (name == "kernel-check") return run_kernel_check(cfg);
  if (name == "lemma2") return run_lemma2(cfg);
  if (name == "ttv-divergence") return run_ttv(cfg);
  if (name == "conv-var") return run_conv_var(cfg);
  if (name == "fou-ergodic") return run_fou_ergodic(cfg);
  if (name == "solve") return run_solve(cfg);
  if (name == "pullback") return run_pullback(cfg);
  if (name == "verify-all") return run_verify_all(cfg);
  std::string known;
  for (const auto& n : experiment_names()) known += n + ", ";
  known.resize(known.size() - 2);
  throw std::invalid_argument("unknown experiment '" + name +
                              "' (expected one of: " + known + ")");
}

}  // namespace fbmlab
