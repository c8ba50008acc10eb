#include "fbmlab/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbmlab/common.hpp"
#include "fbmlab/special.hpp"

namespace fbmlab {

namespace {

SpectralVelocityField restrict_modes(const SpectralVelocityField& f,
                                     int m_max) {
  if (f.m_max == m_max) return f;
  SpectralVelocityField out = SpectralVelocityField::zero(m_max);
  const int mm = std::min(f.m_max, m_max);
  for (int m = 1; m <= mm; ++m)
    for (int n = 1; n <= mm; ++n) out.at(m, n) = f.at(m, n);
  return out;
}

EnergyTotals energy_of(const SpectralVelocityField& v) {
  EnergyTotals e;
  const double l2 = norm_l2(v);
  const double vv = norm_v(v);
  e.v_l2_sq = l2 * l2;
  e.v_v_sq = vv * vv;
  return e;
}

// Solver knots t_start + k dt, the last one pinned to t_end.
std::vector<double> solve_knots(double t_start, double t_end, double dt) {
  const std::size_t cells = std::max<std::size_t>(
      1, std::size_t(std::llround(std::ceil((t_end - t_start) / dt - 1e-9))));
  std::vector<double> knots(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k)
    knots[k] = std::min(t_start + double(k) * dt, t_end);
  knots.back() = t_end;
  return knots;
}

// True when every knot lands on the realization's path grid (to 1e-6 cells)
// and inside it, so slices can be gathered from the per-mode recursion.
bool grid_aligned(const NoiseRealization& noise,
                  const std::vector<double>& knots,
                  std::vector<std::size_t>& idx) {
  const double delta = 1.0 / noise.grid_per_unit;
  const std::size_t nknots = noise.path(1, 1).times.size();
  idx.resize(knots.size());
  for (std::size_t j = 0; j < knots.size(); ++j) {
    const double x = (knots[j] - noise.origin) / delta;
    const long long r = std::llround(x);
    if (r < 0 || std::size_t(r) >= nknots || std::fabs(x - double(r)) > 1e-6)
      return false;
    idx[j] = std::size_t(r);
  }
  return true;
}

// Slices at path-grid knots from the O(N) recursion, one series per mode.
std::vector<SpectralVelocityField> gather_slices(
    const NoiseRealization& noise, const std::vector<std::size_t>& idx,
    int m_max) {
  std::vector<SpectralVelocityField> out(idx.size(),
                                         SpectralVelocityField::zero(m_max));
  const int mm = std::min(m_max, noise.truncation);
  if (mm < 1) return out;
  parallel_chunks(std::size_t(mm) * std::size_t(mm), 64,
                  [&](std::size_t, std::size_t b, std::size_t e) {
                    for (std::size_t flat = b; flat < e; ++flat) {
                      const int m = int(flat) / mm + 1;
                      const int n = int(flat) % mm + 1;
                      const std::vector<double> series = mode_convolution_series(
                          noise.path(m, n), eigenvalue({m, n}));
                      for (std::size_t j = 0; j < idx.size(); ++j)
                        out[j].at(m, n) = series[idx[j]];
                    }
                  });
  return out;
}

double l2_sq(const SpectralVelocityField& f) {
  const double r = norm_l2(f);
  return r * r;
}

double v_sq(const SpectralVelocityField& f) {
  const double r = norm_v(f);
  return r * r;
}

SpectralVelocityField field_sum(const SpectralVelocityField& a,
                                const SpectralVelocityField& b) {
  SpectralVelocityField s = a;
  s.coeffs += b.coeffs;
  return s;
}

}  // namespace

Trajectory cocycle_solve(const NoiseRealization* noise,
                         const SpectralVelocityField& u0, double t_start,
                         double t_end, const SolveConfig& cfg) {
  cfg.validate();
  if (!(t_end > t_start))
    throw std::invalid_argument("cocycle_solve: t_end must exceed t_start");
  if (noise != nullptr) {
    if (noise->origin > t_start + 1e-12)
      throw std::invalid_argument(
          "cocycle_solve: realization must start at or before t_start");
    if (noise->horizon < t_end - 1e-9 * std::max(1.0, std::fabs(t_end)))
      throw std::invalid_argument(
          "cocycle_solve: realization ends before t_end");
  }

  const std::vector<double> knots = solve_knots(t_start, t_end, cfg.dt);
  std::vector<SpectralVelocityField> slices;
  std::vector<std::size_t> idx;
  if (noise != nullptr && grid_aligned(*noise, knots, idx))
    slices = gather_slices(*noise, idx, cfg.m_max);
  else
    slices = noise_slices(noise, knots, cfg.m_max);

  const CollocationContext ctx(cfg.m_max);
  SolverState st;
  st.t = t_start;
  st.z_cache = slices[0];
  st.v = restrict_modes(u0, cfg.m_max);
  st.v.coeffs -= st.z_cache.coeffs;
  st.energy = energy_of(st.v);

  Trajectory traj;
  traj.times.reserve(knots.size());
  traj.v.reserve(knots.size());
  traj.z.reserve(knots.size());
  traj.energy.reserve(knots.size());
  traj.times.push_back(t_start);
  traj.v.push_back(st.v);
  traj.z.push_back(st.z_cache);
  traj.energy.push_back(st.energy);

  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double t_next = knots[k + 1];
    step_v_equation(st, t_next - st.t, slices[k + 1], cfg, ctx);
    st.t = t_next;  // pin against accumulated rounding in t
    traj.times.push_back(st.t);
    traj.v.push_back(st.v);
    traj.z.push_back(st.z_cache);
    traj.energy.push_back(st.energy);
  }
  return traj;
}

SpectralVelocityField cocycle_evaluate(const NoiseRealization* noise,
                                       const SpectralVelocityField& u0,
                                       double t_start, double t_end,
                                       const SolveConfig& cfg) {
  if (t_end == t_start) return u0;
  const Trajectory traj = cocycle_solve(noise, u0, t_start, t_end, cfg);
  return field_sum(traj.v.back(), traj.z.back());
}

double cocycle_lipschitz(const NoiseRealization* noise,
                         const SpectralVelocityField& a,
                         const SpectralVelocityField& b, double t_start,
                         double t_end, const SolveConfig& cfg,
                         int probe_points) {
  if (probe_points < 2)
    throw std::invalid_argument("cocycle_lipschitz: need >= 2 probe points");
  if (a.m_max != b.m_max)
    throw std::invalid_argument(
        "cocycle_lipschitz: segment endpoints have mismatched mode counts");

  std::vector<SpectralVelocityField> probes(std::size_t(probe_points), a);
  for (int i = 0; i < probe_points; ++i) {
    const double w = double(i) / double(probe_points - 1);
    probes[std::size_t(i)].coeffs =
        (1.0 - w) * a.coeffs + w * b.coeffs;
  }
  std::vector<SpectralVelocityField> images;
  images.reserve(probes.size());
  for (const auto& p : probes)
    images.push_back(cocycle_evaluate(noise, p, t_start, t_end, cfg));

  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
    SpectralVelocityField du = probes[i + 1];
    du.coeffs -= probes[i].coeffs;
    const double den = norm_l2(du);
    if (den == 0.0)
      throw std::invalid_argument(
          "cocycle_lipschitz: probe points coincide; segment endpoints must "
          "differ");
    SpectralVelocityField dimg = images[i + 1];
    dimg.coeffs -= images[i].coeffs;
    worst = std::max(worst, norm_l2(dimg) / den);
  }
  return worst;
}

ConditionReport condition_check(double c0, double C1) {
  if (!(c0 > 0.0) || !(C1 > 0.0))
    throw std::invalid_argument(
        "condition_check: c0 and C1 must be positive");
  const double bz = dirichlet_beta(4.0) * riemann_zeta(4.0);
  ConditionReport r;
  r.c0 = c0;
  r.C1 = C1;
  r.lhs = c0 * C1 * C1;
  r.rhs = 1.0 / bz;
  r.margin = r.rhs - r.lhs;
  r.satisfied = r.lhs < r.rhs;
  r.c2_lo = c0 * C1 * bz;
  r.c2_hi = 1.0 / C1;
  r.window_nonempty = r.c2_lo < r.c2_hi;
  return r;
}

ConstantsReport derive_constants(double c0, double C1, double ez_l2_sq) {
  if (!(ez_l2_sq >= 0.0))
    throw std::invalid_argument("derive_constants: E|Z|^2 must be >= 0");
  ConstantsReport r;
  r.condition = condition_check(c0, C1);
  if (!r.condition.window_nonempty) {
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "derive_constants: admissible C2 interval (%.6g, %.6g) is "
                  "empty; need c0 C1^2 < %.12g, got %.6g",
                  r.condition.c2_lo, r.condition.c2_hi, r.condition.rhs,
                  r.condition.lhs);
    throw std::domain_error(buf);
  }
  r.C2 = std::sqrt(r.condition.c2_lo * r.condition.c2_hi);
  r.ez_l2_sq = ez_l2_sq;
  r.dissipation_margin = 2.0 - (C1 / r.C2) * ez_l2_sq;
  if (!(r.dissipation_margin > 0.0)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "derive_constants: dissipation margin 2 - (C1/C2) E|Z|^2 = "
                  "%.6g is not positive (E|Z|^2 = %.6g)",
                  r.dissipation_margin, ez_l2_sq);
    throw std::domain_error(buf);
  }
  r.r2 = 0.5 * r.dissipation_margin;
  r.r1 = 0.25 * r.dissipation_margin;
  return r;
}

namespace {

void require_stationary_args(int m_max, double hurst, const char* fn) {
  if (m_max < 1)
    throw std::invalid_argument(std::string(fn) + ": m_max must be >= 1");
  if (!(hurst > 0.25 && hurst < 1.0))
    throw std::invalid_argument(
        std::string(fn) +
        ": hurst must lie in (1/4, 1) for a convergent mode sum");
}

}  // namespace

double stationary_ez_l2(int m_max, double hurst) {
  require_stationary_args(m_max, hurst, "stationary_ez_l2");
  double acc = 0.0;
  for (int m = 1; m <= m_max; ++m)
    for (int n = 1; n <= m_max; ++n) {
      const double lam = eigenvalue({m, n});
      acc += mode_variance(lam, std::max(1.0, 80.0 / lam), hurst);
    }
  return acc;
}

double stationary_ez_h01(int m_max, double hurst) {
  require_stationary_args(m_max, hurst, "stationary_ez_h01");
  double acc = 0.0;
  for (int m = 1; m <= m_max; ++m)
    for (int n = 1; n <= m_max; ++n) {
      const double lam = eigenvalue({m, n});
      acc += laplace_eigenvalue({m, n}) *
             mode_variance(lam, std::max(1.0, 80.0 / lam), hurst);
    }
  return acc;
}

double stationary_grid_variance(double lambda, double hurst,
                                int grid_per_unit) {
  if (!(lambda > 0.0))
    throw std::invalid_argument(
        "stationary_grid_variance: lambda must be positive (the recursion "
        "has no stationary limit at lambda = 0)");
  if (!(hurst > 0.0 && hurst < 1.0))
    throw std::invalid_argument(
        "stationary_grid_variance: hurst must lie in (0, 1)");
  if (grid_per_unit < 1)
    throw std::invalid_argument(
        "stationary_grid_variance: grid_per_unit must be >= 1");
  const double delta = 1.0 / grid_per_unit;
  const double a = std::exp(-lambda * delta);
  const double w = phi1(lambda * delta);
  const double h2 = 2.0 * hurst;
  const double d2h = std::pow(delta, h2);
  // Var = w^2 (gamma_0 + 2 sum_{d>=1} gamma_d a^d) / (1 - a^2) with gamma_d
  // the stationary fBm increment covariance at lag d; the geometric factor
  // sums the weight correlations over the infinite past.
  double sum = d2h;
  double ap = 1.0;
  for (std::size_t d = 1; d < std::size_t(50000000); ++d) {
    ap *= a;
    if (ap < 1e-19) break;
    const double g =
        0.5 * d2h *
        (std::pow(double(d + 1), h2) - 2.0 * std::pow(double(d), h2) +
         std::pow(double(d - 1), h2));
    sum += 2.0 * ap * g;
  }
  return w * w * sum / (-std::expm1(-2.0 * lambda * delta));
}

EnergyParams energy_params_from(const ConstantsReport& constants,
                                const FluidParams& fluid, double lambda1) {
  fluid.validate();
  if (!(lambda1 > 0.0))
    throw std::invalid_argument(
        "energy_params_from: lambda1 must be positive");
  EnergyParams p;
  p.lambda1 = lambda1;
  p.C1 = constants.condition.C1;
  p.C2 = constants.C2;
  p.r1 = constants.r1;
  p.mu0 = fluid.mu0;
  p.eps = fluid.eps;
  p.alpha = fluid.alpha;
  return p;
}

AbsorbingRadius absorbing_radius_estimate(const NoiseRealization* noise,
                                          double r2, double t_window,
                                          const EnergyParams& params) {
  if (!(r2 > 0.0))
    throw std::invalid_argument(
        "absorbing_radius_estimate: r2 must be positive");
  if (!(t_window > 0.0))
    throw std::invalid_argument(
        "absorbing_radius_estimate: t_window must be positive");
  AbsorbingRadius out;
  out.t_window = t_window;
  out.r2 = r2;
  if (noise == nullptr) return out;
  if (noise->origin > -1.0 + 1e-9 || noise->horizon < -1e-9)
    throw std::invalid_argument(
        "absorbing_radius_estimate: realization must cover [-1, 0]");

  const std::vector<double>& rel = noise->path(1, 1).times;
  const double tol = 1e-9 * std::max(1.0, noise->span());
  std::size_t k_lo = 0;
  while (k_lo + 1 < rel.size() &&
         noise->origin + rel[k_lo] < -t_window - tol)
    ++k_lo;
  std::size_t k_hi = rel.size() - 1;
  while (k_hi > k_lo && noise->origin + rel[k_hi] > tol) --k_hi;
  const std::size_t count = k_hi - k_lo + 1;
  if (count < 2)
    throw std::invalid_argument(
        "absorbing_radius_estimate: quadrature window holds fewer than two "
        "path knots");

  std::vector<double> z2(count, 0.0), zh2(count, 0.0);
  for (int m = 1; m <= noise->truncation; ++m)
    for (int n = 1; n <= noise->truncation; ++n) {
      const double lt = laplace_eigenvalue({m, n});
      const std::vector<double> series =
          mode_convolution_series(noise->path(m, n), eigenvalue({m, n}));
      for (std::size_t j = 0; j < count; ++j) {
        const double s = series[k_lo + j];
        z2[j] += s * s;
        zh2[j] += lt * s * s;
      }
    }

  out.s_lo = noise->origin + rel[k_lo];
  double integral = 0.0;
  double g2_prev = params.g2(z2[0], zh2[0]);
  double f_prev = g2_prev * std::exp((1.0 + out.s_lo) * r2);
  double g2_max = g2_prev;
  for (std::size_t j = 1; j < count; ++j) {
    const double s = noise->origin + rel[k_lo + j];
    const double g2 = params.g2(z2[j], zh2[j]);
    const double f = g2 * std::exp((1.0 + s) * r2);
    integral += 0.5 * (f_prev + f) *
                (rel[k_lo + j] - rel[k_lo + j - 1]);
    f_prev = f;
    g2_max = std::max(g2_max, g2);
  }
  out.integral = integral;
  out.g2_max = g2_max;
  out.tail = g2_max * std::exp((1.0 + out.s_lo) * r2) / r2;

  double sup = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double s = noise->origin + rel[k_lo + j];
    if (s >= -1.0 - tol && s <= tol) sup = std::max(sup, z2[j]);
  }
  out.sup_z_l2_sq = sup;
  out.rho_h_sq = 4.0 * (out.integral + out.tail) + 2.0 * sup;
  return out;
}

PullbackResult pullback_run(const PullbackExperiment& exp,
                            const NoiseRealization* noise,
                            const SolveConfig& cfg, double c0, double C1) {
  cfg.validate();
  if (exp.t0_list.empty())
    throw std::invalid_argument("pullback_run: t0_list must not be empty");
  if (exp.initial_conditions.size() < 2)
    throw std::invalid_argument(
        "pullback_run: need at least two initial conditions for a diameter");
  if (exp.t_end != 0.0)
    throw std::invalid_argument(
        "pullback_run: evaluation time must be 0 (pullback to the present)");
  for (std::size_t i = 0; i < exp.t0_list.size(); ++i) {
    if (!(exp.t0_list[i] < exp.t_end))
      throw std::invalid_argument(
          "pullback_run: every start time must precede t_end");
    if (i > 0 && !(exp.t0_list[i] < exp.t0_list[i - 1]))
      throw std::invalid_argument(
          "pullback_run: t0_list must be strictly decreasing");
  }
  for (const auto& ic : exp.initial_conditions)
    if (ic.m_max != cfg.m_max)
      throw std::invalid_argument(
          "pullback_run: initial-condition modes != cfg.m_max");

  PullbackResult res;
  res.condition = condition_check(c0, C1);
  res.t0_list = exp.t0_list;

  // The chain and the radius exist only inside the condition regime; outside
  // it the run still executes with radius 0 and no absorption bookkeeping.
  bool have_chain = false;
  if (res.condition.window_nonempty) {
    const double ez =
        noise ? stationary_ez_l2(cfg.m_max, noise->hurst) : 0.0;
    try {
      res.constants = derive_constants(c0, C1, ez);
      have_chain = true;
    } catch (const std::domain_error&) {
      have_chain = false;
    }
  }
  if (have_chain && noise != nullptr) {
    const EnergyParams params =
        energy_params_from(res.constants, cfg.fluid, 4.0);
    res.radius = absorbing_radius_estimate(noise, res.constants.r2,
                                           -noise->origin, params);
  }
  const double rho = res.radius.rho_h_sq;

  const std::size_t n_t0 = exp.t0_list.size();
  const std::size_t n_ic = exp.initial_conditions.size();
  res.endpoints.resize(n_t0);
  res.diameters.assign(n_t0, 0.0);
  res.absorbed.assign(n_t0, std::vector<char>(n_ic, 0));
  res.reexit.assign(n_t0, std::vector<char>(n_ic, 0));

  for (std::size_t it = 0; it < n_t0; ++it) {
    const double t0 = exp.t0_list[it];
    res.endpoints[it].reserve(n_ic);
    for (std::size_t ic = 0; ic < n_ic; ++ic) {
      const Trajectory traj = cocycle_solve(
          noise, exp.initial_conditions[ic], t0, exp.t_end, cfg);
      res.endpoints[it].push_back(
          field_sum(traj.v.back(), traj.z.back()));

      const double w_lo = std::max(t0, -1.0) - 1e-9;
      std::size_t k1 = traj.times.size();
      for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.times[k] < w_lo) continue;
        if (k1 == traj.times.size()) k1 = k;
        const SpectralVelocityField u = field_sum(traj.v[k], traj.z[k]);
        res.rho_h_sq_empirical = std::max(res.rho_h_sq_empirical, l2_sq(u));
        res.rho_v_sq_empirical = std::max(res.rho_v_sq_empirical, v_sq(u));
      }
      if (rho > 0.0 && t0 <= -1.0 + 1e-9 && k1 < traj.times.size()) {
        const double entry =
            l2_sq(field_sum(traj.v[k1], traj.z[k1]));
        if (entry <= rho) {
          res.absorbed[it][ic] = 1;
          for (std::size_t k = k1 + 1; k < traj.times.size(); ++k) {
            const double uk = l2_sq(field_sum(traj.v[k], traj.z[k]));
            if (uk > rho * (1.0 + 1e-12)) {
              res.reexit[it][ic] = 1;
              break;
            }
          }
        }
      }
    }

    double diam = 0.0;
    for (std::size_t a = 0; a < n_ic; ++a)
      for (std::size_t b = a + 1; b < n_ic; ++b) {
        SpectralVelocityField d = res.endpoints[it][a];
        d.coeffs -= res.endpoints[it][b].coeffs;
        diam = std::max(diam, norm_l2(d));
      }
    res.diameters[it] = diam;
    if (it > 0 && res.diameters[it] >
                      res.diameters[it - 1] * (1.0 + 1e-12))
      res.monotone_violations.push_back(it);
  }
  return res;
}

ErgodicReport ergodic_limit_study(const NoiseRealization& noise,
                                  const std::vector<double>& horizons,
                                  double c0) {
  if (horizons.empty())
    throw std::invalid_argument(
        "ergodic_limit_study: horizons must not be empty");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0.0))
      throw std::invalid_argument(
          "ergodic_limit_study: horizons must be positive");
    if (i > 0 && !(horizons[i] > horizons[i - 1]))
      throw std::invalid_argument(
          "ergodic_limit_study: horizons must be strictly increasing");
  }
  if (!(c0 > 0.0))
    throw std::invalid_argument("ergodic_limit_study: c0 must be positive");
  if (noise.origin > 1e-12)
    throw std::invalid_argument(
        "ergodic_limit_study: realization must start at or before t = 0");
  if (noise.horizon < horizons.back() - 1e-9 * std::max(1.0, horizons.back()))
    throw std::invalid_argument(
        "ergodic_limit_study: realization ends before the last horizon");

  ErgodicReport rep;
  rep.hurst = noise.hurst;
  rep.truncation = noise.truncation;
  rep.c0 = c0;
  rep.horizons = horizons;

  const std::vector<double>& rel = noise.path(1, 1).times;
  const double tol = 1e-9 * std::max(1.0, noise.span());
  std::size_t k0 = 0;
  while (k0 + 1 < rel.size() && noise.origin + rel[k0] < -tol) ++k0;
  const std::size_t count = rel.size() - k0;
  if (count < 2)
    throw std::invalid_argument(
        "ergodic_limit_study: averaging grid holds fewer than two knots at "
        "t >= 0");

  std::vector<double> times(count), values(count, 0.0);
  for (std::size_t j = 0; j < count; ++j)
    times[j] = std::max(0.0, noise.origin + rel[k0 + j]);
  for (int m = 1; m <= noise.truncation; ++m)
    for (int n = 1; n <= noise.truncation; ++n) {
      const double lt = laplace_eigenvalue({m, n});
      const std::vector<double> series =
          mode_convolution_series(noise.path(m, n), eigenvalue({m, n}));
      for (std::size_t j = 0; j < count; ++j) {
        const double s = series[k0 + j];
        values[j] += lt * s * s;
      }
    }

  rep.time_averages.reserve(horizons.size());
  for (const double h : horizons)
    rep.time_averages.push_back(birkhoff_average(times, values, h));

  double grid_mean = 0.0;
  for (int m = 1; m <= noise.truncation; ++m)
    for (int n = 1; n <= noise.truncation; ++n)
      grid_mean += laplace_eigenvalue({m, n}) *
                   stationary_grid_variance(eigenvalue({m, n}), noise.hurst,
                                            noise.grid_per_unit);
  rep.ensemble_mean_grid = grid_mean;
  rep.lattice_sum = stationary_ez_h01(noise.truncation, noise.hurst);
  rep.display_value = 2.0 * c0 * dirichlet_beta(4.0) * riemann_zeta(4.0);
  rep.discrepancy_ratio =
      std::fabs(rep.lattice_sum - rep.display_value) / rep.display_value;
  rep.display_consistent = rep.discrepancy_ratio <= 0.25;
  return rep;
}

double ergodic_mode_average(const NoiseRealization& noise, int m, int n,
                            double horizon) {
  if (m < 1 || n < 1 || m > noise.truncation || n > noise.truncation)
    throw std::invalid_argument(
        "ergodic_mode_average: mode outside the active lattice");
  if (!(horizon > 0.0))
    throw std::invalid_argument(
        "ergodic_mode_average: horizon must be positive");
  if (noise.origin > 1e-12 ||
      noise.horizon < horizon - 1e-9 * std::max(1.0, horizon))
    throw std::invalid_argument(
        "ergodic_mode_average: realization must cover [0, horizon]");

  const FbmPath& path = noise.path(m, n);
  const std::vector<double> series =
      mode_convolution_series(path, eigenvalue({m, n}));
  const double tol = 1e-9 * std::max(1.0, noise.span());
  std::size_t k0 = 0;
  while (k0 + 1 < path.times.size() && noise.origin + path.times[k0] < -tol)
    ++k0;
  const std::size_t count = path.times.size() - k0;
  std::vector<double> times(count), values(count);
  for (std::size_t j = 0; j < count; ++j) {
    times[j] = std::max(0.0, noise.origin + path.times[k0 + j]);
    values[j] = series[k0 + j] * series[k0 + j];
  }
  return birkhoff_average(times, values, horizon);
}

}  // namespace fbmlab
