#pragma once

// Pullback dynamics built on the mild solver: the solution map driven by a
// frozen noise realization on the absolute clock, the spectral-sum smallness
// condition with the constant chain derived from it, stationary moments of
// the convolution, an absorbing-radius estimate, pullback contraction
// experiments, and time-average versus ensemble-average comparisons.

#include <cstddef>
#include <vector>

#include "fbmlab/fluid.hpp"
#include "fbmlab/solver.hpp"
#include "fbmlab/spectral.hpp"
#include "fbmlab/stoch_conv.hpp"

namespace fbmlab {

// v-equation trajectory on the absolute clock: v(t_start) = u0 - Z(t_start),
// then the same exponential-Euler stepping as global_solve with noise slices
// taken at the solver knots.  When every knot lands on the path grid the
// slices come from the O(N) per-mode recursion (long pullback legs stay
// linear in the step count); otherwise each slice falls back to the windowed
// cell sum.  noise == nullptr runs the noise-free field (Z = 0).
Trajectory cocycle_solve(const NoiseRealization* noise,
                         const SpectralVelocityField& u0, double t_start,
                         double t_end, const SolveConfig& cfg);

// u(t_end) of the solution map started from u0 at t_start; returns u0 itself
// (bitwise) when t_end == t_start.  Satisfies the two-leg composition
// identity exactly at grid-aligned restart times and with an O(dt) defect at
// misaligned ones.
SpectralVelocityField cocycle_evaluate(const NoiseRealization* noise,
                                       const SpectralVelocityField& u0,
                                       double t_start, double t_end,
                                       const SolveConfig& cfg);

// Max over consecutive probe points u_i on the segment [a, b] of
// |map(u_{i+1}) - map(u_i)|_{L2} / |u_{i+1} - u_i|_{L2}.
double cocycle_lipschitz(const NoiseRealization* noise,
                         const SpectralVelocityField& a,
                         const SpectralVelocityField& b, double t_start,
                         double t_end, const SolveConfig& cfg,
                         int probe_points = 10);

// Smallness condition c0 * C1^2 < 1 / (beta_D(4) zeta(4)) together with the
// admissible interval (c0 C1 beta_D(4) zeta(4), 1/C1) for C2; the two are
// algebraically equivalent, so `satisfied` and `window_nonempty` always
// agree, and both flip at C1 = sqrt(rhs / c0).  c0 scales the quartic
// spectral-sum bound; no sharp value for it is computed here, so it stays a
// configurable input (default 1).
struct ConditionReport {
  double c0 = 1.0;
  double C1 = 0.5;
  double lhs = 0.0;     // c0 * C1^2
  double rhs = 0.0;     // 1 / (beta_D(4) * zeta(4))
  double margin = 0.0;  // rhs - lhs
  bool satisfied = false;
  double c2_lo = 0.0;  // c0 * C1 * beta_D(4) * zeta(4)
  double c2_hi = 0.0;  // 1 / C1
  bool window_nonempty = false;
};

ConditionReport condition_check(double c0, double C1);

// Constant chain on top of the condition: C2 is the geometric mean of the
// admissible interval, and the dissipation margin 2 - (C1/C2) E|Z|^2_{L2}
// splits into the absorption exponent r2 = margin/2 and the shear-damping
// split r1 = margin/4.  Throws std::domain_error when the interval is empty
// or the margin is not positive.
struct ConstantsReport {
  ConditionReport condition;
  double C2 = 0.0;
  double ez_l2_sq = 0.0;
  double dissipation_margin = 0.0;  // 2 - (C1/C2) * ez_l2_sq
  double r2 = 0.0;
  double r1 = 0.0;
};

ConstantsReport derive_constants(double c0, double C1, double ez_l2_sq);

// Stationary second moments of the truncated convolution, summed mode by
// mode from the exact continuum variance at a span long enough to push the
// transient below e^{-80}: the L2 norm and the |A^{1/4} .| norm.  The
// weighted sum grows with the truncation for h < 1/2 (per-mode variances
// decay like (m^2+n^2)^{-4h}, so the weighted lattice sum has no limit);
// callers compare it at a fixed truncation.
double stationary_ez_l2(int m_max, double hurst);
double stationary_ez_h01(int m_max, double hurst);

// Stationary variance of the per-mode grid recursion z_{k+1} =
// e^{-lambda delta} z_k + phi1(lambda delta) dB_k for fBm increments on the
// uniform grid delta = 1/grid_per_unit: the Toeplitz increment covariance
// summed against the geometric weight correlations.  Converges to the
// continuum stationary variance as the grid refines.
double stationary_grid_variance(double lambda, double hurst,
                                int grid_per_unit);

// Energy-inequality parameters assembled from a derived constant chain plus
// the fluid parameters.
EnergyParams energy_params_from(const ConstantsReport& constants,
                                const FluidParams& fluid,
                                double lambda1 = 4.0);

// rho_H^2 = 4 int_{-inf}^0 g2(s) e^{(1+s) r2} ds + 2 sup_{[-1,0]} |Z|^2_{L2}
// with the integral taken by trapezoid on the path knots in [-t_window, 0]
// and the un-windowed rest bounded by g2_max e^{(1+s_lo) r2} / r2.  A null
// noise gives radius zero.  The quadrature term is nondecreasing in t_window
// but its increments stay above 1e-6 until t_window is well past 20 at the
// default constants, so window sufficiency is measured, never assumed.
struct AbsorbingRadius {
  double rho_h_sq = 0.0;
  double integral = 0.0;     // trapezoid of g2(s) e^{(1+s) r2} over [s_lo, 0]
  double tail = 0.0;         // bound for the rest of (-inf, s_lo)
  double sup_z_l2_sq = 0.0;  // sup of |Z|^2_{L2} over knots in [-1, 0]
  double s_lo = 0.0;         // first quadrature knot
  double g2_max = 0.0;       // max of g2 over the quadrature window
  double t_window = 0.0;
  double r2 = 0.0;
};

AbsorbingRadius absorbing_radius_estimate(const NoiseRealization* noise,
                                          double r2, double t_window,
                                          const EnergyParams& params);

struct PullbackExperiment {
  std::vector<double> t0_list;  // start times, strictly decreasing, < t_end
  std::vector<SpectralVelocityField> initial_conditions;
  double t_end = 0.0;
};

struct PullbackResult {
  ConditionReport condition;
  ConstantsReport constants;
  AbsorbingRadius radius;
  std::vector<double> t0_list;
  std::vector<std::vector<SpectralVelocityField>> endpoints;  // [t0][ic]
  std::vector<double> diameters;  // max pairwise L2 gap at t_end, per t0
  std::vector<std::size_t> monotone_violations;  // i: diam[i] > diam[i-1]
  std::vector<std::vector<char>> absorbed;  // [t0][ic]; |u(-1)|^2 <= rho^2
  std::vector<std::vector<char>> reexit;    // absorbed but above rho later
  double rho_h_sq_empirical = 0.0;  // max |u|^2 on [max(t0,-1), 0], all runs
  double rho_v_sq_empirical = 0.0;  // max |u|_V^2 over the same windows
};

// Runs the solution map from every (t0, initial condition) pair to t_end and
// reports the endpoint diameter per start time (expected nonincreasing as t0
// recedes; violations are recorded, never masked), absorption against the
// estimated radius at t = -1, and whether an absorbed trajectory leaves the
// ball again on (-1, 0].  The smallness condition is checked first; a
// failing condition does not stop the run, the report just carries
// condition.satisfied = false.  Absorption flags need t0 <= -1 and a noise
// realization; the two empirical radii are sups over the solved
// trajectories, labeled as such, not bounds.
PullbackResult pullback_run(const PullbackExperiment& exp,
                            const NoiseRealization* noise,
                            const SolveConfig& cfg, double c0, double C1);

struct ErgodicReport {
  double hurst = 0.0;
  int truncation = 0;
  double c0 = 1.0;
  std::vector<double> horizons;
  std::vector<double> time_averages;  // of |Z(t)|^2 in the A^{1/4} norm
  double ensemble_mean_grid = 0.0;    // sum over modes of (m^2+n^2) * grid
                                      // stationary variance
  double lattice_sum = 0.0;           // continuum: stationary_ez_h01
  double display_value = 0.0;         // 2 c0 beta_D(4) zeta(4)
  double discrepancy_ratio = 0.0;     // |lattice_sum - display| / display
  bool display_consistent = false;    // discrepancy_ratio <= 0.25
};

// Compares the time average of |Z|^2 in the A^{1/4} norm along one
// realization against the stationary ensemble mean computed three ways: the
// grid-exact recursion variance (what the time average actually estimates),
// the continuum lattice sum at the same truncation, and the closed display
// 2 c0 beta_D(4) zeta(4).  At the defaults the display disagrees with both
// computed values by far more than the 25% consistency threshold (and has no
// dependence on h or the truncation at all); the report flags that instead
// of hiding it.  Averaging starts at absolute time 0, so the realization
// should begin at a negative origin with lambda_1 |origin| large enough for
// burn-in.
ErgodicReport ergodic_limit_study(const NoiseRealization& noise,
                                  const std::vector<double>& horizons,
                                  double c0);

// Time average of z_mn(t)^2 over [0, horizon] for a single mode; converges
// to the stationary grid variance of that mode.
double ergodic_mode_average(const NoiseRealization& noise, int m, int n,
                            double horizon);

}  // namespace fbmlab
