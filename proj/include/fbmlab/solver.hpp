#pragma once

// Mild-solution machinery for the velocity equation: a windowed Picard
// iteration for the integral form u = S(t)u0 + z - int S(t-s)[B(u)+N(u)] ds
// and an exponential-Euler stepper for the shifted variable v = u - z.  The
// operator acts diagonally, so e^{-At} is exact per mode and the only
// discretization error is in the load quadrature; there is no stiffness
// limit from the largest eigenvalue.  Everything is deterministic: identical
// inputs give bit-identical trajectories.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fbmlab/fluid.hpp"
#include "fbmlab/spectral.hpp"
#include "fbmlab/stoch_conv.hpp"

namespace fbmlab {

struct SolveConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  int m_max = 8;
  double tolerance = 1e-10;  // Picard stop: X-norm of successive difference
  int max_picard = 40;
  bool convection_on = true;  // include B(u)
  bool viscosity_on = true;   // include N(u)
  FluidParams fluid;

  void validate() const;  // throws std::invalid_argument naming the field
};

// Running energy bookkeeping along a trajectory.  `dissipation` is the
// trapezoid accumulation of |v|_V^2 and never decreases.
struct EnergyTotals {
  double v_l2_sq = 0.0;     // |v(t)|^2
  double v_v_sq = 0.0;      // |v(t)|_V^2 = |A^{1/2} v|^2
  double dissipation = 0.0;  // int_0^t |v|_V^2 ds
};

struct SolverState {
  double t = 0.0;
  SpectralVelocityField v;
  SpectralVelocityField z_cache;  // noise convolution at time t (zero if off)
  EnergyTotals energy;
};

// Knot-indexed solution record; u = v + z at each knot.  z entries are zero
// fields when the solve ran without noise.
struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralVelocityField> v;
  std::vector<SpectralVelocityField> z;
  std::vector<EnergyTotals> energy;

  std::size_t size() const { return times.size(); }
};

// z(t) for the solver's clock (absolute time 0 = start of the solve): the
// convolution taken from the realization's first knot, so a burned-in
// realization (origin < 0) yields the stationary sample at t.  Restricted to
// the leading m_max x m_max block; modes the realization does not carry are
// zero.  noise == nullptr gives the zero field.
SpectralVelocityField noise_slice(const NoiseRealization* noise, double t,
                                  int m_max);

// Batched slices at an ascending list of times, entrywise identical to
// noise_slice but with one parallel pass over the modes for the whole list;
// long stepped solves use this to avoid per-step fan-out.
std::vector<SpectralVelocityField> noise_slices(
    const NoiseRealization* noise, const std::vector<double>& times,
    int m_max);

// One exponential-Euler step for v' + Av + B(v+z) + N(v+z) = 0:
//   v <- e^{-lambda dt} v - dt phi1(lambda dt) [B(u)+N(u)]  per mode,
// with the load frozen at the step's left endpoint (u = v + z_cache).
// z_next must be the noise slice at state.t + dt; it becomes the new cache.
// Non-finite or overflowing coefficients abort with a state dump in the
// exception message.
void step_v_equation(SolverState& state, double dt,
                     const SpectralVelocityField& z_next,
                     const SolveConfig& cfg, const CollocationContext& ctx);

struct PicardReport {
  Trajectory u;                   // fixed point on [0, window]; v = u - z
  std::vector<double> distances;  // X-norm of successive iterate differences
  std::vector<double> window_history;  // windows attempted, accepted one last
  double window = 0.0;
  int iterations = 0;
  bool converged = false;  // reached cfg.tolerance (vs. geometric accept)
};

// Picard iteration for the mild form on [0, t_window], load integrals by the
// exact exponential cell rule on a linear interpolant (cellw0/cellw1).  The
// X-norm is max_k |.| plus the quadrature L^2(0,T;V) contribution.  If the
// measured contraction ratio d_{k+1}/d_k (k >= 2) exceeds 1/2 the window is
// halved, flooring at dt; no contraction at window = dt throws with the
// distance history in the message.  Start iterate is phi = S(.)u0 + z, so a
// zero fixed point is recognized after one update.
PicardReport picard_local_solve(const SpectralVelocityField& u0,
                                const NoiseRealization* noise, double t_window,
                                const SolveConfig& cfg);

struct GlobalReport {
  Trajectory traj;
  double sup_v_l2_sq = 0.0;
  double int_v_v_sq = 0.0;    // total dissipation int_0^T |v|_V^2
  double int_z_l2_sq = 0.0;   // int_0^T |z|^2
  double int_z_h01_sq = 0.0;  // int_0^T |z|_{H01}^2
  double sup_z_h01_sq = 0.0;
};

// Exponential-Euler stepping of the v equation to cfg.t_final with
// v(0) = u0 - z(0); with a fresh (origin 0) realization z(0) = 0 and the
// datum is u0 itself.  Blow-up is a reportable finding: the step abort
// propagates as std::runtime_error carrying time and norms.  The report's
// integrals are the ingredients of the a priori growth/dissipation bounds;
// tests fit their constants once and assert the structure across ensembles.
GlobalReport global_solve(const SpectralVelocityField& u0,
                          const NoiseRealization* noise,
                          const SolveConfig& cfg);

// Constants entering the pathwise energy inequality and its forcing bound
//   g2(Z) = (C1/C2)|Z|^2 |Z|_{H01}^2 + C1 C2 |Z|_{H01}^2
//           + (mu0^2 / (4 r1 eps^alpha)) |Z|_{H01}^2.
struct EnergyParams {
  double lambda1 = 4.0;
  double C1 = 0.5;
  double C2 = 1.0;
  double r1 = 0.25;
  double mu0 = 2.0;
  double eps = 2.0;
  double alpha = 0.5;

  double g2(double z_l2_sq, double z_h01_sq) const;
};

struct EnergyReport {
  std::vector<double> lhs;    // per step: difference quotient + kappa |v_k|^2
  std::vector<double> rhs;    // per step: g2 at the step's left knot
  std::vector<double> slack;  // per step: O(dt) discretization allowance
  std::vector<std::size_t> violations;  // steps with lhs > rhs + slack
  double max_excess = 0.0;  // max over steps of lhs - rhs - slack (<=0: pass)
  bool passed = false;
};

// Discrete check of  d|v|^2/dt + kappa |v|^2 <= g2(Z)  along a trajectory,
// kappa = lambda1/2 - (C1/C2)|Z|_{H01}^2 when the step carries noise and the
// sharper lambda1 when Z = 0 (the noise-free estimate has no interpolation
// loss).  The slack 10 dt [(1+lambda1)(|v_k|^2+|v_{k+1}|^2) + g2 + 1] covers
// the O(dt) defect of the difference quotient; violations beyond it are
// listed by step index, never masked.
EnergyReport energy_monitor(const Trajectory& traj, const EnergyParams& params);

// Columns: t, |v|^2, |v|_V^2, |u|^2, |z|^2 with u = v + z; full %.17g
// precision so re-runs can be compared checksum-exactly.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace fbmlab
