#include "fbmlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fbmlab/common.hpp"

namespace fbmlab {

namespace {

// coefficient magnitude beyond which a step is treated as blown up
constexpr double kBlowupCoeff = 1e12;

SpectralVelocityField restrict_modes(const SpectralVelocityField& f,
                                     int m_max) {
  if (f.m_max == m_max) return f;
  SpectralVelocityField out = SpectralVelocityField::zero(m_max);
  const int mm = std::min(f.m_max, m_max);
  for (int m = 1; m <= mm; ++m)
    for (int n = 1; n <= mm; ++n) out.at(m, n) = f.at(m, n);
  return out;
}

SpectralVelocityField load_field(const SpectralVelocityField& u,
                                 const SolveConfig& cfg,
                                 const CollocationContext& ctx) {
  SpectralVelocityField f = SpectralVelocityField::zero(cfg.m_max);
  if (cfg.convection_on) f.coeffs += B_op(u, ctx).coeffs;
  if (cfg.viscosity_on) f.coeffs += N_op(u, cfg.fluid, ctx).coeffs;
  return f;
}

EnergyTotals advance_energy(const EnergyTotals& prev, double dt,
                            const SpectralVelocityField& v_new) {
  EnergyTotals e;
  const double l2 = norm_l2(v_new);
  const double vv = norm_v(v_new);
  e.v_l2_sq = l2 * l2;
  e.v_v_sq = vv * vv;
  e.dissipation = prev.dissipation + 0.5 * dt * (prev.v_v_sq + e.v_v_sq);
  return e;
}

EnergyTotals energy_of(const SpectralVelocityField& v) {
  EnergyTotals e;
  const double l2 = norm_l2(v);
  const double vv = norm_v(v);
  e.v_l2_sq = l2 * l2;
  e.v_v_sq = vv * vv;
  return e;
}

void require_noise_window(const NoiseRealization* noise, double t_hi,
                          const char* fn) {
  if (noise == nullptr) return;
  if (noise->origin > 1e-12)
    throw std::invalid_argument(std::string(fn) +
                                ": realization must start at or before t = 0");
  if (noise->horizon < t_hi - 1e-9)
    throw std::invalid_argument(std::string(fn) +
                                ": realization horizon ends before the solve");
}

// max_k |f_k| + sqrt(trapezoid of |f_k|_V^2): the norm of C([0,T];H)
// intersected with L^2(0,T;V) on the knot sequence
double xnorm_knots(const std::vector<SpectralVelocityField>& f, double delta) {
  double mx = 0.0, quad = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    mx = std::max(mx, norm_l2(f[k]));
    const double vv = norm_v(f[k]);
    const double w =
        (k == 0 || k + 1 == f.size()) ? 0.5 * delta : delta;
    quad += w * vv * vv;
  }
  return mx + std::sqrt(quad);
}

double xnorm_diff(const std::vector<SpectralVelocityField>& a,
                  const std::vector<SpectralVelocityField>& b, double delta,
                  int m_max) {
  SpectralVelocityField d = SpectralVelocityField::zero(m_max);
  double mx = 0.0, quad = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    d.coeffs = a[k].coeffs - b[k].coeffs;
    mx = std::max(mx, norm_l2(d));
    const double vv = norm_v(d);
    const double w = (k == 0 || k + 1 == a.size()) ? 0.5 * delta : delta;
    quad += w * vv * vv;
  }
  return mx + std::sqrt(quad);
}

std::string join_history(const std::vector<double>& xs) {
  std::ostringstream os;
  os.precision(6);
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? ", " : "") << xs[i];
  return os.str();
}

}  // namespace

void SolveConfig::validate() const {
  if (!(dt > 0.0))
    throw std::invalid_argument("SolveConfig: dt must be positive");
  if (!(t_final >= 0.0))
    throw std::invalid_argument("SolveConfig: t_final must be nonnegative");
  if (m_max < 1) throw std::invalid_argument("SolveConfig: m_max must be >= 1");
  if (!(tolerance > 0.0))
    throw std::invalid_argument("SolveConfig: tolerance must be positive");
  if (max_picard < 1)
    throw std::invalid_argument("SolveConfig: max_picard must be >= 1");
  fluid.validate();
}

SpectralVelocityField noise_slice(const NoiseRealization* noise, double t,
                                  int m_max) {
  if (m_max < 1) throw std::invalid_argument("noise_slice: m_max must be >= 1");
  if (noise == nullptr) return SpectralVelocityField::zero(m_max);
  return restrict_modes(fou_sample(*noise, t), m_max);
}

std::vector<SpectralVelocityField> noise_slices(
    const NoiseRealization* noise, const std::vector<double>& times,
    int m_max) {
  if (m_max < 1)
    throw std::invalid_argument("noise_slices: m_max must be >= 1");
  std::vector<SpectralVelocityField> out(times.size(),
                                         SpectralVelocityField::zero(m_max));
  if (noise == nullptr || times.empty()) return out;
  const double span = noise->span();
  const double hi_tol = 1e-9 * std::max(1.0, span);
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (j > 0 && !(times[j] >= times[j - 1]))
      throw std::invalid_argument("noise_slices: times must be ascending");
    const double tp = times[j] - noise->origin;
    if (!(tp >= 0.0 && tp <= span + hi_tol))
      throw std::invalid_argument("noise_slices: time outside realization");
  }
  const int mm = std::min(m_max, noise->truncation);
  parallel_chunks(std::size_t(mm) * std::size_t(mm), 64,
                  [&](std::size_t, std::size_t b, std::size_t e) {
                    for (std::size_t idx = b; idx < e; ++idx) {
                      const int m = int(idx) / mm + 1;
                      const int n = int(idx) % mm + 1;
                      const FbmPath& path = noise->path(m, n);
                      const double lam = eigenvalue({m, n});
                      for (std::size_t j = 0; j < times.size(); ++j) {
                        const double tp = std::min(times[j] - noise->origin,
                                                   span);
                        out[j].at(m, n) = mode_convolution(path, lam, tp);
                      }
                    }
                  });
  return out;
}

void step_v_equation(SolverState& state, double dt,
                     const SpectralVelocityField& z_next,
                     const SolveConfig& cfg, const CollocationContext& ctx) {
  if (!(dt > 0.0))
    throw std::invalid_argument("step_v_equation: dt must be positive");
  if (state.v.m_max != cfg.m_max || state.z_cache.m_max != cfg.m_max ||
      z_next.m_max != cfg.m_max || ctx.m_max() != cfg.m_max)
    throw std::invalid_argument("step_v_equation: m_max mismatch");

  SpectralVelocityField u = state.v;
  u.coeffs += state.z_cache.coeffs;
  const SpectralVelocityField f = load_field(u, cfg, ctx);

  SpectralVelocityField v_new = SpectralVelocityField::zero(cfg.m_max);
  for (int m = 1; m <= cfg.m_max; ++m)
    for (int n = 1; n <= cfg.m_max; ++n) {
      const double w = eigenvalue({m, n}) * dt;
      v_new.at(m, n) =
          std::exp(-w) * state.v.at(m, n) - dt * phi1(w) * f.at(m, n);
    }

  if (!v_new.coeffs.allFinite() ||
      v_new.coeffs.cwiseAbs().maxCoeff() > kBlowupCoeff) {
    int worst = 0;
    double mag = -1.0;
    for (int i = 0; i < v_new.coeffs.size(); ++i) {
      const double a = std::abs(v_new.coeffs[i]);
      if (std::isnan(a) || a > mag) {
        mag = a;
        worst = i;
        if (std::isnan(a)) break;
      }
    }
    const ModeIndex bad = mode_from_flat(worst, cfg.m_max);
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "step_v_equation: update aborted at t=%.9g (dt=%.3g): "
                  "|v|^2 was %.6g, new coefficient %.6g at mode (%d,%d)",
                  state.t, dt, state.v.coeffs.squaredNorm(),
                  v_new.coeffs[worst], bad.m, bad.n);
    throw std::runtime_error(buf);
  }

  state.energy = advance_energy(state.energy, dt, v_new);
  state.v = v_new;
  state.t += dt;
  state.z_cache = z_next;
}

PicardReport picard_local_solve(const SpectralVelocityField& u0,
                                const NoiseRealization* noise, double t_window,
                                const SolveConfig& cfg) {
  cfg.validate();
  if (!(t_window > 0.0))
    throw std::invalid_argument("picard_local_solve: t_window must be positive");
  if (u0.m_max != cfg.m_max)
    throw std::invalid_argument("picard_local_solve: u0 modes != cfg.m_max");
  require_noise_window(noise, t_window, "picard_local_solve");

  const CollocationContext ctx(cfg.m_max);
  const int nmodes = cfg.m_max * cfg.m_max;
  Eigen::ArrayXd lam(nmodes);
  for (int i = 0; i < nmodes; ++i)
    lam[i] = eigenvalue(mode_from_flat(i, cfg.m_max));

  PicardReport rep;
  double window = t_window;
  for (;;) {
    rep.window_history.push_back(window);
    const std::size_t cells = std::max<std::size_t>(
        1, std::size_t(std::llround(std::ceil(window / cfg.dt - 1e-9))));
    const double delta = window / double(cells);

    std::vector<double> knots(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) knots[k] = delta * double(k);
    std::vector<SpectralVelocityField> z = noise_slices(noise, knots, cfg.m_max);
    std::vector<SpectralVelocityField> phi(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) {
      phi[k] = semigroup_apply(u0, knots[k]);
      phi[k].coeffs += z[k].coeffs;
    }
    std::vector<SpectralVelocityField> u = phi;

    Eigen::ArrayXd ed = (-lam * delta).exp();
    Eigen::ArrayXd w0(nmodes), w1(nmodes);
    for (int i = 0; i < nmodes; ++i) {
      w0[i] = delta * cellw0(lam[i] * delta);
      w1[i] = delta * cellw1(lam[i] * delta);
    }

    const double ratio_floor =
        std::max(10.0 * cfg.tolerance, 1e-13 * (1.0 + xnorm_knots(phi, delta)));
    std::vector<double> dist;
    std::vector<SpectralVelocityField> un(cells + 1);
    std::vector<SpectralVelocityField> F(cells + 1);
    bool accepted = false, converged = false, shrink = false;
    int iters = 0;

    for (int it = 1; it <= cfg.max_picard; ++it) {
      for (std::size_t k = 0; k <= cells; ++k) F[k] = load_field(u[k], cfg, ctx);
      Eigen::ArrayXd J = Eigen::ArrayXd::Zero(nmodes);
      un[0] = phi[0];
      for (std::size_t k = 1; k <= cells; ++k) {
        J = ed * J + w0 * F[k - 1].coeffs.array() + w1 * F[k].coeffs.array();
        un[k] = phi[k];
        un[k].coeffs -= J.matrix();
      }
      const double d = xnorm_diff(un, u, delta, cfg.m_max);
      dist.push_back(d);
      iters = it;
      u.swap(un);
      if (!std::isfinite(d)) {
        shrink = true;
        break;
      }
      if (d <= cfg.tolerance) {
        accepted = true;
        converged = true;
        break;
      }
      // contraction is judged on d_{k+1}/d_k for k >= 2; the first gap may
      // be large because the start iterate is arbitrary
      const std::size_t j = dist.size() - 1;
      if (j >= 2 && dist[j - 1] > ratio_floor &&
          dist[j] > 0.5 * dist[j - 1] * (1.0 + 1e-12)) {
        shrink = true;
        break;
      }
    }

    if (!accepted && !shrink) {
      // iteration budget exhausted: accept only a measured geometric decay
      double worst = 0.0;
      for (std::size_t j = 2; j < dist.size(); ++j)
        if (dist[j - 1] > ratio_floor)
          worst = std::max(worst, dist[j] / dist[j - 1]);
      accepted = dist.size() >= 3 && worst <= 0.5;
      shrink = !accepted;
    }

    if (accepted) {
      rep.window = window;
      rep.iterations = iters;
      rep.converged = converged;
      rep.distances = std::move(dist);
      Trajectory traj;
      traj.times.resize(cells + 1);
      traj.v.resize(cells + 1);
      traj.z = std::move(z);
      traj.energy.resize(cells + 1);
      for (std::size_t k = 0; k <= cells; ++k) {
        traj.times[k] = delta * double(k);
        traj.v[k] = u[k];
        traj.v[k].coeffs -= traj.z[k].coeffs;
        traj.energy[k] = (k == 0)
                             ? energy_of(traj.v[k])
                             : advance_energy(traj.energy[k - 1], delta,
                                              traj.v[k]);
      }
      rep.u = std::move(traj);
      return rep;
    }

    if (window <= cfg.dt * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "picard_local_solve: no contraction at window = dt = " << cfg.dt
         << "; distances [" << join_history(dist) << "]; windows tried ["
         << join_history(rep.window_history) << "]";
      throw std::runtime_error(os.str());
    }
    window = std::max(window / 2.0, cfg.dt);
  }
}

GlobalReport global_solve(const SpectralVelocityField& u0,
                          const NoiseRealization* noise,
                          const SolveConfig& cfg) {
  cfg.validate();
  if (u0.m_max != cfg.m_max)
    throw std::invalid_argument("global_solve: u0 modes != cfg.m_max");
  require_noise_window(noise, cfg.t_final, "global_solve");

  const CollocationContext ctx(cfg.m_max);
  const std::size_t steps =
      cfg.t_final == 0.0
          ? 0
          : std::max<std::size_t>(
                1, std::size_t(std::llround(std::ceil(cfg.t_final / cfg.dt -
                                                      1e-9))));

  std::vector<double> knots(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k)
    knots[k] = std::min(double(k) * cfg.dt, cfg.t_final);
  const std::vector<SpectralVelocityField> slices =
      noise_slices(noise, knots, cfg.m_max);

  SolverState st;
  st.t = 0.0;
  st.z_cache = slices[0];
  st.v = u0;
  st.v.coeffs -= st.z_cache.coeffs;
  st.energy = energy_of(st.v);

  GlobalReport rep;
  Trajectory& traj = rep.traj;
  traj.times.reserve(steps + 1);
  traj.v.reserve(steps + 1);
  traj.z.reserve(steps + 1);
  traj.energy.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.v.push_back(st.v);
  traj.z.push_back(st.z_cache);
  traj.energy.push_back(st.energy);

  double zl2 = norm_l2(st.z_cache);
  double zh = norm_h01(st.z_cache);
  double zl2_sq = zl2 * zl2, zh_sq = zh * zh;
  rep.sup_v_l2_sq = st.energy.v_l2_sq;
  rep.sup_z_h01_sq = zh_sq;

  for (std::size_t k = 0; k < steps; ++k) {
    const double t_next = knots[k + 1];
    const double d = t_next - st.t;
    step_v_equation(st, d, slices[k + 1], cfg, ctx);
    st.t = t_next;  // pin against accumulated rounding in t

    const double nl2 = norm_l2(st.z_cache);
    const double nh = norm_h01(st.z_cache);
    const double nl2_sq = nl2 * nl2, nh_sq = nh * nh;
    rep.int_z_l2_sq += 0.5 * d * (zl2_sq + nl2_sq);
    rep.int_z_h01_sq += 0.5 * d * (zh_sq + nh_sq);
    zl2_sq = nl2_sq;
    zh_sq = nh_sq;
    rep.sup_v_l2_sq = std::max(rep.sup_v_l2_sq, st.energy.v_l2_sq);
    rep.sup_z_h01_sq = std::max(rep.sup_z_h01_sq, nh_sq);

    traj.times.push_back(st.t);
    traj.v.push_back(st.v);
    traj.z.push_back(st.z_cache);
    traj.energy.push_back(st.energy);
  }
  rep.int_v_v_sq = st.energy.dissipation;
  return rep;
}

double EnergyParams::g2(double z_l2_sq, double z_h01_sq) const {
  const double shear = mu0 * mu0 / (4.0 * r1 * std::pow(eps, alpha));
  return (C1 / C2) * z_l2_sq * z_h01_sq + C1 * C2 * z_h01_sq +
         shear * z_h01_sq;
}

EnergyReport energy_monitor(const Trajectory& traj, const EnergyParams& p) {
  if (traj.times.size() < 2)
    throw std::invalid_argument(
        "energy_monitor: trajectory needs at least two knots");
  if (traj.v.size() != traj.times.size() || traj.z.size() != traj.times.size())
    throw std::invalid_argument("energy_monitor: ragged trajectory");
  if (!(p.lambda1 > 0.0) || !(p.C1 >= 0.0) || !(p.C2 > 0.0) || !(p.r1 > 0.0) ||
      !(p.eps > 0.0))
    throw std::invalid_argument("energy_monitor: constants must be positive");

  EnergyReport rep;
  const std::size_t nstep = traj.times.size() - 1;
  rep.lhs.reserve(nstep);
  rep.rhs.reserve(nstep);
  rep.slack.reserve(nstep);
  rep.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nstep; ++k) {
    const double dt = traj.times[k + 1] - traj.times[k];
    if (!(dt > 0.0))
      throw std::invalid_argument("energy_monitor: times must increase");
    const double vk = norm_l2(traj.v[k]);
    const double vk1 = norm_l2(traj.v[k + 1]);
    const double vk_sq = vk * vk, vk1_sq = vk1 * vk1;
    const double zl2 = norm_l2(traj.z[k]);
    const double zh = norm_h01(traj.z[k]);
    const double zl2_sq = zl2 * zl2, zh_sq = zh * zh;
    const bool noise_free = zl2_sq == 0.0 && zh_sq == 0.0;
    const double kappa = noise_free
                             ? p.lambda1
                             : 0.5 * p.lambda1 - (p.C1 / p.C2) * zh_sq;
    const double g = p.g2(zl2_sq, zh_sq);
    const double lhs = (vk1_sq - vk_sq) / dt + kappa * vk_sq;
    const double slack =
        10.0 * dt * ((1.0 + p.lambda1) * (vk_sq + vk1_sq) + g + 1.0);
    const double excess = lhs - g - slack;
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(g);
    rep.slack.push_back(slack);
    if (excess > 0.0) rep.violations.push_back(k);
    rep.max_excess = std::max(rep.max_excess, excess);
  }
  rep.passed = rep.violations.empty();
  return rep;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.v.size() != traj.times.size() || traj.z.size() != traj.times.size())
    throw std::invalid_argument("write_trajectory_csv: ragged trajectory");
  os << "t,v2,vV2,u2,z2\n";
  char buf[200];
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double v2 = traj.v[k].coeffs.squaredNorm();
    const double vv = norm_v(traj.v[k]);
    const double u2 = (traj.v[k].coeffs + traj.z[k].coeffs).squaredNorm();
    const double z2 = traj.z[k].coeffs.squaredNorm();
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  traj.times[k], v2, vv * vv, u2, z2);
    os << buf;
  }
}

}  // namespace fbmlab
