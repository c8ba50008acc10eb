#include "fbmlab/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

#include "fbmlab/common.hpp"
#include "fbmlab/quadrature.hpp"

namespace fbmlab {

namespace {

constexpr double kXi0 = 1e-4;      // J-table starts here; series below
constexpr double kXiRatio = 1.02;  // geometric node ratio
constexpr double kXiTop = 1e8;     // asymptotic expansion beyond

bool is_half(double h) { return std::abs(h - 0.5) < 1e-12; }

void check_hurst(double h) {
  if (!(h > 0.0) || !(h <= 1.0))
    throw std::domain_error("hurst exponent must lie in (0, 1]");
}

void check_rough(double h) {
  check_hurst(h);
  if (h > 0.5 + 1e-12)
    throw std::domain_error(
        "kernel operations are implemented for h <= 1/2");
}

// ---------------------------------------------------------------------------
// FFT helper (plan cache; execution is thread-safe on distinct buffers)

std::mutex g_plan_mutex;
std::map<int, fftw_plan>& plan_map() {
  static std::map<int, fftw_plan> m;
  return m;
}

fftw_plan plan_for(int m) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto& plans = plan_map();
  auto it = plans.find(m);
  if (it != plans.end()) return it->second;
  std::vector<std::complex<double>> tmp(m);
  fftw_plan p = fftw_plan_dft_1d(
      m, reinterpret_cast<fftw_complex*>(tmp.data()),
      reinterpret_cast<fftw_complex*>(tmp.data()), FFTW_FORWARD,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (p == nullptr) throw std::runtime_error("fftw plan creation failed");
  plans.emplace(m, p);
  return p;
}

void fft_forward_inplace(std::vector<std::complex<double>>& buf) {
  fftw_plan p = plan_for(int(buf.size()));
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(buf.data()),
                   reinterpret_cast<fftw_complex*>(buf.data()));
}

}  // namespace

// ---------------------------------------------------------------------------

HurstParam::HurstParam(double value) : h(value) { check_hurst(value); }

double fbm_covariance(double t, double s, double h) {
  check_hurst(h);
  if (t < 0.0 || s < 0.0)
    throw std::domain_error("fbm_covariance: times must be nonnegative");
  const double hh = 2.0 * h;
  return 0.5 * (std::pow(t, hh) + std::pow(s, hh) -
                std::pow(std::abs(t - s), hh));
}

// ---------------------------------------------------------------------------
// FbmKernel

double FbmKernel::j_series(double xi) const {
  // J(1+xi) = -sum_{k>=1} binom(nu,k) xi^{nu+k} / (nu+k)
  double term = nu_;  // binom(nu,1)
  double sum = 0.0;
  for (int k = 1; k <= 12; ++k) {
    sum -= term * std::pow(xi, nu_ + k) / (nu_ + k);
    term *= (nu_ - k) / (k + 1.0);
  }
  return sum;
}

double FbmKernel::j_tail(double xi) const {
  // int_xi^inf r^{H-3/2} (1-(1+r)^{H-1/2}) dr, expanded for large xi
  const double h2 = 2.0 * h_;
  double tail = -std::pow(xi, nu_) / nu_;
  double binom = 1.0;  // binom(nu, j)
  for (int j = 0; j <= 3; ++j) {
    tail -= binom * std::pow(xi, h2 - 1.0 - j) / (1.0 + j - h2);
    binom *= (nu_ - j) / (j + 1.0);
  }
  return tail;
}

FbmKernel::FbmKernel(double h) {
  check_rough(h);
  h_ = h;
  nu_ = h - 0.5;
  degenerate_ = is_half(h);
  if (degenerate_) {
    c_ = 1.0;
    Jinf_ = 0.0;
    return;
  }
  // J table: geometric nodes xi_i = kXi0 * kXiRatio^i up to kXiTop
  lnxi0_ = std::log(kXi0);
  lnratio_ = std::log(kXiRatio);
  const int count =
      int(std::ceil(std::log(kXiTop / kXi0) / lnratio_)) + 1;
  jval_.resize(count + 1);
  jder_.resize(count + 1);
  auto g = [this](double r) { return 1.0 - std::pow(1.0 + r, nu_); };
  auto integrand = [&](double r) { return std::pow(r, h_ - 1.5) * g(r); };
  double xi_prev = kXi0;
  jval_[0] = j_series(kXi0);
  jder_[0] = std::pow(kXi0, nu_) * g(kXi0);
  for (int i = 1; i <= count; ++i) {
    const double xi = kXi0 * std::pow(kXiRatio, i);
    jval_[i] = jval_[i - 1] + quad::gl8(integrand, xi_prev, xi);
    jder_[i] = std::pow(xi, nu_) * g(xi);  // dJ/d ln(xi)
    xi_prev = xi;
  }
  ximax_ = xi_prev;
  // J(inf) = B(H+1/2, 1-2H); the cumulated table plus the expansion tail
  // must land on the same number, which bounds the table error globally.
  Jinf_ = std::exp(std::lgamma(h + 0.5) + std::lgamma(1.0 - 2.0 * h) -
                   std::lgamma(1.5 - h));
  if (std::abs(jval_[count] + j_tail(ximax_) - Jinf_) > 1e-7 * Jinf_)
    throw std::runtime_error("correction-integral table failed validation");
  // normalization: int_0^t K(t,s)^2 ds = t^{2H}; the closed form and the
  // quadrature calibration at t = 1 must agree.
  calib_ = 1.0 / std::sqrt(shape_variance_unit());
  c_ = cH_closed_form(h);
  if (std::abs(calib_ / c_ - 1.0) > 1e-4)
    throw std::runtime_error("kernel normalization failed validation");
}

double FbmKernel::J(double z) const {
  if (degenerate_) return 0.0;
  if (!(z >= 1.0)) throw std::domain_error("kernel ratio argument needs z >= 1");
  if (std::isinf(z)) return Jinf_;
  const double xi = z - 1.0;
  if (xi <= 0.0) return 0.0;
  if (xi < kXi0) return j_series(xi);
  if (xi >= ximax_) return Jinf_ - j_tail(xi);
  const double u = std::log(xi);
  int i = int((u - lnxi0_) / lnratio_);
  i = std::clamp(i, 0, int(jval_.size()) - 2);
  const double u0 = lnxi0_ + i * lnratio_;
  const double tau = (u - u0) / lnratio_;
  const double t2 = tau * tau, t3 = t2 * tau;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + tau;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * jval_[i] + h10 * lnratio_ * jder_[i] + h01 * jval_[i + 1] +
         h11 * lnratio_ * jder_[i + 1];
}

double FbmKernel::shapeK(double t, double s) const {
  return std::pow(t - s, nu_) + (0.5 - h_) * std::pow(s, nu_) * J(t / s);
}

double FbmKernel::K(double t, double s) const {
  if (!(s > 0.0) || !(t > s))
    throw std::domain_error("kernel requires 0 < s < t");
  if (degenerate_) return 1.0;
  return c_ * shapeK(t, s);
}

double FbmKernel::dKdt(double t, double s) const {
  if (!(s > 0.0) || !(t > s))
    throw std::domain_error("kernel requires 0 < s < t");
  if (degenerate_) return 0.0;
  return c_ * nu_ * std::pow(t - s, h_ - 1.5) * std::pow(s / t, 0.5 - h_);
}

double FbmKernel::shape_variance_unit() const {
  // int_0^1 [(1-s)^nu + (1/2-H) s^nu J(1/s)]^2 ds expanded into power-weight
  // pieces; each singular power is carried exactly by the weight.
  const double a = 0.5 - h_;
  const double direct = 1.0 / (2.0 * h_);
  auto Jof = [this](double s) { return J(1.0 / s); };
  // cross term: (1-s)^nu * s^nu * J(1/s)
  const double cross_l = quad::power_left(
      [&](double s) { return std::pow(1.0 - s, nu_) * Jof(s); }, 0.0, 0.5,
      nu_, -1.0, 0.98, 6);
  const double cross_r = quad::power_right(
      [&](double s) { return std::pow(s, nu_) * Jof(s); }, 0.5, 1.0, nu_,
      -1.0, 0.98, 6);
  // square term: s^{2nu} J(1/s)^2
  const double sq_l = quad::power_left(
      [&](double s) {
        const double j = Jof(s);
        return j * j;
      },
      0.0, 0.5, 2.0 * nu_, -1.0, 0.98, 6);
  auto sq_tail = [&](double s) {
    const double j = Jof(s);
    return std::pow(s, 2.0 * nu_) * j * j;
  };
  const double sq_r =
      quad::over_mesh(sq_tail, quad::graded_knots(0.5, 1.0, false, true, 0.8));
  return direct + 2.0 * a * (cross_l + cross_r) + a * a * (sq_l + sq_r);
}

double FbmKernel::variance_integral(double t) const {
  if (!(t > 0.0)) throw std::domain_error("variance integral needs t > 0");
  if (degenerate_) return t;
  const double a = 0.5 - h_;
  const double m = 0.5 * t;
  const double direct = std::pow(t, 2.0 * h_) / (2.0 * h_);
  auto Jof = [&](double s) { return J(t / s); };
  const double cross_l = quad::power_left(
      [&](double s) { return std::pow(t - s, nu_) * Jof(s); }, 0.0, m, nu_,
      -1.0, 0.98, 6);
  const double cross_r = quad::power_right(
      [&](double s) { return std::pow(s, nu_) * Jof(s); }, m, t, nu_, -1.0,
      0.98, 6);
  const double sq_l = quad::power_left(
      [&](double s) {
        const double j = Jof(s);
        return j * j;
      },
      0.0, m, 2.0 * nu_, -1.0, 0.98, 6);
  auto sq_tail = [&](double s) {
    const double j = Jof(s);
    return std::pow(s, 2.0 * nu_) * j * j;
  };
  const double sq_r =
      quad::over_mesh(sq_tail, quad::graded_knots(m, t, false, true, 0.8));
  return c_ * c_ *
         (direct + 2.0 * a * (cross_l + cross_r) + a * a * (sq_l + sq_r));
}

double FbmKernel::covariance_integral(double t, double s) const {
  if (!(s > 0.0) || !(t > 0.0))
    throw std::domain_error("covariance integral needs positive times");
  if (t < s) std::swap(t, s);
  if (degenerate_) return s;
  if (t == s) return variance_integral(t);
  const double a = 0.5 - h_;
  const double m = 0.5 * s;
  // K(t,r) K(s,r) expanded in the four singular-power combinations
  const double termA = quad::power_right(
      [&](double r) { return c_ * c_ * std::pow(t - r, nu_); }, 0.0, s, nu_,
      -1.0, 0.97, 4);
  const double termB_l = quad::power_left(
      [&](double r) {
        return c_ * c_ * a * std::pow(t - r, nu_) * J(s / r);
      },
      0.0, m, nu_, -1.0, 0.97, 4);
  auto termB_tail = [&](double r) {
    return c_ * std::pow(t - r, nu_) * c_ * a * std::pow(r, nu_) * J(s / r);
  };
  const double termB_r = quad::over_mesh(
      termB_tail, quad::graded_knots(m, s, false, true, 0.8));
  const double termC_l = quad::power_left(
      [&](double r) {
        return c_ * c_ * a * J(t / r) * std::pow(s - r, nu_);
      },
      0.0, m, nu_, -1.0, 0.97, 4);
  const double termC_r = quad::power_right(
      [&](double r) { return c_ * c_ * a * std::pow(r, nu_) * J(t / r); }, m,
      s, nu_, -1.0, 0.97, 4);
  const double termD_l = quad::power_left(
      [&](double r) { return c_ * c_ * a * a * J(t / r) * J(s / r); }, 0.0, m,
      2.0 * nu_, -1.0, 0.97, 4);
  auto termD_tail = [&](double r) {
    return c_ * c_ * a * a * std::pow(r, 2.0 * nu_) * J(t / r) * J(s / r);
  };
  const double termD_r = quad::over_mesh(
      termD_tail, quad::graded_knots(m, s, false, true, 0.8));
  return termA + termB_l + termB_r + termC_l + termC_r + termD_l + termD_r;
}

double FbmKernel::cH_closed_form(double h) {
  check_rough(h);
  if (is_half(h)) return 1.0;
  const double lnB = std::lgamma(1.0 - 2.0 * h) + std::lgamma(h + 0.5) -
                     std::lgamma(1.5 - h);
  return std::sqrt(2.0 * h / ((1.0 - 2.0 * h) * std::exp(lnB)));
}

std::shared_ptr<const FbmKernel> kernel_for(double h) {
  static std::mutex mutex;
  static std::map<long long, std::shared_ptr<const FbmKernel>> cache;
  long long bits;
  static_assert(sizeof(bits) == sizeof(h));
  std::memcpy(&bits, &h, sizeof(bits));
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(bits);
  if (it != cache.end()) return it->second;
  auto k = std::make_shared<const FbmKernel>(h);
  cache.emplace(bits, k);
  return k;
}

double kernel_KH(double t, double s, double h) { return kernel_for(h)->K(t, s); }

double kernel_dKdt(double t, double s, double h) {
  return kernel_for(h)->dKdt(t, s);
}

// ---------------------------------------------------------------------------
// K* on sampled functions

namespace {

void check_uniform_grid(const std::vector<double>& grid, double& dt) {
  if (grid.size() < 3) throw std::invalid_argument("grid too short");
  if (std::abs(grid.front()) > 1e-12)
    throw std::invalid_argument("grid must start at 0");
  dt = grid[1] - grid[0];
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (std::abs(grid[i + 1] - grid[i] - dt) > 1e-9 * dt)
      throw std::invalid_argument("operation requires a uniform grid");
  }
}

}  // namespace

SampledFunction kstar_apply(const SampledFunction& phi, double t, double h) {
  check_rough(h);
  if (phi.grid.size() != phi.values.size())
    throw std::invalid_argument("sampled function: grid/value size mismatch");
  double dt = 0.0;
  check_uniform_grid(phi.grid, dt);
  if (std::abs(phi.grid.back() - t) > 1e-9 * std::max(1.0, t))
    throw std::invalid_argument("kstar_apply: grid must end at t");
  const int n = int(phi.grid.size()) - 1;
  SampledFunction out;
  out.grid = phi.grid;
  out.values.assign(n + 1, 0.0);
  if (is_half(h)) {  // K == 1, dK == 0
    out.values = phi.values;
    out.values[0] = 0.0;
    return out;
  }
  auto kern = kernel_for(h);
  const double nu = h - 0.5;
  const double q = 0.5 - h;
  // offset powers (k*dt)^{H -/+ 1/2} reused by every cell
  std::vector<double> p_lo(n + 1), p_hi(n + 1), lns(n + 1);
  for (int k = 1; k <= n; ++k) {
    p_lo[k] = std::pow(k * dt, h - 0.5);
    p_hi[k] = std::pow(k * dt, h + 0.5);
    lns[k] = std::log(phi.grid[k]);
  }
  const double pref = kern->cH() * nu;  // dK/dr prefactor (negative)
  for (int i = 1; i < n; ++i) {
    const double si = phi.grid[i];
    const double fi = phi.values[i];
    // first cell: the difference vanishes at r = s, keep the linear moment
    double gnext = (phi.values[i + 1] - fi) * std::exp(q * (lns[i] - lns[i + 1]));
    double acc = gnext * p_lo[1] / (h + 0.5);
    double gprev = gnext;
    for (int j = i + 1; j < n; ++j) {
      gnext = (phi.values[j + 1] - fi) * std::exp(q * (lns[i] - lns[j + 1]));
      const int k0 = j - i, k1 = k0 + 1;
      const double I0 = (p_lo[k1] - p_lo[k0]) / (h - 0.5);
      const double I1 = (p_hi[k1] - p_hi[k0]) / (h + 0.5);
      acc += gprev * I0 + (gnext - gprev) / dt * (I1 - (k0 * dt) * I0);
      gprev = gnext;
    }
    out.values[i] = kern->K(t, si) * fi + pref * acc;
  }
  return out;
}

double kstar_l2_norm_sq(const SampledFunction& kphi, double h) {
  check_rough(h);
  double dt = 0.0;
  check_uniform_grid(kphi.grid, dt);
  const int n = int(kphi.grid.size()) - 1;
  const double t = kphi.grid.back();
  if (is_half(h)) {  // plain trapezoid; the image is just phi
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = kphi.values[i], b = kphi.values[i + 1];
      s += 0.5 * dt * (a * a + b * b);
    }
    return s;
  }
  const double p = 2.0 * h - 1.0;  // both endpoint profiles are s^{2H-1}
  const int half = n / 2;
  double total = 0.0;
  // [0, t/2]: weight s^{2H-1}, shape |V|^2 s^{1-2H} sampled at nodes
  {
    auto shape = [&](int i) {
      const double v = kphi.values[i];
      return v * v * std::pow(kphi.grid[i], -p);
    };
    const double g1 = shape(1);
    total += g1 * std::pow(kphi.grid[1], p + 1.0) / (p + 1.0);  // first cell
    for (int i = 1; i < half; ++i)
      total += quad::detail::power_cell(kphi.grid[i], kphi.grid[i + 1], p,
                                        shape(i), shape(i + 1));
  }
  // [t/2, t]: weight (t-s)^{2H-1}; extend the last sampled shape value to t
  {
    auto shape = [&](int i) {
      const double v = kphi.values[i];
      return v * v * std::pow(t - kphi.grid[i], -p);
    };
    for (int i = half; i < n - 1; ++i)
      total += quad::detail::power_cell(t - kphi.grid[i + 1],
                                        t - kphi.grid[i], p, shape(i + 1),
                                        shape(i));
    const double gl = shape(n - 1);
    total += gl * std::pow(dt, p + 1.0) / (p + 1.0);  // last cell, constant
  }
  return total;
}

// ---------------------------------------------------------------------------
// FbmSampler

FbmSampler::FbmSampler(std::vector<double> times, double h)
    : times_(std::move(times)), h_(h) {
  check_hurst(h);
  if (times_.size() < 2)
    throw std::invalid_argument("sampler needs at least two grid points");
  if (std::abs(times_.front()) > 1e-12)
    throw std::invalid_argument("path grid must start at 0");
  times_.front() = 0.0;
  for (std::size_t i = 0; i + 1 < times_.size(); ++i)
    if (!(times_[i + 1] > times_[i]))
      throw std::invalid_argument("path grid must be strictly increasing");
  n_ = int(times_.size()) - 1;
  dt_ = times_[1] - times_[0];
  bool uniform = true;
  for (int i = 0; i < n_; ++i)
    if (std::abs(times_[i + 1] - times_[i] - dt_) > 1e-9 * dt_) {
      uniform = false;
      break;
    }
  if (!uniform || n_ < 2) {
    dense_ = true;
    prepare_dense();
    return;
  }
  // circulant embedding of the increment covariance
  const int m = 2 * n_;
  const double hh = 2.0 * h_;
  const double scale = 0.5 * std::pow(dt_, hh);
  std::vector<std::complex<double>> buf(m);
  auto gamma = [&](int k) {
    return scale * (std::pow(std::abs(k + 1.0), hh) -
                    2.0 * std::pow(std::abs(double(k)), hh) +
                    std::pow(std::abs(k - 1.0), hh));
  };
  for (int k = 0; k <= n_; ++k) buf[k] = gamma(k);
  for (int k = 1; k < n_; ++k) buf[m - k] = buf[k];
  fft_forward_inplace(buf);
  double emin = buf[0].real(), emax = emin;
  for (int k = 0; k < m; ++k) {
    emin = std::min(emin, buf[k].real());
    emax = std::max(emax, buf[k].real());
  }
  min_eigen_ratio_ = emin / std::max(emax, 1e-300);
  if (emin < -1e-12 * emax) {
    // embedding failed (does not happen for h <= 1/2); dense route instead
    dense_ = true;
    prepare_dense();
    return;
  }
  amp_.assign(n_ + 1, 0.0);
  amp_[0] = std::sqrt(std::max(buf[0].real(), 0.0) / m);
  amp_[n_] = std::sqrt(std::max(buf[n_].real(), 0.0) / m);
  for (int k = 1; k < n_; ++k)
    amp_[k] = std::sqrt(std::max(buf[k].real(), 0.0) / (2.0 * m));
}

void FbmSampler::prepare_dense() {
  const int n = n_;
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = fbm_covariance(times_[i + 1], times_[j + 1], h_);
      gram(i, j) = v;
      gram(j, i) = v;
    }
  double bump = 0.0;
  const double scale = gram.diagonal().maxCoeff();
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(
        gram + bump * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      chol_ = llt.matrixL();
      if (bump > 0.0) min_eigen_ratio_ = -bump / scale;
      return;
    }
    bump = (bump == 0.0) ? 1e-14 * scale : bump * 16.0;
  }
  throw std::runtime_error("covariance factorization failed");
}

const Eigen::MatrixXd& FbmSampler::dense_factor() const {
  if (!dense_) throw std::logic_error("dense factor only on the dense route");
  return chol_;
}

FbmPath FbmSampler::sample(std::uint64_t seed) const {
  FbmPath path;
  path.times = times_;
  path.hurst = h_;
  path.seed = seed;
  path.values.assign(n_ + 1, 0.0);
  GaussianStream gs(seed);
  if (dense_) {
    Eigen::VectorXd g(n_);
    for (int i = 0; i < n_; ++i) g[i] = gs.gaussian();
    Eigen::VectorXd v = chol_ * g;
    for (int i = 0; i < n_; ++i) path.values[i + 1] = v[i];
    return path;
  }
  const int m = 2 * n_;
  std::vector<std::complex<double>> buf(m);
  buf[0] = amp_[0] * gs.gaussian();
  for (int k = 1; k < n_; ++k) {
    const double a = gs.gaussian();
    const double b = gs.gaussian();
    buf[k] = std::complex<double>(amp_[k] * a, amp_[k] * b);
    buf[m - k] = std::conj(buf[k]);
  }
  buf[n_] = amp_[n_] * gs.gaussian();
  fft_forward_inplace(buf);
  double acc = 0.0;
  for (int j = 0; j < n_; ++j) {
    acc += buf[j].real();
    path.values[j + 1] = acc;
  }
  return path;
}

FbmPath sample_fbm(const std::vector<double>& times, double h,
                   std::uint64_t seed) {
  return FbmSampler(times, h).sample(seed);
}

// ---------------------------------------------------------------------------
// Pathwise Wiener-type integrals

std::vector<double> wiener_weight_vector(const SmoothFn& phi,
                                         const std::vector<double>& times) {
  if (times.size() < 2 || std::abs(times.front()) > 1e-12)
    throw std::invalid_argument("weight vector needs a grid starting at 0");
  const int n = int(times.size()) - 1;
  std::vector<double> w(n + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    const double a = times[k], b = times[k + 1];
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    for (int g = 0; g < 4; ++g) {
      const double r = c + hw * quad::kGL4X[g];
      const double wg = quad::kGL4W[g] * hw * phi.df(r);
      const double theta = (r - a) / (b - a);
      w[k] -= wg * (1.0 - theta);  // minus: integral enters by parts negated
      w[k + 1] -= wg * theta;
    }
  }
  w[n] += phi.f(times.back());
  return w;
}

double apply_weight_vector(const std::vector<double>& w, const FbmPath& path) {
  if (w.size() != path.values.size())
    throw std::invalid_argument("weight vector does not match path grid");
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * path.values[i];
  return s;
}

double wiener_integral_pathwise(const SmoothFn& phi, const FbmPath& path) {
  return apply_weight_vector(wiener_weight_vector(phi, path.times), path);
}

double wiener_integral_step(const std::vector<double>& knots,
                            const std::vector<double>& levels,
                            const FbmPath& path) {
  if (knots.size() != levels.size() + 1)
    throw std::invalid_argument("step integrand needs one more knot than level");
  auto locate = [&](double t) {
    const double tol = 1e-9 * std::max(1.0, std::abs(path.times.back()));
    auto it = std::lower_bound(path.times.begin(), path.times.end(), t - tol);
    if (it == path.times.end() || std::abs(*it - t) > tol)
      throw std::invalid_argument("step knot does not lie on the path grid");
    return std::size_t(it - path.times.begin());
  };
  double s = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::size_t a = locate(knots[i]);
    const std::size_t b = locate(knots[i + 1]);
    s += levels[i] * (path.values[b] - path.values[a]);
  }
  return s;
}

}  // namespace fbmlab
