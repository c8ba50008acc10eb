#include "fbmlab/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace fbmlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_mode(ModeIndex mode) {
  if (mode.m < 1 || mode.n < 1)
    throw std::domain_error("mode indices start at 1");
}

void check_field(const SpectralVelocityField& u) {
  if (u.m_max < 1 || u.coeffs.size() !=
                         static_cast<Eigen::Index>(u.m_max) * u.m_max)
    throw std::invalid_argument("velocity field has inconsistent shape");
}

}  // namespace

double eigenvalue(ModeIndex mode) {
  check_mode(mode);
  const double lt = static_cast<double>(mode.m) * mode.m +
                    static_cast<double>(mode.n) * mode.n;
  return lt * lt;
}

double laplace_eigenvalue(ModeIndex mode) {
  check_mode(mode);
  return static_cast<double>(mode.m) * mode.m +
         static_cast<double>(mode.n) * mode.n;
}

SpectralVelocityField SpectralVelocityField::zero(int m_max) {
  if (m_max < 1) throw std::invalid_argument("m_max must be positive");
  SpectralVelocityField u;
  u.m_max = m_max;
  u.coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_max) * m_max);
  return u;
}

double& SpectralVelocityField::at(int m, int n) {
  return coeffs[mode_flat({m, n}, m_max)];
}

double SpectralVelocityField::at(int m, int n) const {
  return coeffs[mode_flat({m, n}, m_max)];
}

int mode_flat(ModeIndex mode, int m_max) {
  check_mode(mode);
  if (mode.m > m_max || mode.n > m_max)
    throw std::domain_error("mode outside truncation");
  return (mode.m - 1) * m_max + (mode.n - 1);
}

ModeIndex mode_from_flat(int flat, int m_max) {
  if (flat < 0 || flat >= m_max * m_max)
    throw std::domain_error("flat index outside truncation");
  return {flat / m_max + 1, flat % m_max + 1};
}

SpectralVelocityField semigroup_apply(const SpectralVelocityField& u,
                                      double t) {
  check_field(u);
  if (!(t >= 0.0)) throw std::domain_error("semigroup needs t >= 0");
  SpectralVelocityField out = u;
  for (int m = 1; m <= u.m_max; ++m)
    for (int n = 1; n <= u.m_max; ++n)
      out.at(m, n) *= std::exp(-eigenvalue({m, n}) * t);
  return out;
}

SpectralVelocityField frac_power_apply(const SpectralVelocityField& u,
                                       double alpha) {
  check_field(u);
  SpectralVelocityField out = u;
  for (int m = 1; m <= u.m_max; ++m)
    for (int n = 1; n <= u.m_max; ++n)
      out.at(m, n) *= std::pow(eigenvalue({m, n}), alpha);
  return out;
}

double norm_l2(const SpectralVelocityField& u) {
  check_field(u);
  return u.coeffs.norm();
}

double norm_F(const SpectralVelocityField& u, double alpha) {
  check_field(u);
  double acc = 0.0;
  for (int m = 1; m <= u.m_max; ++m)
    for (int n = 1; n <= u.m_max; ++n) {
      const double c = u.at(m, n);
      acc += std::pow(eigenvalue({m, n}), 2.0 * alpha) * c * c;
    }
  return std::sqrt(acc);
}

double norm_v(const SpectralVelocityField& u) { return norm_F(u, 0.5); }

double norm_h01(const SpectralVelocityField& u) { return norm_F(u, 0.25); }

// ---------------------------------------------------------------------------

CollocationContext::CollocationContext(int m_max) : m_(m_max), p_(2 * m_max) {
  if (m_max < 1) throw std::invalid_argument("m_max must be positive");
  const int np = p_ + 1;
  x_.resize(np);
  w_.resize(np);
  const double h = kPi / p_;
  for (int i = 0; i < np; ++i) {
    x_[i] = i * h;
    w_[i] = (i == 0 || i == p_) ? 0.5 * h : h;
  }
  sin_.resize(np, m_);
  cos_.resize(np, m_);
  for (int i = 0; i < np; ++i)
    for (int k = 1; k <= m_; ++k) {
      sin_(i, k - 1) = std::sin(k * x_[i]);
      cos_(i, k - 1) = std::cos(k * x_[i]);
    }
}

Eigen::MatrixXd CollocationContext::coeff_matrix(
    const SpectralVelocityField& u) const {
  check_field(u);
  if (u.m_max != m_)
    throw std::invalid_argument("field truncation does not match context");
  Eigen::MatrixXd c(m_, m_);
  for (int m = 1; m <= m_; ++m)
    for (int n = 1; n <= m_; ++n) c(m - 1, n - 1) = u.at(m, n);
  return c;
}

void CollocationContext::velocity_grids(const SpectralVelocityField& u,
                                        Eigen::MatrixXd& u1,
                                        Eigen::MatrixXd& u2) const {
  const Eigen::MatrixXd c = coeff_matrix(u);
  Eigen::MatrixXd a1(m_, m_), a2(m_, m_);
  for (int m = 1; m <= m_; ++m)
    for (int n = 1; n <= m_; ++n) {
      const double s = 2.0 / (kPi * std::sqrt(laplace_eigenvalue({m, n})));
      a1(m - 1, n - 1) = c(m - 1, n - 1) * s * n;
      a2(m - 1, n - 1) = -c(m - 1, n - 1) * s * m;
    }
  u1 = sin_ * a1 * cos_.transpose();
  u2 = cos_ * a2 * sin_.transpose();
}

void CollocationContext::gradient_grids(const SpectralVelocityField& u,
                                        Eigen::MatrixXd& d1u1,
                                        Eigen::MatrixXd& d2u1,
                                        Eigen::MatrixXd& d1u2,
                                        Eigen::MatrixXd& d2u2) const {
  const Eigen::MatrixXd c = coeff_matrix(u);
  Eigen::MatrixXd a1(m_, m_), a2(m_, m_);
  for (int m = 1; m <= m_; ++m)
    for (int n = 1; n <= m_; ++n) {
      const double s = 2.0 / (kPi * std::sqrt(laplace_eigenvalue({m, n})));
      a1(m - 1, n - 1) = c(m - 1, n - 1) * s * n;
      a2(m - 1, n - 1) = -c(m - 1, n - 1) * s * m;
    }
  Eigen::MatrixXd t(m_, m_);
  for (int m = 1; m <= m_; ++m)
    for (int n = 1; n <= m_; ++n) t(m - 1, n - 1) = a1(m - 1, n - 1) * m;
  d1u1 = cos_ * t * cos_.transpose();
  for (int m = 1; m <= m_; ++m)
    for (int n = 1; n <= m_; ++n) t(m - 1, n - 1) = -a1(m - 1, n - 1) * n;
  d2u1 = sin_ * t * sin_.transpose();
  for (int m = 1; m <= m_; ++m)
    for (int n = 1; n <= m_; ++n) t(m - 1, n - 1) = -a2(m - 1, n - 1) * m;
  d1u2 = sin_ * t * sin_.transpose();
  for (int m = 1; m <= m_; ++m)
    for (int n = 1; n <= m_; ++n) t(m - 1, n - 1) = a2(m - 1, n - 1) * n;
  d2u2 = cos_ * t * cos_.transpose();
}

double CollocationContext::inner(const Eigen::MatrixXd& f,
                                 const Eigen::MatrixXd& g) const {
  return (w_.transpose() * f.cwiseProduct(g) * w_).value();
}

Eigen::MatrixXd CollocationContext::weighted(const Eigen::MatrixXd& f) const {
  return w_.asDiagonal() * f * w_.asDiagonal();
}

Eigen::MatrixXd CollocationContext::project_sc(const Eigen::MatrixXd& f) const {
  return sin_.transpose() * weighted(f) * cos_;
}

Eigen::MatrixXd CollocationContext::project_cs(const Eigen::MatrixXd& f) const {
  return cos_.transpose() * weighted(f) * sin_;
}

Eigen::MatrixXd CollocationContext::project_cc(const Eigen::MatrixXd& f) const {
  return cos_.transpose() * weighted(f) * cos_;
}

Eigen::MatrixXd CollocationContext::project_ss(const Eigen::MatrixXd& f) const {
  return sin_.transpose() * weighted(f) * sin_;
}

// ---------------------------------------------------------------------------

TrigScalar TrigScalar::zero(int q) {
  if (q < 1) throw std::invalid_argument("block order must be positive");
  TrigScalar s;
  s.q = q;
  s.ss = Eigen::MatrixXd::Zero(q + 1, q + 1);
  s.sc = s.ss;
  s.cs = s.ss;
  s.cc = s.ss;
  return s;
}

TrigVectorField gradient_of(const TrigScalar& q) {
  TrigVectorField g;
  g.f1 = TrigScalar::zero(q.q);
  g.f2 = TrigScalar::zero(q.q);
  for (int a = 0; a <= q.q; ++a)
    for (int b = 0; b <= q.q; ++b) {
      // d/dx1: sin(a x1) -> a cos(a x1), cos(a x1) -> -a sin(a x1)
      g.f1.cs(a, b) += a * q.ss(a, b);
      g.f1.cc(a, b) += a * q.sc(a, b);
      g.f1.ss(a, b) += -a * q.cs(a, b);
      g.f1.sc(a, b) += -a * q.cc(a, b);
      // d/dx2 acts on the second-axis factor the same way
      g.f2.sc(a, b) += b * q.ss(a, b);
      g.f2.ss(a, b) += -b * q.sc(a, b);
      g.f2.cc(a, b) += b * q.cs(a, b);
      g.f2.cs(a, b) += -b * q.cc(a, b);
    }
  return g;
}

TrigVectorField mixed_from_velocity(const SpectralVelocityField& u) {
  check_field(u);
  TrigVectorField f;
  f.f1 = TrigScalar::zero(u.m_max);
  f.f2 = TrigScalar::zero(u.m_max);
  for (int m = 1; m <= u.m_max; ++m)
    for (int n = 1; n <= u.m_max; ++n) {
      const double s =
          2.0 / (kPi * std::sqrt(laplace_eigenvalue({m, n}))) * u.at(m, n);
      f.f1.sc(m, n) += s * n;
      f.f2.cs(m, n) += -s * m;
    }
  return f;
}

SpectralVelocityField project_divergence_free(const TrigVectorField& f,
                                              int m_max) {
  if (f.f1.q != f.f2.q)
    throw std::invalid_argument("vector components disagree on block order");
  SpectralVelocityField out = SpectralVelocityField::zero(m_max);
  const int top = std::min(f.f1.q, m_max);
  // vorticity w = d1 f2 - d2 f1; only its pure-sine block survives the
  // projection, and a gradient input cancels out of that block identically
  for (int a = 1; a <= top; ++a)
    for (int b = 1; b <= top; ++b) {
      const double wss = b * f.f1.sc(a, b) - a * f.f2.cs(a, b);
      out.at(a, b) =
          wss * kPi / (2.0 * std::sqrt(laplace_eigenvalue({a, b})));
    }
  return out;
}

}  // namespace fbmlab
