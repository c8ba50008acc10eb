#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "fbmlab/common.hpp"
#include "fbmlab/spectral.hpp"
#include "oracles.hpp"

using namespace fbmlab;

namespace {

SpectralVelocityField random_field(int m_max, std::uint64_t seed,
                                   double scale = 1.0) {
  GaussianStream g(seed);
  SpectralVelocityField u = SpectralVelocityField::zero(m_max);
  for (int i = 0; i < u.coeffs.size(); ++i) u.coeffs[i] = scale * g.gaussian();
  return u;
}

TrigScalar random_scalar(int q, std::uint64_t seed) {
  GaussianStream g(seed);
  TrigScalar s = TrigScalar::zero(q);
  for (int a = 0; a <= q; ++a)
    for (int b = 0; b <= q; ++b) {
      if (a >= 1 && b >= 1) s.ss(a, b) = g.gaussian();
      if (a >= 1) s.sc(a, b) = g.gaussian();
      if (b >= 1) s.cs(a, b) = g.gaussian();
      s.cc(a, b) = g.gaussian();
    }
  return s;
}

}  // namespace

TEST_CASE("mode lattice and eigenvalues") {
  CHECK(eigenvalue({1, 1}) == doctest::Approx(oracle::eigenvalue_11).epsilon(1e-15));
  CHECK(eigenvalue({1, 2}) == doctest::Approx(oracle::eigenvalue_12).epsilon(1e-15));
  CHECK(eigenvalue({2, 1}) == doctest::Approx(oracle::eigenvalue_12).epsilon(1e-15));
  CHECK(eigenvalue({2, 2}) == 64.0);
  CHECK(laplace_eigenvalue({1, 1}) == 2.0);
  CHECK(laplace_eigenvalue({3, 2}) == 13.0);
  CHECK_THROWS_AS(eigenvalue({0, 1}), std::domain_error);
  CHECK_THROWS_AS(eigenvalue({1, -1}), std::domain_error);

  const int m_max = 5;
  for (int flat = 0; flat < m_max * m_max; ++flat) {
    const ModeIndex mode = mode_from_flat(flat, m_max);
    CHECK(mode_flat(mode, m_max) == flat);
  }
  CHECK_THROWS_AS(mode_flat({6, 1}, 5), std::domain_error);
  CHECK_THROWS_AS(mode_from_flat(25, 5), std::domain_error);
}

TEST_CASE("basis orthonormality under collocation quadrature up to M=16") {
  const int m_max = 16;
  CollocationContext ctx(m_max);
  const int nmodes = m_max * m_max;
  const int ng = (ctx.p() + 1) * (ctx.p() + 1);

  Eigen::MatrixXd u1s(nmodes, ng), u2s(nmodes, ng);
  Eigen::VectorXd wflat(ng);
  for (int i = 0; i <= ctx.p(); ++i)
    for (int j = 0; j <= ctx.p(); ++j)
      wflat[i * (ctx.p() + 1) + j] = ctx.weights()[i] * ctx.weights()[j];

  for (int flat = 0; flat < nmodes; ++flat) {
    SpectralVelocityField e = SpectralVelocityField::zero(m_max);
    e.coeffs[flat] = 1.0;
    Eigen::MatrixXd u1, u2;
    ctx.velocity_grids(e, u1, u2);
    u1s.row(flat) = Eigen::Map<Eigen::VectorXd>(u1.data(), ng);
    u2s.row(flat) = Eigen::Map<Eigen::VectorXd>(u2.data(), ng);
  }
  const Eigen::MatrixXd gram = u1s * wflat.asDiagonal() * u1s.transpose() +
                               u2s * wflat.asDiagonal() * u2s.transpose();
  const double dev =
      (gram - Eigen::MatrixXd::Identity(nmodes, nmodes)).cwiseAbs().maxCoeff();
  CHECK(dev < 1e-10);
}

TEST_CASE("Parseval identities on the collocation grid") {
  const int m_max = 8;
  CollocationContext ctx(m_max);
  const SpectralVelocityField u = random_field(m_max, 97531);

  Eigen::MatrixXd u1, u2;
  ctx.velocity_grids(u, u1, u2);
  const double l2_grid = ctx.inner(u1, u1) + ctx.inner(u2, u2);
  CHECK(std::abs(l2_grid - norm_l2(u) * norm_l2(u)) < 1e-10);

  Eigen::MatrixXd d1u1, d2u1, d1u2, d2u2;
  ctx.gradient_grids(u, d1u1, d2u1, d1u2, d2u2);
  const double h1_grid = ctx.inner(d1u1, d1u1) + ctx.inner(d2u1, d2u1) +
                         ctx.inner(d1u2, d1u2) + ctx.inner(d2u2, d2u2);
  const double h1_coeff = norm_h01(u) * norm_h01(u);
  CHECK(std::abs(h1_grid - h1_coeff) < 1e-10 * h1_coeff);

  // pointwise incompressibility on the grid
  CHECK((d1u1 + d2u2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("grid synthesis matches the closed component formulas") {
  const int m_max = 4;
  CollocationContext ctx(m_max);
  SpectralVelocityField e = SpectralVelocityField::zero(m_max);
  const int m = 3, n = 2;
  e.at(m, n) = 1.0;
  Eigen::MatrixXd u1, u2;
  ctx.velocity_grids(e, u1, u2);
  const double lt = laplace_eigenvalue({m, n});
  const double pi = 3.14159265358979323846;
  for (int i : {1, 3, 5})
    for (int j : {2, 4, 7}) {
      const double x1 = ctx.nodes()[i], x2 = ctx.nodes()[j];
      const double v1 =
          2.0 * n / (pi * std::sqrt(lt)) * std::sin(m * x1) * std::cos(n * x2);
      const double v2 =
          -2.0 * m / (pi * std::sqrt(lt)) * std::cos(m * x1) * std::sin(n * x2);
      CHECK(std::abs(u1(i, j) - v1) < 1e-14);
      CHECK(std::abs(u2(i, j) - v2) < 1e-14);
    }
}

TEST_CASE("semigroup properties") {
  const int m_max = 6;
  const SpectralVelocityField u = random_field(m_max, 2468);

  CHECK_THROWS_AS(semigroup_apply(u, -0.1), std::domain_error);

  const SpectralVelocityField id = semigroup_apply(u, 0.0);
  CHECK((id.coeffs - u.coeffs).cwiseAbs().maxCoeff() == 0.0);

  const SpectralVelocityField ab =
      semigroup_apply(semigroup_apply(u, 0.3), 0.45);
  const SpectralVelocityField once = semigroup_apply(u, 0.75);
  CHECK((ab.coeffs - once.coeffs).cwiseAbs().maxCoeff() <
        1e-14 * u.coeffs.cwiseAbs().maxCoeff());

  for (double t : {0.01, 0.1, 0.5, 2.0}) {
    const double decay = norm_l2(semigroup_apply(u, t));
    CHECK(decay <= std::exp(-4.0 * t) * norm_l2(u) * (1.0 + 1e-14));
  }
}

TEST_CASE("fractional powers") {
  const int m_max = 6;
  const SpectralVelocityField u = random_field(m_max, 1357);

  const SpectralVelocityField id = frac_power_apply(u, 0.0);
  CHECK((id.coeffs - u.coeffs).cwiseAbs().maxCoeff() == 0.0);

  SpectralVelocityField e = SpectralVelocityField::zero(m_max);
  e.at(1, 1) = 1.0;
  CHECK(frac_power_apply(e, 0.5).at(1, 1) == doctest::Approx(2.0).epsilon(1e-15));

  const SpectralVelocityField round =
      frac_power_apply(frac_power_apply(u, 0.5), -0.5);
  CHECK((round.coeffs - u.coeffs).cwiseAbs().maxCoeff() <
        1e-14 * u.coeffs.cwiseAbs().maxCoeff());

  // |A^{1/4} u| matches the quadratic-form route through the mode sums
  double acc = 0.0;
  for (int m = 1; m <= m_max; ++m)
    for (int n = 1; n <= m_max; ++n)
      acc += laplace_eigenvalue({m, n}) * u.at(m, n) * u.at(m, n);
  CHECK(norm_h01(u) == doctest::Approx(std::sqrt(acc)).epsilon(1e-14));
}

TEST_CASE("divergence-free projection reproduces resolved velocity fields") {
  const int m_max = 7;
  const SpectralVelocityField u = random_field(m_max, 86420);
  const SpectralVelocityField back =
      project_divergence_free(mixed_from_velocity(u), m_max);
  CHECK((back.coeffs - u.coeffs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("divergence-free projection annihilates gradients") {
  const int q = 9;
  const TrigScalar s = random_scalar(q, 111213);
  const SpectralVelocityField out =
      project_divergence_free(gradient_of(s), 7);
  CHECK(out.coeffs.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("divergence-free projection is idempotent and linear") {
  const int m_max = 6;
  GaussianStream g(424242);
  TrigVectorField f;
  f.f1 = random_scalar(m_max + 3, 31);
  f.f2 = random_scalar(m_max + 3, 32);

  const SpectralVelocityField once = project_divergence_free(f, m_max);
  const SpectralVelocityField twice =
      project_divergence_free(mixed_from_velocity(once), m_max);
  CHECK((twice.coeffs - once.coeffs).cwiseAbs().maxCoeff() < 1e-12);

  // adding a gradient leaves the projection unchanged
  const TrigVectorField grad = gradient_of(random_scalar(m_max + 3, 33));
  TrigVectorField sum = f;
  sum.f1.ss += grad.f1.ss;
  sum.f1.sc += grad.f1.sc;
  sum.f1.cs += grad.f1.cs;
  sum.f1.cc += grad.f1.cc;
  sum.f2.ss += grad.f2.ss;
  sum.f2.sc += grad.f2.sc;
  sum.f2.cs += grad.f2.cs;
  sum.f2.cc += grad.f2.cc;
  const SpectralVelocityField shifted = project_divergence_free(sum, m_max);
  CHECK((shifted.coeffs - once.coeffs).cwiseAbs().maxCoeff() < 1e-12);
}
