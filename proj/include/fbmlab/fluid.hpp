#pragma once

// Fluid nonlinearities evaluated pseudospectrally: rate-of-deformation
// tensor, bilinear form a, trilinear form b, convection B(u), and the
// shear-thinning viscosity operator N(u).  All grid quadratures run on the
// closed collocation grid with P = 2 m_max, which integrates triple products
// of truncated fields exactly, so the structural identities (antisymmetry of
// b, <B(u),u> = 0, trace-free deformation) hold to rounding.

#include <cstdint>

#include <Eigen/Dense>

#include "fbmlab/spectral.hpp"

namespace fbmlab {

struct FluidParams {
  double mu0 = 2.0;    // viscosity scale
  double mu1 = 1.0;    // bipolar coefficient; model fixes 1, warn otherwise
  double eps = 2.0;    // shear regularization
  double alpha = 0.5;  // shear exponent in (0, 1]

  void validate() const;
};

// grid values of the symmetric deformation tensor; e22 = -e11 pointwise
struct DeformationField {
  Eigen::MatrixXd e11, e12, e22;
};

DeformationField deformation_tensor(const SpectralVelocityField& u,
                                    const CollocationContext& ctx);

// a(u,v) = (1/2) sum (m^2+n^2)^2 c_u c_v; equals (1/2)(Lap u, Lap v) here
double a_form(const SpectralVelocityField& u, const SpectralVelocityField& v);

// b(u,v,w) = integral of (u . grad v) . w via exact grid quadrature
double b_trilinear(const SpectralVelocityField& u,
                   const SpectralVelocityField& v,
                   const SpectralVelocityField& w,
                   const CollocationContext& ctx);

// Leray projection of a grid vector field onto the resolved basis
SpectralVelocityField project_vector_grid(const CollocationContext& ctx,
                                          const Eigen::MatrixXd& f1,
                                          const Eigen::MatrixXd& f2);

// projection of (u . grad) u; <B_op(u), w> = b(u,u,w)
SpectralVelocityField B_op(const SpectralVelocityField& u,
                           const CollocationContext& ctx);

// viscosity operator with mu(u) = 2 mu0 (eps + |e|^2)^(-alpha/2);
// <N_op(u), v> = integral of mu(u) e(u):e(v), nonnegative on the diagonal
SpectralVelocityField N_op(const SpectralVelocityField& u,
                           const FluidParams& params,
                           const CollocationContext& ctx);

// Empirical lower estimate of the trilinear interpolation constant C1 in
//   b(u,v,w) <= C1 |u|^1/2 ||u||^1/2 ||v|| |w|^1/2 ||w||^1/2
// (|.| the L2 norm, ||.|| the H_0^1 norm).  Maximum of the ratio over
// `ensemble` random triples, each refined by a fixed number of gradient
// ascent steps; a lower bound on the true constant by construction.
double estimate_C1(int ensemble, int m_max, std::uint64_t seed = 2025);

}  // namespace fbmlab
