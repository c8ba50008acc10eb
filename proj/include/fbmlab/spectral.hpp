#pragma once

// Square-domain spectral model on (0,pi)^2: mode lattice, surrogate diagonal
// action of the fourth-order operator, semigroup and fractional powers, and
// the Leray projection in a mixed trigonometric representation.
//
// Basis: e_mn = (2/(pi sqrt(m^2+n^2))) * curl(sin(m x1) sin(n x2)), an
// orthonormal family of divergence-free fields on which the operator acts
// diagonally with eigenvalue (m^2+n^2)^2.  This is a surrogate for the true
// no-slip eigenfunctions (which have no closed form); it satisfies
// incompressibility and zero normal flow but not full no-slip.  Every run
// manifest records this deviation.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace fbmlab {

struct ModeIndex {
  int m = 1;
  int n = 1;
};

// eigenvalue of the diagonalized fourth-order operator: (m^2+n^2)^2
double eigenvalue(ModeIndex mode);

// surrogate Dirichlet-Laplacian eigenvalue (m^2+n^2)
double laplace_eigenvalue(ModeIndex mode);

// Velocity field as stream-function amplitudes over modes 1..m_max square.
struct SpectralVelocityField {
  int m_max = 0;
  Eigen::VectorXd coeffs;  // flattened, index (m-1)*m_max + (n-1)

  static SpectralVelocityField zero(int m_max);
  double& at(int m, int n);
  double at(int m, int n) const;
};

int mode_flat(ModeIndex mode, int m_max);
ModeIndex mode_from_flat(int flat, int m_max);

SpectralVelocityField semigroup_apply(const SpectralVelocityField& u,
                                      double t);
SpectralVelocityField frac_power_apply(const SpectralVelocityField& u,
                                       double alpha);

double norm_l2(const SpectralVelocityField& u);            // |u|
double norm_F(const SpectralVelocityField& u, double alpha);  // |A^alpha u|
double norm_v(const SpectralVelocityField& u);       // |A^{1/2} u|
double norm_h01(const SpectralVelocityField& u);     // |A^{1/4} u|

// Constants of the dissipativity estimates; c1..c6 are filled in when the
// corresponding derivations are evaluated (see attractor module).
struct EstimateConstants {
  double c0 = 1.0;      // fractional-integral embedding constant
  double C1 = 0.5;      // trilinear interpolation constant
  double c1 = 0.5;      // lower a-form bound (diagonal identity)
  double c2 = 0.5;      // upper a-form bound (diagonal identity)
  double c3 = 0.0;
  double c4 = 0.0;
  double c5 = 0.0;
  double c6 = 0.0;
  double lambda1 = 4.0;  // first surrogate eigenvalue
};

// ---------------------------------------------------------------------------
// Collocation grid: closed uniform grid x_i = i pi / P, P = 2 m_max, with
// trapezoid weights.  For this P the quadrature integrates products of up to
// three truncated fields exactly (cosine degree <= 2P-1), so the discrete
// identities below hold to rounding; this meets and exceeds the 3/2
// dealiasing rule.
class CollocationContext {
 public:
  explicit CollocationContext(int m_max);

  int m_max() const { return m_; }
  int p() const { return p_; }
  const Eigen::VectorXd& nodes() const { return x_; }
  const Eigen::VectorXd& weights() const { return w_; }

  // basis samples: column k-1 holds sin(k x_i) / cos(k x_i), k = 1..m_max
  const Eigen::MatrixXd& sinb() const { return sin_; }
  const Eigen::MatrixXd& cosb() const { return cos_; }

  // amplitudes as an m_max x m_max matrix (row m-1, column n-1)
  Eigen::MatrixXd coeff_matrix(const SpectralVelocityField& u) const;

  // velocity components on the grid
  void velocity_grids(const SpectralVelocityField& u, Eigen::MatrixXd& u1,
                      Eigen::MatrixXd& u2) const;

  // all four first derivatives on the grid (exact spectral differentiation)
  void gradient_grids(const SpectralVelocityField& u, Eigen::MatrixXd& d1u1,
                      Eigen::MatrixXd& d2u1, Eigen::MatrixXd& d1u2,
                      Eigen::MatrixXd& d2u2) const;

  // quadrature inner product of two grid functions
  double inner(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g) const;

  // weighted projections <f, basis_m basis_n>_Q for all m,n = 1..m_max
  Eigen::MatrixXd project_sc(const Eigen::MatrixXd& f) const;
  Eigen::MatrixXd project_cs(const Eigen::MatrixXd& f) const;
  Eigen::MatrixXd project_cc(const Eigen::MatrixXd& f) const;
  Eigen::MatrixXd project_ss(const Eigen::MatrixXd& f) const;

 private:
  Eigen::MatrixXd weighted(const Eigen::MatrixXd& f) const;

  int m_ = 0, p_ = 0;
  Eigen::VectorXd x_, w_;
  Eigen::MatrixXd sin_, cos_;
};

// ---------------------------------------------------------------------------
// Mixed trigonometric representation of scalar and vector fields.  A scalar
// carries four parity blocks over (0..q)^2; entries at invalid indices
// (sine index 0) stay zero.  Derivatives act exactly on coefficients, which
// is what makes the Leray projection exact for gradient inputs.
struct TrigScalar {
  int q = 0;
  Eigen::MatrixXd ss, sc, cs, cc;  // (q+1) x (q+1) each

  static TrigScalar zero(int q);
};

struct TrigVectorField {
  TrigScalar f1, f2;
};

// exact gradient of a scalar
TrigVectorField gradient_of(const TrigScalar& q);

// exact mixed representation of a spectral velocity field
TrigVectorField mixed_from_velocity(const SpectralVelocityField& u);

// Leray projection onto the divergence-free span: sine-expand the vorticity
// d1 f2 - d2 f1, divide by (m^2+n^2), renormalize to basis amplitudes.
SpectralVelocityField project_divergence_free(const TrigVectorField& f,
                                              int m_max);

}  // namespace fbmlab
