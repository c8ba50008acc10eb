#pragma once
// Fractional Brownian motion with H in (0, 1/2]: covariance, the square-root
// Volterra kernel and its calibrated normalization, the adjoint kernel map
// K* on sampled functions, circulant-embedding path sampling with a dense
// Cholesky fallback, and pathwise Wiener-type integrals.

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace fbmlab {

// Hurst exponent restricted to (0, 1]; most operations additionally require
// h <= 1/2 (the rough regime this laboratory targets).
struct HurstParam {
  double h;
  explicit HurstParam(double value);
};

// R(t,s) = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2 for t, s >= 0.
double fbm_covariance(double t, double s, double h);

// ---------------------------------------------------------------------------
// Square-root kernel
//
//   K(t,s) = c_H [ (t-s)^{H-1/2} + (1/2-H) s^{H-1/2} J(t/s) ],   0 < s < t,
//   J(z)   = int_0^{z-1} r^{H-3/2} (1 - (1+r)^{H-1/2}) dr,
//
// with c_H fixed so that int_0^1 K(1,s)^2 ds = 1 (computed once per h from
// the quadrature; the normalization equation is quadratic in c_H, so the
// positive root is recovered exactly).  J is evaluated from a per-h table
// (series near z = 1, cubic Hermite in ln(z-1) through the bulk, asymptotic
// expansion beyond).  For h = 1/2 the kernel degenerates to K = 1.
class FbmKernel {
 public:
  explicit FbmKernel(double h);

  double h() const { return h_; }
  double cH() const { return c_; }

  // Normalization recovered by quadrature from int_0^1 K(1,s)^2 ds = 1; kept
  // alongside the closed form as a construction-time consistency check.
  double cH_calibrated() const { return calib_; }

  // J(z) for z >= 1 (returns the finite limit for z -> infinity).
  double J(double z) const;
  double Jinf() const { return Jinf_; }

  double K(double t, double s) const;      // requires 0 < s < t
  double dKdt(double t, double s) const;   // requires 0 < s < t

  // int_0^t K(t,s)^2 ds by direct quadrature on [0,t] (independent of the
  // normalization run at t = 1; equals t^{2H} up to quadrature error).
  double variance_integral(double t) const;

  // int_0^{min(t,s)} K(t,r) K(s,r) dr; equals the fBm covariance up to
  // quadrature error.
  double covariance_integral(double t, double s) const;

  // Closed-form normalization sqrt(2H / ((1-2H) B(1-2H, H+1/2))) used as an
  // independent cross-check of the calibrated c_H (h < 1/2).
  static double cH_closed_form(double h);

 private:
  double shape_variance_unit() const;  // int_0^1 Khat(1,s)^2 ds at c = 1
  double shapeK(double t, double s) const;

  double h_ = 0.5;
  double nu_ = 0.0;       // H - 1/2
  double c_ = 1.0;
  double calib_ = 1.0;
  bool degenerate_ = true;  // h == 1/2
  // J-table over xi = z - 1 in [kXi0, xi_max], geometric with ratio kXiRatio
  std::vector<double> jval_, jder_;  // value and d/d ln(xi) at nodes
  double lnxi0_ = 0.0, lnratio_ = 0.0, ximax_ = 0.0;
  double Jinf_ = 0.0;

  double j_series(double xi) const;
  double j_tail(double xi) const;  // int_xi^inf of the J integrand
};

// Shared per-h kernel cache (table construction is ~ms; reuse across calls).
std::shared_ptr<const FbmKernel> kernel_for(double h);

// Free-function views of the kernel (0 < s < t required).
double kernel_KH(double t, double s, double h);
double kernel_dKdt(double t, double s, double h);

// ---------------------------------------------------------------------------
// Sampled functions and the adjoint map K*

// Scalar function sampled on an ascending grid; grid[0] must be 0 for the
// operations below.
struct SampledFunction {
  std::vector<double> grid;
  std::vector<double> values;
};

// (K*_t phi)(s) = K(t,s) phi(s) + int_s^t (phi(r) - phi(s)) dK/dr (r,s) dr
// evaluated at the grid points of phi (uniform grid, phi.grid.back() == t).
// The entry at s = 0 is set to 0; norms over [0, t] use the closed-form
// first-cell rule below instead of that endpoint value.
SampledFunction kstar_apply(const SampledFunction& phi, double t, double h);

// int_0^t |K* phi|^2 ds from the sampled image: the s^{2H-1} short-time
// profile is integrated in closed form against the sampled shape.
double kstar_l2_norm_sq(const SampledFunction& kphi, double h);

// ---------------------------------------------------------------------------
// Path sampling

struct FbmPath {
  std::vector<double> times;   // times[0] == 0
  std::vector<double> values;  // values[0] == 0
  double hurst = 0.5;
  std::uint64_t seed = 0;
};

// Prepares a sampler for a fixed (grid, h).  Uniform grids use circulant
// embedding (eigenvalues computed once); if the embedding produced a
// meaningfully negative eigenvalue, or the grid is non-uniform, sampling
// falls back to a dense Cholesky factor of the covariance.
class FbmSampler {
 public:
  FbmSampler(std::vector<double> times, double h);

  FbmPath sample(std::uint64_t seed) const;

  bool uses_dense() const { return dense_; }
  // smallest embedding eigenvalue relative to the largest (uniform grids)
  double min_eigen_ratio() const { return min_eigen_ratio_; }
  const Eigen::MatrixXd& dense_factor() const;  // dense route only

 private:
  void prepare_dense();

  std::vector<double> times_;
  double h_;
  bool dense_ = false;
  double min_eigen_ratio_ = 1.0;
  // circulant route
  int n_ = 0;         // increments
  double dt_ = 0.0;
  std::vector<double> amp_;  // sqrt(eigen/(2M)) scaling per frequency
  // dense route
  Eigen::MatrixXd chol_;  // lower factor of Gram(times[1:])
};

// One-shot convenience wrapper around FbmSampler.
FbmPath sample_fbm(const std::vector<double>& times, double h,
                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// Pathwise Wiener-type integrals int_0^T phi dB

// C^1 integrand given with its derivative.
struct SmoothFn {
  std::function<double(double)> f;
  std::function<double(double)> df;
};

// Weight vector w with int_0^T phi dB ~= sum_k w_k B(t_k) for paths sampled
// on `times`: integration by parts phi(T)B(T) - int phi' B with the linear
// path interpolant integrated cell-by-cell by 4-point Gauss.  Building the
// weights once amortizes ensembles over shared paths.
std::vector<double> wiener_weight_vector(const SmoothFn& phi,
                                         const std::vector<double>& times);

double apply_weight_vector(const std::vector<double>& w, const FbmPath& path);

double wiener_integral_pathwise(const SmoothFn& phi, const FbmPath& path);

// Step integrand sum_i levels[i] 1_{[knots[i], knots[i+1])}: the integral is
// the defining finite sum of weighted increments.  Knots must lie on the
// path grid (within rounding).
double wiener_integral_step(const std::vector<double>& knots,
                            const std::vector<double>& levels,
                            const FbmPath& path);

}  // namespace fbmlab
