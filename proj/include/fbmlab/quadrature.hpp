#pragma once
// Quadrature primitives used by the kernel / convolution integrals:
//   * 8-point Gauss-Legendre panels over explicit knot meshes,
//   * geometrically graded meshes toward integrable endpoint singularities,
//   * product integration against an exact power weight (x-a)^p or (b-x)^p
//     with the smooth factor modelled piecewise-linearly.
// The power-weight helpers keep every singular power in closed form, so the
// smooth factor passed in must stay finite at the weighted endpoint.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fbmlab::quad {

inline constexpr double kGL8X[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
inline constexpr double kGL8W[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

inline constexpr double kGL4X[4] = {-0.8611363115940526, -0.3399810435848563,
                                    0.3399810435848563, 0.8611363115940526};
inline constexpr double kGL4W[4] = {0.3478548451374538, 0.6521451548625461,
                                    0.6521451548625461, 0.3478548451374538};

template <class F>
inline double gl8(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 8; ++i) s += kGL8W[i] * f(c + h * kGL8X[i]);
  return s * h;
}

template <class F>
inline double gl4(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += kGL4W[i] * f(c + h * kGL4X[i]);
  return s * h;
}

template <class F>
inline double over_mesh(F&& f, const std::vector<double>& knots) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k)
    s += gl8(f, knots[k], knots[k + 1]);
  return s;
}

// Uniform knots with at most `max_cells` cells of width <= `target_w`.
inline std::vector<double> uniform_knots(double a, double b, double target_w,
                                         int max_cells = 1 << 20) {
  int n = int(std::ceil((b - a) / target_w));
  n = std::clamp(n, 1, max_cells);
  std::vector<double> kn(n + 1);
  for (int i = 0; i <= n; ++i) kn[i] = a + (b - a) * double(i) / n;
  return kn;
}

// Knots on [a,b] graded geometrically toward one or both endpoints (ratio
// `r` < 1, innermost offset ~ (b-a)*cut_rel), with GL panels this resolves
// integrable endpoint singularities of the integrand itself.
inline std::vector<double> graded_knots(double a, double b, bool grade_left,
                                        bool grade_right, double r = 0.75,
                                        double cut_rel = 1e-12) {
  std::vector<double> kn;
  const double mid = 0.5 * (a + b);
  auto side = [&](double from, double to, bool graded, bool ascending) {
    // produces knots strictly between `from` (endpoint) and `to` (mid)
    std::vector<double> off;
    const double w = std::abs(to - from);
    if (graded) {
      for (double d = w; d > w * cut_rel; d *= r) off.push_back(d);
    } else {
      const int n = 8;
      for (int i = n; i >= 1; --i) off.push_back(w * double(i) / n);
    }
    // offsets descend toward the endpoint
    std::vector<double> pts;
    if (ascending) {
      for (auto it = off.rbegin(); it != off.rend(); ++it)
        pts.push_back(from + *it);
    } else {
      for (double d : off) pts.push_back(from - d);
    }
    return pts;
  };
  kn.push_back(a);
  auto left = side(a, mid, grade_left, true);
  kn.insert(kn.end(), left.begin(), left.end());
  auto right = side(b, mid, grade_right, false);
  // right side produced descending offsets from b => ascending coordinates
  // need reversal: pts are b - d with d descending => coordinates ascending
  kn.insert(kn.end(), right.begin(), right.end());
  kn.push_back(b);
  std::sort(kn.begin(), kn.end());
  kn.erase(std::unique(kn.begin(), kn.end()), kn.end());
  return kn;
}

namespace detail {

// integral over [d0,d1] (offsets from the singular endpoint) of tau^p times
// the linear interpolant of g between the cell ends.
inline double power_cell(double d0, double d1, double p, double g0,
                         double g1) {
  const double p1 = p + 1.0, p2 = p + 2.0;
  const double e1a = std::pow(d1, p1), e0a = d0 > 0 ? std::pow(d0, p1) : 0.0;
  const double e1b = std::pow(d1, p2), e0b = d0 > 0 ? std::pow(d0, p2) : 0.0;
  const double I0 = (e1a - e0a) / p1;
  const double I1 = (e1b - e0b) / p2;
  if (d1 == d0) return 0.0;
  return g0 * I0 + (g1 - g0) / (d1 - d0) * (I1 - d0 * I0);
}

// same with the quadratic interpolant through the ends and the midpoint
inline double power_cell3(double d0, double d1, double p, double g0,
                          double gm, double g1) {
  if (d1 == d0) return 0.0;
  const double p1 = p + 1.0, p2 = p + 2.0, p3 = p + 3.0;
  const double e1a = std::pow(d1, p1), e0a = d0 > 0 ? std::pow(d0, p1) : 0.0;
  const double e1b = std::pow(d1, p2), e0b = d0 > 0 ? std::pow(d0, p2) : 0.0;
  const double e1c = std::pow(d1, p3), e0c = d0 > 0 ? std::pow(d0, p3) : 0.0;
  const double I0 = (e1a - e0a) / p1;
  const double I1 = (e1b - e0b) / p2;
  const double I2 = (e1c - e0c) / p3;
  const double dm = 0.5 * (d0 + d1);
  const double f01 = (gm - g0) / (dm - d0);
  const double f12 = (g1 - gm) / (d1 - dm);
  const double f012 = (f12 - f01) / (d1 - d0);
  return g0 * I0 + f01 * (I1 - d0 * I0) +
         f012 * (I2 - (d0 + dm) * I1 + d0 * dm * I0);
}

}  // namespace detail

// Product integration of (x-a)^p * g(x) over [a,b], p > -1, g finite at a.
// A geometric layer (ratio r, depth cut_rel, nsub uniform subcells per
// geometric cell) resolves the weight; outside the layer the full integrand
// is smooth and integrated by GL8 panels of width <= smooth_w.
template <class G>
inline double power_left(G&& g, double a, double b, double p,
                         double layer = -1.0, double r = 0.97, int nsub = 4,
                         double cut_rel = 1e-12, double smooth_w = 0.25) {
  if (!(p > -1.0)) throw std::invalid_argument("power_left: need p > -1");
  if (b <= a) return 0.0;
  const double w = b - a;
  if (layer < 0.0 || layer > w) layer = w;
  double total = 0.0;
  // geometric layer [a, a+layer]
  {
    std::vector<double> d;  // descending offsets
    for (double x = layer; x > layer * cut_rel; x *= r) d.push_back(x);
    d.push_back(0.0);
    for (std::size_t k = 0; k + 1 < d.size(); ++k) {
      const double hi = d[k], lo = d[k + 1];
      const double step = (hi - lo) / nsub;
      double gprev = g(a + lo > a ? a + lo : a);  // g finite at a
      for (int s = 0; s < nsub; ++s) {
        const double d0 = lo + step * s, d1 = lo + step * (s + 1);
        const double gmid = g(a + 0.5 * (d0 + d1));
        const double gnext = g(a + d1);
        total += detail::power_cell3(d0, d1, p, gprev, gmid, gnext);
        gprev = gnext;
      }
    }
  }
  // smooth remainder [a+layer, b]
  if (a + layer < b) {
    auto fi = [&](double x) { return std::pow(x - a, p) * g(x); };
    total += over_mesh(fi, uniform_knots(a + layer, b, smooth_w));
  }
  return total;
}

// Product integration of (b-x)^p * g(x) over [a,b]; mirror of power_left.
template <class G>
inline double power_right(G&& g, double a, double b, double p,
                          double layer = -1.0, double r = 0.97, int nsub = 4,
                          double cut_rel = 1e-12, double smooth_w = 0.25) {
  auto gm = [&](double x) { return g(a + b - x); };
  return power_left(gm, a, b, p, layer, r, nsub, cut_rel, smooth_w);
}

}  // namespace fbmlab::quad
