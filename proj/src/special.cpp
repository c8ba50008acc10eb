#include "fbmlab/special.hpp"

#include <cmath>
#include <stdexcept>

namespace fbmlab {

namespace {

// Cohen-Villegas-Zagier acceleration for sum_{k>=0} (-1)^k a(k).
// Error ~ (3+sqrt(8))^{-n}; n = 48 is far below double rounding.
template <class A>
double alternating_sum(A&& a, int n = 48) {
  double d = std::pow(3.0 + std::sqrt(8.0), n);
  d = (d + 1.0 / d) / 2.0;
  double b = -1.0, c = -d, s = 0.0;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    s += c * a(k);
    b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0));
  }
  return s / d;
}

}  // namespace

double riemann_zeta(double s) {
  if (!(s > 1.0))
    throw std::domain_error("riemann_zeta: defined here only for s > 1");
  // eta(s) = (1 - 2^{1-s}) zeta(s)
  const double eta =
      alternating_sum([s](int k) { return std::pow(k + 1.0, -s); });
  return eta / (1.0 - std::pow(2.0, 1.0 - s));
}

double dirichlet_beta(double s) {
  if (!(s > 0.0)) throw std::domain_error("dirichlet_beta: need s > 0");
  return alternating_sum([s](int k) { return std::pow(2.0 * k + 1.0, -s); });
}

double lattice_sum(double s, int M) {
  if (M < 1) throw std::domain_error("lattice_sum: need M >= 1");
  double total = 0.0;
  // sum smallest terms first (largest m,n) to limit rounding drift
  for (int m = M; m >= 1; --m) {
    double row = 0.0;
    const double m2 = double(m) * m;
    for (int n = M; n >= 1; --n) row += std::pow(m2 + double(n) * n, -s);
    total += row;
  }
  return total;
}

double lattice_sum_limit(double s) {
  if (!(s > 1.0))
    throw std::domain_error("lattice_sum_limit: diverges for s <= 1");
  return dirichlet_beta(s) * riemann_zeta(s) - riemann_zeta(2.0 * s);
}

}  // namespace fbmlab
