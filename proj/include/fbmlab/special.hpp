#pragma once
// Dirichlet beta, Riemann zeta (s > 1), and partial lattice sums over the
// integer quarter-lattice.  The alternating series are accelerated with the
// Cohen-Villegas-Zagier scheme, good to ~1e-15 with ~40 terms.

#include <vector>

namespace fbmlab {

// zeta(s) for s > 1; throws std::domain_error otherwise.
double riemann_zeta(double s);

// beta(s) = sum_{k>=0} (-1)^k (2k+1)^{-s}, s > 0.
double dirichlet_beta(double s);

// sum over 1 <= m,n <= M of (m^2 + n^2)^{-s}.  Finite for every (s, M);
// converges as M -> infinity iff s > 1.
double lattice_sum(double s, int M);

// Limit of lattice_sum for s > 1: beta(s)*zeta(s) - zeta(2s).
double lattice_sum_limit(double s);

}  // namespace fbmlab
