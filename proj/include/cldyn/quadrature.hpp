#ifndef CLDYN_QUADRATURE_HPP
#define CLDYN_QUADRATURE_HPP

#include <vector>

namespace cldyn {

/** Node/weight pairs for a one-dimensional quadrature rule. */
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/** Gauss-Hermite rule normalized against the standard normal density:
 *  sum_i w_i p(x_i) equals E[p(Z)], Z ~ N(0,1), exactly for polynomials p of
 *  degree <= 2n-1. Weights sum to 1 and nodes are symmetric about 0.
 *
 *  Nodes and weights are obtained from the eigen-decomposition of the Jacobi
 *  matrix of the probabilists' Hermite recurrence (Golub-Welsch).
 *
 *  @param[in] n number of nodes, n >= 1
 */
QuadratureRule gauss_hermite(int n);

/** Grid resolutions for the expectation engine. `n_e` integrates the
 *  residual direction orthogonal to the recovered subspace, `n_c` each
 *  Gaussian hidden coordinate (discrete hidden laws use their exact atoms),
 *  and `n_gamma` each Gaussian view-noise coordinate. */
struct QuadratureSpec {
    int n_e = 41;
    int n_c = 21;
    int n_gamma = 21;
};

} // namespace cldyn

#endif
