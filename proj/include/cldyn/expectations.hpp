#ifndef CLDYN_EXPECTATIONS_HPP
#define CLDYN_EXPECTATIONS_HPP

#include <vector>

#include "cldyn/model.hpp"
#include "cldyn/quadrature.hpp"

namespace cldyn {

/** Effective scalar pre-activation seen through a unit-norm weight vector
 *  with overlaps q onto the features: theta = c.q + sqrt(1-|q|^2) e + gamma,
 *  where e is the residual direction and gamma the view noise. */
double projected_preactivation(const std::vector<double>& q, const std::vector<double>& c,
                               double e, double gamma);

/** The two cross-view contrast kernels at given pre-activations:
 *  f12 = -2 (sigma(th1) - ybar1) sigma'(th2) and f21 with views swapped. */
struct KernelPair {
    double f12 = 0.0;
    double f21 = 0.0;
};
KernelPair contrast_kernels(const Activation& act, double th1, double th2,
                            double ybar1, double ybar2);

/** Drift vector g and diffusion scalar lambda of the limiting overlap
 *  dynamics, as quadrature averages of the contrast kernels:
 *
 *    g      = (tau/2) <c (f12 + f21)> - (tau/2) q <(d1+d2)(f12 + f21)>
 *    lambda = (tau^2 / 4m) [ (1+<g2^2>) <f12^2> + (1+<g1^2>) <f21^2>
 *                            + 2 (1+<g1 g2>) <f12 f21> ]
 *
 *  The directional derivative average is evaluated through the Gaussian
 *  integration-by-parts identity <e h> = sqrt(1-|q|^2) <(d1+d2) h>, which
 *  stays valid for kinked activations; within 1e-3 of the |q| = 1 boundary
 *  it switches to a centered difference along (1,1) with step 1e-4. */
struct DriftDiffusion {
    std::vector<double> g;
    double lambda = 0.0;
    double ybar1 = 0.0, ybar2 = 0.0; // centering constants used
    double fprime_sym = 0.0;         // <(d1+d2)(f12+f21)>
};

DriftDiffusion drift_diffusion(const std::vector<double>& q, const ModelParams& params,
                               const QuadratureSpec& quad);

/** Time derivative of the overlap vector in the limiting dynamics:
 *  dq/dt = q (q.g - lambda/2) - g. */
std::vector<double> overlap_rhs(const std::vector<double>& q, const ModelParams& params,
                                const QuadratureSpec& quad);

/** Population centering constants (<sigma(theta_1)>, <sigma(theta_2)>) at
 *  the given overlap. */
std::pair<double, double> population_centering(const std::vector<double>& q,
                                               const ModelParams& params,
                                               const QuadratureSpec& quad);

} // namespace cldyn

#endif
