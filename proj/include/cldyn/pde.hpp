#ifndef CLDYN_PDE_HPP
#define CLDYN_PDE_HPP

#include <vector>

#include "cldyn/model.hpp"
#include "cldyn/quadrature.hpp"

namespace cldyn {

/** Finite-volume solver for the limiting joint density P_t(w | u) of a
 *  weight coordinate w conditioned on its feature loading vector u. The
 *  evolution is a drift-diffusion equation
 *
 *    dP/dt = -d/dw [ Gamma(w, u) P ] + (lambda/2) d^2/dw^2 P,
 *    Gamma(w, u) = w (q.g + tau r - lambda/2) - u.g - tau phi(w),
 *
 *  with g, lambda re-evaluated from the current overlaps each step. The
 *  u-average uses a Gauss-Hermite rule per feature (the loadings of a
 *  rotationally invariant frame are standard normal in the limit); w lives
 *  on a uniform cell grid over [-w_max, w_max] with zero-flux boundaries,
 *  first-order upwind advection and explicit centered diffusion, split. */
struct PdeConfig {
    double w_max = 6.0;
    int n_w = 512;
    int n_u = 15;
    double dt = 0.0;       // 0 = automatic from the stability bound each step
    double cfl = 0.9;      // safety factor for the automatic step
    double t_max = 20.0;
    double record_dt = 0.1;
    std::vector<double> q0; // initial overlaps, |q0| <= 1
};

struct PdeTrace {
    std::vector<double> t;
    std::vector<std::vector<double>> q;
    std::vector<double> r;
    std::vector<double> mass_drift;  // max per-slab |mass - 1| before renormalization
    std::vector<double> min_density; // most negative cell value before clipping
    long n_steps = 0;
};

struct PdeResult {
    PdeTrace trace;
    // final state, for export: slab k covers u_nodes[k*d1 .. k*d1+d1)
    std::vector<double> u_nodes;
    std::vector<double> u_weights;
    std::vector<double> w_centers;
    std::vector<double> density; // slab-major, density[k*n_w + j]
};

PdeResult run_density_evolution(const ModelParams& params, const PdeConfig& config,
                                const QuadratureSpec& quad);

/** One split step (upwind advection then explicit diffusion) on a single
 *  slab with zero-flux boundaries. gamma_face holds the drift at the n_w+1
 *  cell faces; the boundary faces are forced to zero flux regardless.
 *  Exposed for direct verification of the scheme. */
void advance_slab(std::vector<double>& p, const std::vector<double>& gamma_face, double lambda,
                  double dw, double dt);

} // namespace cldyn

#endif
