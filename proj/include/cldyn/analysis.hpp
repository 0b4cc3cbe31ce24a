#ifndef CLDYN_ANALYSIS_HPP
#define CLDYN_ANALYSIS_HPP

#include <array>
#include <functional>
#include <vector>

#include "cldyn/model.hpp"
#include "cldyn/quadrature.hpp"

namespace cldyn {

enum class Stability { stable, unstable, marginal };
const char* to_string(Stability s);

/** Roots of a scalar rate function on [lo, hi], located by sign-change scan
 *  plus bisection, classified by the local slope (central difference with
 *  step 1e-7 (hi-lo); the callable must tolerate arguments that far outside
 *  [lo, hi]). |slope| below marginal_tol reports marginal. */
struct ScalarFixedPoint {
    double Q = 0.0;
    double slope = 0.0;
    Stability stability = Stability::marginal;
};

std::vector<ScalarFixedPoint> fixed_points_scalar(const std::function<double(double)>& rhs,
                                                  double lo = 0.0, double hi = 1.0,
                                                  int resolution = 20000,
                                                  double marginal_tol = 1e-8);

/** Fixed points of a planar rate field on the simplex Q_i >= 0,
 *  Q1 + Q2 <= 1: Newton iterations (finite-difference Jacobian) seeded from
 *  a regular simplex grid, deduplicated, classified by the real parts of the
 *  Jacobian eigenvalues. */
struct PlanarFixedPoint {
    std::array<double, 2> Q{0.0, 0.0};
    std::array<double, 2> eig_real{0.0, 0.0};
    Stability stability = Stability::marginal;
};

using PlanarRhs = std::function<std::array<double, 2>(double, double)>;

std::vector<PlanarFixedPoint> fixed_points_planar(const PlanarRhs& rhs, int grid = 40,
                                                  double marginal_tol = 1e-8);

/** Critical second moment of the hidden law above which the zero-overlap
 *  state destabilizes, from the balance of the drift and diffusion linear
 *  responses at q = 0:  m2* = 1 - lambda_0 / (tau <(d1+d2)(f12+f21)>_0).
 *  Uses the activation, noise, batch size, and centering of `params`; the
 *  hidden law itself drops out at zero overlap. Throws numeric_error when
 *  the derivative average is not negative (no destabilization). */
double trainability_threshold(const ModelParams& params, const QuadratureSpec& quad);

/** Basin-of-attraction map over the squared-overlap simplex. Cell (i, j)
 *  covers center ((i+0.5)/grid, (j+0.5)/grid). A cell is converged once
 *  both rate components fall below settle_tol (or at t_max); a converged
 *  endpoint is labeled by the strictly larger component, provided it
 *  exceeds half the largest stable recovery level found by the seed
 *  search — otherwise the cell counts as returned to the origin. Exact
 *  component ties and cells still moving at t_max stay unresolved. */
struct BasinOptions {
    int grid = 100;
    double t_max = 200.0;
    double dt = 0.01;
    double settle_tol = 1e-8; // convergence: both |rate| components below this
    int fp_grid = 40;         // seed grid for the fixed-point search
};

struct BasinMap {
    static constexpr int label_outside = -2;    // cell center not in the simplex
    static constexpr int label_unresolved = -1; // tie or no convergence by t_max
    static constexpr int label_origin = 0;
    static constexpr int label_feature1 = 1;
    static constexpr int label_feature2 = 2;

    int grid = 0;
    std::vector<PlanarFixedPoint> fixed_points; // from the seed search
    std::vector<int> label;                // grid*grid, row-major in the Q1 index
    std::vector<double> convergence_time;  // per cell; t_max if unresolved, NaN outside
    std::array<double, 2> area_fraction{0.0, 0.0}; // per feature, of in-simplex cells
    double origin_fraction = 0.0;
    long unresolved = 0;
};

BasinMap basin_map(const PlanarRhs& rhs, const BasinOptions& opts);

/** Largest stable recovery level Q* of the noisy single-feature closed form
 *  as a function of the noise variance eta, with bisection refinement of the
 *  critical eta where recovery disappears (NaN when no transition lies in
 *  [0, eta_max]). Grid points whose neighbors jump by more than jump_tol
 *  are refined by inserted midpoints. */
struct SweepPoint {
    double eta = 0.0;
    bool exists = false;
    double Q = 0.0;
};

struct NoiseSweepResult {
    std::vector<SweepPoint> points;
    double eta_critical = 0.0;
};

NoiseSweepResult noise_robustness_sweep(const MomentTriple& mom, double tau, int m,
                                        NoiseModel::Kind kind, double eta_max, int n_eta,
                                        double q_floor = 0.01, double jump_tol = 0.1,
                                        int refine_rounds = 3);

} // namespace cldyn

#endif
