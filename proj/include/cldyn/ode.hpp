#ifndef CLDYN_ODE_HPP
#define CLDYN_ODE_HPP

#include <array>
#include <functional>
#include <vector>

#include "cldyn/model.hpp"

namespace cldyn {

/** Closed-form rates for the squared overlap Q = q^2 under the quadratic
 *  activation with zero centering and no (or linear) prior. All rates are
 *  polynomials in Q and the excess moments k = m4 - 3, n = m2 - 1,
 *  b = m6 - 15; callers keep Q inside its simplex (values outside are the
 *  polynomial continuation). Inputs are assumed validated. */

/** Drift bracket choice for the single-feature rate. `standard` keeps the
 *  full 3Q(1-2Q)(m2-1) term; `simplified` is a reduced form sometimes
 *  quoted for this system that keeps only 3Q(m2-1). The two agree at
 *  m2 = 1 and to first order in Q. */
enum class DriftVariant { standard, simplified };

/** Single planted feature, noiseless views. */
double squared_overlap_rate(double Q, const MomentTriple& mom, double tau, int m,
                            DriftVariant variant = DriftVariant::standard);

/** Two planted features, noiseless views. Component i of the result is
 *  dQ_i/dt; the second component is the same polynomial with the feature
 *  roles swapped. */
std::array<double, 2> squared_overlap_rate_two(double Q1, double Q2, const MomentTriple& mom1,
                                               const MomentTriple& mom2, double tau, int m);

/** Single feature with unit second moment (required) and view noise of
 *  variance eta, either independent across views or anticorrelated
 *  (gamma2 = -gamma1). Throws config_error when m2 differs from 1 or the
 *  noise kind has no closed form. */
double squared_overlap_rate_noisy(double Q, double eta, NoiseModel::Kind kind,
                                  const MomentTriple& mom, double tau, int m);

/** Fixed-step classical Runge-Kutta driver. */
using OdeRhs = std::function<void(double t, const std::vector<double>& x, std::vector<double>& dx)>;

struct OdeOptions {
    double t_max = 10.0;
    double dt = 1e-3;
    double record_dt = 0.01; // snapshot spacing; rounded to a multiple of dt
    /** Optional projection applied after every step; returns true when it
     *  changed the state (counted as a clamp event). */
    std::function<bool(std::vector<double>&)> clamp;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> x;
    long clamp_events = 0;
};

Trajectory integrate_rk4(const OdeRhs& rhs, std::vector<double> x0, const OdeOptions& opts);

/** Projection of squared overlaps onto the simplex Q_i >= 0, sum Q_i <= 1. */
std::function<bool(std::vector<double>&)> clamp_squared_simplex();

/** Projection of a signed overlap vector onto the closed unit ball. */
std::function<bool(std::vector<double>&)> clamp_unit_ball();

} // namespace cldyn

#endif
