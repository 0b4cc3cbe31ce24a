#ifndef CLDYN_RUNNER_HPP
#define CLDYN_RUNNER_HPP

#include <functional>
#include <vector>

#include "cldyn/analysis.hpp"
#include "cldyn/config.hpp"
#include "cldyn/sgd.hpp"

namespace cldyn {

/** True when the model admits the closed-form squared-overlap rates
 *  (quadratic activation, zero centering, and either noiseless views with
 *  at most two features or unit-m2 independent/anticorrelated noise with
 *  one feature). */
bool closed_form_eligible(const ExperimentConfig& cfg);

/** Scalar rate dQ/dt on [0, 1] for a single-feature model: the closed form
 *  when eligible, otherwise the quadrature engine evaluated at q = sqrt(Q).
 *  Arguments outside [0, 1] are clamped. */
std::function<double(double)> scalar_rate(const ExperimentConfig& cfg);

/** Planar rate (dQ1/dt, dQ2/dt) for a two-feature model; closed form when
 *  eligible, quadrature otherwise. */
PlanarRhs planar_rate(const ExperimentConfig& cfg);

struct OdeRunResult {
    std::vector<double> t;
    std::vector<std::vector<double>> q; // signed overlaps per record
    std::vector<std::vector<double>> Q; // squared overlaps per record
    long clamp_events = 0;
    bool used_closed_form = false;
};

/** Integrates the limiting overlap dynamics from cfg.ode.q0 on the record
 *  grid of cfg.ode. */
OdeRunResult run_ode(const ExperimentConfig& cfg);

/** One finite-size training run per seed, in seed order; seeds execute
 *  concurrently when hardware threads are available. */
std::vector<SimTrace> run_simulations(const ExperimentConfig& cfg);

struct CompareResult {
    std::vector<double> t;                        // the simulation record grid
    std::vector<std::vector<double>> Q_ode;       // [record][feature]
    std::vector<std::vector<double>> Q_sim_mean;  // mean over seeds
    std::vector<std::vector<double>> Q_sim_stderr; // sample std error over seeds
    int n_seeds = 0;
    bool used_closed_form = false;
};

/** Runs the multi-seed simulation and the limit ODE from the matching
 *  initial state (directed init: q = sqrt(Q0); random init: q = 0), with
 *  the ODE sampled exactly on the simulation record grid. */
CompareResult run_compare(const ExperimentConfig& cfg);

/** Executes cfg.mode end to end and writes the output file(s). */
void run_experiment(const ExperimentConfig& cfg);

} // namespace cldyn

#endif
