#ifndef CLDYN_CONFIG_HPP
#define CLDYN_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cldyn/csv.hpp"
#include "cldyn/model.hpp"
#include "cldyn/ode.hpp"
#include "cldyn/pde.hpp"
#include "cldyn/sgd.hpp"

namespace cldyn {

enum class RunMode { simulate, ode, pde, fixed_points, basins, noise_sweep, compare };

std::string to_string(RunMode mode);
RunMode parse_run_mode(const std::string& name);

/** Raw form of one features[] entry, preserved so the config echo shows
 *  what the user wrote rather than the derived law. */
struct FeatureSpec {
    enum class Kind { gaussian, three_point, moments, discrete };

    Kind kind = Kind::gaussian;
    double variance = 1.0;        // gaussian
    double alpha = 0.0, p = 0.0;  // three_point
    MomentTriple mom;             // moments
    std::vector<double> values, probs; // discrete

    HiddenLaw build() const;
};

struct SimulateSection {
    int n = 4000;
    double t_max = 10.0;
    long record_stride = 0; // 0 = auto (n/100)
    std::vector<unsigned long long> seeds = {1};
    SimInit init;

    SimConfig single(unsigned long long seed) const;
};

struct OdeSection {
    enum class Rates { automatic, closed_form, quadrature };

    double t_max = 20.0;
    double dt = 1e-3;
    double record_dt = 0.01;
    DriftVariant variant = DriftVariant::standard;
    Rates rates = Rates::automatic;
    std::vector<double> q0; // materialized at parse time
};

struct FixedPointSection {
    int resolution = 20000;
    int grid = 40;
};

struct BasinSection {
    int grid = 100;
    double t_max = 200.0;
    double dt = 0.01;
    double settle_tol = 1e-8;
};

struct NoiseSweepSection {
    double eta_max = 1.0;
    int n_eta = 41;
    double q_floor = 0.01;
    double jump_tol = 0.1;
};

struct OutputSection {
    std::string path;         // empty = stdout
    OutputFormat format = OutputFormat::csv;
    std::string density_path; // pde only; empty = skip the density dump
};

/** Fully validated experiment description with every default materialized.
 *  Unknown keys are rejected by name; out-of-range values report the valid
 *  range. `model` is ready to use; `features` keeps the raw entries for
 *  serialization. */
struct ExperimentConfig {
    RunMode mode = RunMode::ode;
    ModelParams model;
    std::vector<FeatureSpec> features;
    QuadratureSpec quadrature;
    SimulateSection simulate;
    OdeSection ode;
    PdeConfig pde;
    FixedPointSection fixed_points;
    BasinSection basins;
    NoiseSweepSection noise_sweep;
    OutputSection output;
};

/** Parses and validates a config document. `cli_mode`, when given, supplies
 *  the mode (and must agree with an explicit "mode" key). Accepts either a
 *  nested "model" section or the top-level shorthand keys activation / tau /
 *  m / moments for a single-feature model. */
ExperimentConfig parse_config(const nlohmann::json& doc,
                              std::optional<RunMode> cli_mode = std::nullopt);

/** Reads and parses a config file. */
ExperimentConfig load_config(const std::string& path,
                             std::optional<RunMode> cli_mode = std::nullopt);

/** Canonical serialization with all defaults materialized;
 *  parse_config(to_json(cfg)) reproduces cfg exactly. */
nlohmann::json to_json(const ExperimentConfig& cfg);

} // namespace cldyn

#endif
