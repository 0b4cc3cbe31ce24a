#include "cldyn/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

#include "cldyn/errors.hpp"
#include "cldyn/expectations.hpp"
#include "cldyn/ode.hpp"
#include "cldyn/pde.hpp"
#include "cldyn/version.hpp"

namespace cldyn {

namespace {

/** Copy of q pulled just inside the unit ball, so quadrature evaluations
 *  survive the transient excursions of explicit integrators. */
std::vector<double> ball_clamped(std::vector<double> q)
{
    double qq = 0.0;
    for (double v : q) qq += v * v;
    if (qq > 1.0) {
        const double scale = 1.0 / std::sqrt(qq) * (1.0 - 1e-14);
        for (double& v : q) v *= scale;
    }
    return q;
}

/** The vector field of the limiting dynamics in the coordinates picked by
 *  eligibility: squared overlaps Q for the closed forms, signed overlaps q
 *  for the quadrature engine. */
struct RateSystem {
    bool closed = false;
    std::function<void(const std::vector<double>&, std::vector<double>&)> f;
    std::function<bool(std::vector<double>&)> clamp;
};

RateSystem build_system(const ExperimentConfig& cfg)
{
    RateSystem sys;
    const ModelParams& mp = cfg.model;
    const int d1 = mp.d1();
    if (cfg.ode.rates != OdeSection::Rates::quadrature && closed_form_eligible(cfg)) {
        sys.closed = true;
        sys.clamp = clamp_squared_simplex();
        if (d1 == 2) {
            const MomentTriple m1 = mp.laws[0].moments(), m2 = mp.laws[1].moments();
            sys.f = [m1, m2, tau = mp.tau, m = mp.m](const std::vector<double>& Q,
                                                     std::vector<double>& dQ) {
                const auto rate = squared_overlap_rate_two(Q[0], Q[1], m1, m2, tau, m);
                dQ[0] = rate[0];
                dQ[1] = rate[1];
            };
        } else if (mp.noise.kind == NoiseModel::Kind::none) {
            const MomentTriple mom = mp.laws[0].moments();
            sys.f = [mom, tau = mp.tau, m = mp.m, variant = cfg.ode.variant](
                        const std::vector<double>& Q, std::vector<double>& dQ) {
                dQ[0] = squared_overlap_rate(Q[0], mom, tau, m, variant);
            };
        } else {
            const MomentTriple mom = mp.laws[0].moments();
            sys.f = [mom, tau = mp.tau, m = mp.m, eta = mp.noise.eta,
                     kind = mp.noise.kind](const std::vector<double>& Q,
                                           std::vector<double>& dQ) {
                dQ[0] = squared_overlap_rate_noisy(Q[0], eta, kind, mom, tau, m);
            };
        }
        return sys;
    }
    if (cfg.ode.rates == OdeSection::Rates::closed_form)
        throw config_error("ode.rates = closed_form needs the quadratic activation with zero "
                           "centering and either no view noise (at most two features) or "
                           "independent/anticorrelated noise with one unit-m2 feature");
    sys.closed = false;
    sys.clamp = clamp_unit_ball();
    sys.f = [params = mp, quad = cfg.quadrature](const std::vector<double>& q,
                                                 std::vector<double>& dq) {
        dq = overlap_rhs(ball_clamped(q), params, quad);
    };
    return sys;
}

void rk4_step(const RateSystem& sys, std::vector<double>& x, double h)
{
    const std::size_t n = x.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    sys.f(x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    sys.f(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    sys.f(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    sys.f(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (sys.clamp) sys.clamp(x);
}

std::string join_seeds(const std::vector<unsigned long long>& seeds)
{
    std::string out;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i > 0) out += ' ';
        out += std::to_string(seeds[i]);
    }
    return out;
}

std::string format_fixed(double v, int digits)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

MetaBlock base_meta(const ExperimentConfig& cfg, double wall_s, bool uses_seeds)
{
    MetaBlock meta;
    meta.add("version", version_string);
    meta.add("mode", to_string(cfg.mode));
    meta.add("config", to_json(cfg).dump());
    meta.add("seeds", uses_seeds ? join_seeds(cfg.simulate.seeds) : "(none; deterministic)");
    meta.add("wall_time_s", format_fixed(wall_s, 3));
    return meta;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> indexed_columns(const char* stem, int d1)
{
    std::vector<std::string> cols;
    for (int j = 1; j <= d1; ++j) cols.push_back(std::string(stem) + "_" + std::to_string(j));
    return cols;
}

Table simulate_table(const ExperimentConfig& cfg, const std::vector<SimTrace>& traces)
{
    const int d1 = cfg.model.d1();
    Table table;
    table.columns = {"seed", "t"};
    for (const auto& c : indexed_columns("q", d1)) table.columns.push_back(c);
    for (const auto& c : indexed_columns("Q", d1)) table.columns.push_back(c);
    table.columns.push_back("r");
    table.columns.push_back("norm_error");
    for (std::size_t s = 0; s < traces.size(); ++s) {
        const SimTrace& tr = traces[s];
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            std::vector<Cell> row;
            row.emplace_back(cfg.simulate.seeds[s]);
            row.emplace_back(tr.t[i]);
            for (int j = 0; j < d1; ++j) row.emplace_back(tr.q[i][j]);
            for (int j = 0; j < d1; ++j) row.emplace_back(tr.q[i][j] * tr.q[i][j]);
            row.emplace_back(tr.r[i]);
            row.emplace_back(tr.norm_error[i]);
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

Table ode_table(const ExperimentConfig& cfg, const OdeRunResult& result)
{
    const int d1 = cfg.model.d1();
    Table table;
    table.columns = {"t"};
    for (const auto& c : indexed_columns("q", d1)) table.columns.push_back(c);
    for (const auto& c : indexed_columns("Q", d1)) table.columns.push_back(c);
    for (std::size_t i = 0; i < result.t.size(); ++i) {
        std::vector<Cell> row;
        row.emplace_back(result.t[i]);
        for (int j = 0; j < d1; ++j) row.emplace_back(result.q[i][j]);
        for (int j = 0; j < d1; ++j) row.emplace_back(result.Q[i][j]);
        table.rows.push_back(std::move(row));
    }
    return table;
}

void run_pde_mode(const ExperimentConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    const PdeResult result = run_density_evolution(cfg.model, cfg.pde, cfg.quadrature);
    const int d1 = cfg.model.d1();

    Table table;
    table.columns = {"t"};
    for (const auto& c : indexed_columns("q", d1)) table.columns.push_back(c);
    table.columns.push_back("r");
    table.columns.push_back("mass_drift");
    table.columns.push_back("min_density");
    const PdeTrace& tr = result.trace;
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        std::vector<Cell> row;
        row.emplace_back(tr.t[i]);
        for (int j = 0; j < d1; ++j) row.emplace_back(tr.q[i][j]);
        row.emplace_back(tr.r[i]);
        row.emplace_back(tr.mass_drift[i]);
        row.emplace_back(tr.min_density[i]);
        table.rows.push_back(std::move(row));
    }

    MetaBlock meta = base_meta(cfg, seconds_since(t0), false);
    meta.add("n_steps", std::to_string(tr.n_steps));
    write_table_file(cfg.output.path, cfg.output.format, meta, table);

    if (!cfg.output.density_path.empty()) {
        const std::size_t n_slabs = result.u_weights.size();
        Table dens;
        dens.columns = {"w"};
        for (std::size_t k = 0; k < n_slabs; ++k)
            dens.columns.push_back("density_" + std::to_string(k));
        for (std::size_t j = 0; j < result.w_centers.size(); ++j) {
            std::vector<Cell> row;
            row.emplace_back(result.w_centers[j]);
            for (std::size_t k = 0; k < n_slabs; ++k)
                row.emplace_back(result.density[k * result.w_centers.size() + j]);
            dens.rows.push_back(std::move(row));
        }
        MetaBlock dmeta = base_meta(cfg, seconds_since(t0), false);
        dmeta.add("content", "final conditional density per feature-loading slab");
        std::string nodes, weights;
        for (std::size_t k = 0; k < n_slabs; ++k) {
            if (k > 0) {
                nodes += "; ";
                weights += ' ';
            }
            for (int j = 0; j < d1; ++j) {
                if (j > 0) nodes += ' ';
                nodes += format_double(result.u_nodes[k * d1 + j]);
            }
            weights += format_double(result.u_weights[k]);
        }
        dmeta.add("u_nodes", nodes);
        dmeta.add("u_weights", weights);
        write_table_file(cfg.output.density_path, cfg.output.format, dmeta, dens);
    }
}

void run_fixed_points_mode(const ExperimentConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    Table table;
    MetaBlock extra;
    extra.add("rates", closed_form_eligible(cfg) ? "closed_form" : "quadrature");
    if (cfg.model.d1() == 1) {
        const auto points =
            fixed_points_scalar(scalar_rate(cfg), 0.0, 1.0, cfg.fixed_points.resolution);
        table.columns = {"Q", "slope", "stability"};
        for (const auto& fp : points)
            table.rows.push_back({Cell(fp.Q), Cell(fp.slope), Cell(to_string(fp.stability))});
        try {
            extra.add("trainability_threshold_m2",
                      format_double(trainability_threshold(cfg.model, cfg.quadrature)));
        } catch (const numeric_error&) {
            extra.add("trainability_threshold_m2", "(none; zero overlap never destabilizes)");
        }
    } else {
        const auto points = fixed_points_planar(planar_rate(cfg), cfg.fixed_points.grid);
        table.columns = {"Q_1", "Q_2", "eig_real_1", "eig_real_2", "stability"};
        for (const auto& fp : points)
            table.rows.push_back({Cell(fp.Q[0]), Cell(fp.Q[1]), Cell(fp.eig_real[0]),
                                  Cell(fp.eig_real[1]), Cell(to_string(fp.stability))});
    }
    MetaBlock meta = base_meta(cfg, seconds_since(t0), false);
    for (auto& e : extra.entries) meta.entries.push_back(std::move(e));
    write_table_file(cfg.output.path, cfg.output.format, meta, table);
}

void run_basins_mode(const ExperimentConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    BasinOptions opts;
    opts.grid = cfg.basins.grid;
    opts.t_max = cfg.basins.t_max;
    opts.dt = cfg.basins.dt;
    opts.settle_tol = cfg.basins.settle_tol;
    opts.fp_grid = cfg.fixed_points.grid;
    const BasinMap map = basin_map(planar_rate(cfg), opts);

    Table table;
    table.columns = {"Q1_0", "Q2_0", "label", "t_converge"};
    for (int i = 0; i < map.grid; ++i)
        for (int j = 0; j < map.grid; ++j) {
            const double Q1 = (i + 0.5) / map.grid, Q2 = (j + 0.5) / map.grid;
            const std::size_t cell = static_cast<std::size_t>(i) * map.grid + j;
            table.rows.push_back(
                {Cell(Q1), Cell(Q2), Cell(map.label[cell]), Cell(map.convergence_time[cell])});
        }

    MetaBlock meta = base_meta(cfg, seconds_since(t0), false);
    for (std::size_t k = 0; k < map.fixed_points.size(); ++k) {
        const PlanarFixedPoint& fp = map.fixed_points[k];
        meta.add("fixed_point_" + std::to_string(k),
                 format_double(fp.Q[0]) + " " + format_double(fp.Q[1]) + " " +
                     to_string(fp.stability));
    }
    meta.add("area_feature1", format_double(map.area_fraction[0]));
    meta.add("area_feature2", format_double(map.area_fraction[1]));
    meta.add("area_origin", format_double(map.origin_fraction));
    meta.add("unresolved_cells", std::to_string(map.unresolved));

    const double area1 = map.area_fraction[0], area2 = map.area_fraction[1];
    const char* rel = area1 < area2 ? "<" : (area1 > area2 ? ">" : "=");
    meta.add("basin_areas", "feature1 " + std::string(rel) + " feature2 (" +
                                format_double(area1) + " vs " + format_double(area2) + ")");
    write_table_file(cfg.output.path, cfg.output.format, meta, table);
}

void run_noise_sweep_mode(const ExperimentConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    const NoiseSweepResult result = noise_robustness_sweep(
        cfg.model.laws[0].moments(), cfg.model.tau, cfg.model.m, cfg.model.noise.kind,
        cfg.noise_sweep.eta_max, cfg.noise_sweep.n_eta, cfg.noise_sweep.q_floor,
        cfg.noise_sweep.jump_tol);

    Table table;
    table.columns = {"eta", "recovers", "Q_star"};
    for (const SweepPoint& p : result.points)
        table.rows.push_back({Cell(p.eta), Cell(static_cast<int>(p.exists)), Cell(p.Q)});

    MetaBlock meta = base_meta(cfg, seconds_since(t0), false);
    meta.add("noise_kind", cfg.model.noise.kind == NoiseModel::Kind::independent
                               ? "independent"
                               : "anticorrelated");
    meta.add("eta_critical", format_double(result.eta_critical));
    write_table_file(cfg.output.path, cfg.output.format, meta, table);
}

} // namespace

bool closed_form_eligible(const ExperimentConfig& cfg)
{
    const ModelParams& mp = cfg.model;
    if (mp.activation.kind != Activation::Kind::quadratic) return false;
    if (mp.centering != Centering::zero) return false;
    const int d1 = mp.d1();
    if (mp.noise.kind == NoiseModel::Kind::none) return d1 <= 2;
    if (d1 != 1) return false;
    if (mp.noise.kind != NoiseModel::Kind::independent &&
        mp.noise.kind != NoiseModel::Kind::anticorrelated)
        return false;
    return std::abs(mp.laws[0].moments().m2 - 1.0) <= 1e-9;
}

std::function<double(double)> scalar_rate(const ExperimentConfig& cfg)
{
    if (cfg.model.d1() != 1)
        throw config_error("scalar rate needs exactly one feature law");
    if (cfg.ode.rates != OdeSection::Rates::quadrature && closed_form_eligible(cfg)) {
        const MomentTriple mom = cfg.model.laws[0].moments();
        if (cfg.model.noise.kind == NoiseModel::Kind::none)
            return [mom, tau = cfg.model.tau, m = cfg.model.m,
                    variant = cfg.ode.variant](double Q) {
                return squared_overlap_rate(Q, mom, tau, m, variant);
            };
        return [mom, tau = cfg.model.tau, m = cfg.model.m, eta = cfg.model.noise.eta,
                kind = cfg.model.noise.kind](double Q) {
            return squared_overlap_rate_noisy(Q, eta, kind, mom, tau, m);
        };
    }
    return [params = cfg.model, quad = cfg.quadrature](double Q) {
        const double q = std::sqrt(std::min(std::max(Q, 0.0), 1.0));
        const double dq = overlap_rhs({q}, params, quad)[0];
        return 2.0 * q * dq;
    };
}

PlanarRhs planar_rate(const ExperimentConfig& cfg)
{
    if (cfg.model.d1() != 2)
        throw config_error("planar rate needs exactly two feature laws");
    if (cfg.ode.rates != OdeSection::Rates::quadrature && closed_form_eligible(cfg)) {
        const MomentTriple m1 = cfg.model.laws[0].moments(), m2 = cfg.model.laws[1].moments();
        return [m1, m2, tau = cfg.model.tau, m = cfg.model.m](double Q1, double Q2) {
            return squared_overlap_rate_two(Q1, Q2, m1, m2, tau, m);
        };
    }
    return [params = cfg.model, quad = cfg.quadrature](double Q1, double Q2) {
        double a = std::max(Q1, 0.0), b = std::max(Q2, 0.0);
        const double total = a + b;
        if (total > 1.0) {
            a /= total * (1.0 + 1e-14);
            b /= total * (1.0 + 1e-14);
        }
        const std::vector<double> q = {std::sqrt(a), std::sqrt(b)};
        const std::vector<double> dq = overlap_rhs(q, params, quad);
        return std::array<double, 2>{2.0 * q[0] * dq[0], 2.0 * q[1] * dq[1]};
    };
}

OdeRunResult run_ode(const ExperimentConfig& cfg)
{
    const RateSystem sys = build_system(cfg);
    const int d1 = cfg.model.d1();

    std::vector<double> x0(cfg.ode.q0);
    if (sys.closed)
        for (double& v : x0) v *= v;

    OdeOptions opts;
    opts.t_max = cfg.ode.t_max;
    opts.dt = cfg.ode.dt;
    opts.record_dt = cfg.ode.record_dt;
    opts.clamp = sys.clamp;
    const OdeRhs rhs = [&sys](double, const std::vector<double>& x, std::vector<double>& dx) {
        sys.f(x, dx);
    };
    const Trajectory traj = integrate_rk4(rhs, std::move(x0), opts);

    OdeRunResult out;
    out.t = traj.t;
    out.clamp_events = traj.clamp_events;
    out.used_closed_form = sys.closed;
    out.q.resize(traj.x.size());
    out.Q.resize(traj.x.size());
    for (std::size_t i = 0; i < traj.x.size(); ++i) {
        out.q[i].resize(d1);
        out.Q[i].resize(d1);
        for (int j = 0; j < d1; ++j) {
            if (sys.closed) {
                const double Q = std::max(traj.x[i][j], 0.0);
                out.Q[i][j] = Q;
                out.q[i][j] = (cfg.ode.q0[j] < 0.0 ? -1.0 : 1.0) * std::sqrt(Q);
            } else {
                out.q[i][j] = traj.x[i][j];
                out.Q[i][j] = traj.x[i][j] * traj.x[i][j];
            }
        }
    }
    return out;
}

std::vector<SimTrace> run_simulations(const ExperimentConfig& cfg)
{
    const std::size_t n_seeds = cfg.simulate.seeds.size();
    std::vector<SimTrace> traces(n_seeds);
    std::vector<std::exception_ptr> errors(n_seeds);

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned n_threads = static_cast<unsigned>(
        std::min<std::size_t>(hw, n_seeds));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_seeds) return;
            try {
                traces[i] = run_training(cfg.model, cfg.simulate.single(cfg.simulate.seeds[i]),
                                         cfg.quadrature);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    return traces;
}

CompareResult run_compare(const ExperimentConfig& cfg)
{
    const int d1 = cfg.model.d1();
    const std::vector<SimTrace> traces = run_simulations(cfg);
    for (const SimTrace& tr : traces)
        if (tr.t.size() != traces[0].t.size())
            throw numeric_error("compare: seeds produced mismatched record grids");

    CompareResult out;
    out.t = traces[0].t;
    out.n_seeds = static_cast<int>(traces.size());
    const std::size_t n_rec = out.t.size();

    // the limit ODE started from the simulation's initial overlap, sampled
    // exactly on the simulation record grid
    const RateSystem sys = build_system(cfg);
    out.used_closed_form = sys.closed;
    std::vector<double> state(d1, 0.0);
    if (cfg.simulate.init.kind == SimInit::Kind::directed)
        for (int j = 0; j < d1; ++j)
            state[j] = sys.closed ? cfg.simulate.init.Q0[j] : std::sqrt(cfg.simulate.init.Q0[j]);

    out.Q_ode.assign(n_rec, std::vector<double>(d1));
    out.Q_sim_mean.assign(n_rec, std::vector<double>(d1));
    out.Q_sim_stderr.assign(n_rec, std::vector<double>(d1));

    for (std::size_t i = 0; i < n_rec; ++i) {
        if (i > 0) {
            const double span = out.t[i] - out.t[i - 1];
            const long n_sub = std::max(1L, std::lround(span / cfg.ode.dt));
            const double h = span / n_sub;
            for (long s = 0; s < n_sub; ++s) rk4_step(sys, state, h);
        }
        for (int j = 0; j < d1; ++j)
            out.Q_ode[i][j] =
                sys.closed ? std::max(state[j], 0.0) : state[j] * state[j];

        for (int j = 0; j < d1; ++j) {
            double mean = 0.0;
            for (const SimTrace& tr : traces) mean += tr.q[i][j] * tr.q[i][j];
            mean /= out.n_seeds;
            double var = 0.0;
            for (const SimTrace& tr : traces) {
                const double Q = tr.q[i][j] * tr.q[i][j];
                var += (Q - mean) * (Q - mean);
            }
            out.Q_sim_mean[i][j] = mean;
            out.Q_sim_stderr[i][j] =
                out.n_seeds > 1 ? std::sqrt(var / (out.n_seeds - 1) / out.n_seeds) : 0.0;
        }
    }
    return out;
}

void run_experiment(const ExperimentConfig& cfg)
{
    switch (cfg.mode) {
    case RunMode::simulate: {
        const auto t0 = std::chrono::steady_clock::now();
        const auto traces = run_simulations(cfg);
        MetaBlock meta = base_meta(cfg, seconds_since(t0), true);
        write_table_file(cfg.output.path, cfg.output.format, meta, simulate_table(cfg, traces));
        return;
    }
    case RunMode::ode: {
        const auto t0 = std::chrono::steady_clock::now();
        const OdeRunResult result = run_ode(cfg);
        MetaBlock meta = base_meta(cfg, seconds_since(t0), false);
        meta.add("rates", result.used_closed_form ? "closed_form" : "quadrature");
        meta.add("clamp_events", std::to_string(result.clamp_events));
        write_table_file(cfg.output.path, cfg.output.format, meta, ode_table(cfg, result));
        return;
    }
    case RunMode::pde: run_pde_mode(cfg); return;
    case RunMode::fixed_points: run_fixed_points_mode(cfg); return;
    case RunMode::basins: run_basins_mode(cfg); return;
    case RunMode::noise_sweep: run_noise_sweep_mode(cfg); return;
    case RunMode::compare: {
        const auto t0 = std::chrono::steady_clock::now();
        const CompareResult result = run_compare(cfg);
        const int d1 = cfg.model.d1();
        Table table;
        table.columns = {"t"};
        for (const auto& c : indexed_columns("Q_ode", d1)) table.columns.push_back(c);
        for (const auto& c : indexed_columns("Q_sim_mean", d1)) table.columns.push_back(c);
        for (const auto& c : indexed_columns("Q_sim_stderr", d1)) table.columns.push_back(c);
        for (std::size_t i = 0; i < result.t.size(); ++i) {
            std::vector<Cell> row;
            row.emplace_back(result.t[i]);
            for (int j = 0; j < d1; ++j) row.emplace_back(result.Q_ode[i][j]);
            for (int j = 0; j < d1; ++j) row.emplace_back(result.Q_sim_mean[i][j]);
            for (int j = 0; j < d1; ++j) row.emplace_back(result.Q_sim_stderr[i][j]);
            table.rows.push_back(std::move(row));
        }
        MetaBlock meta = base_meta(cfg, seconds_since(t0), true);
        meta.add("n_seeds", std::to_string(result.n_seeds));
        meta.add("rates", result.used_closed_form ? "closed_form" : "quadrature");
        write_table_file(cfg.output.path, cfg.output.format, meta, table);
        return;
    }
    }
    throw config_error("unhandled run mode");
}

} // namespace cldyn
