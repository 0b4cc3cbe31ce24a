#include "cldyn/pde.hpp"

#include <algorithm>
#include <cmath>

#include "cldyn/errors.hpp"
#include "cldyn/expectations.hpp"

namespace cldyn {

void advance_slab(std::vector<double>& p, const std::vector<double>& gamma_face, double lambda,
                  double dw, double dt)
{
    const int n = static_cast<int>(p.size());
    std::vector<double> flux(n + 1, 0.0);

    // upwind advective fluxes, zero at the domain faces
    for (int f = 1; f < n; ++f)
        flux[f] = gamma_face[f] >= 0.0 ? gamma_face[f] * p[f - 1] : gamma_face[f] * p[f];
    for (int j = 0; j < n; ++j) p[j] -= dt / dw * (flux[j + 1] - flux[j]);

    // explicit centered diffusive fluxes on the advected state
    const double d = 0.5 * lambda;
    for (int f = 1; f < n; ++f) flux[f] = d * (p[f] - p[f - 1]) / dw;
    flux[0] = flux[n] = 0.0;
    for (int j = 0; j < n; ++j) p[j] += dt / dw * (flux[j + 1] - flux[j]);
}

namespace {

struct UGrid {
    int d1 = 0;
    int count = 0;
    std::vector<double> nodes;   // slab k feature j at nodes[k*d1+j]
    std::vector<double> weights; // product weights, sum 1
};

UGrid build_u_grid(int d1, int n_u)
{
    const QuadratureRule gh = gauss_hermite(n_u);
    UGrid grid;
    grid.d1 = d1;
    grid.count = 1;
    for (int j = 0; j < d1; ++j) grid.count *= n_u;
    grid.nodes.resize(static_cast<std::size_t>(grid.count) * d1);
    grid.weights.assign(grid.count, 1.0);
    std::vector<int> idx(d1, 0);
    for (int k = 0; k < grid.count; ++k) {
        for (int j = 0; j < d1; ++j) {
            grid.nodes[static_cast<std::size_t>(k) * d1 + j] = gh.nodes[idx[j]];
            grid.weights[k] *= gh.weights[idx[j]];
        }
        for (int j = d1 - 1; j >= 0; --j) {
            if (++idx[j] < n_u) break;
            idx[j] = 0;
        }
    }
    return grid;
}

} // namespace

PdeResult run_density_evolution(const ModelParams& params, const PdeConfig& config,
                                const QuadratureSpec& quad)
{
    params.validate();
    const int d1 = params.d1();
    if (static_cast<int>(config.q0.size()) != d1)
        throw config_error("density evolution: q0 must have one entry per feature");
    if (!(config.w_max > 0.0)) throw config_error("density evolution: w_max must be positive");
    if (config.n_w < 8) throw config_error("density evolution: n_w too small");
    if (config.n_u < 1) throw config_error("density evolution: n_u must be positive");
    if (!(config.t_max > 0.0) || !(config.record_dt > 0.0))
        throw config_error("density evolution: t_max and record_dt must be positive");
    if (config.dt < 0.0) throw config_error("density evolution: dt must be non-negative");
    if (!(config.cfl > 0.0) || config.cfl > 1.0)
        throw config_error("density evolution: cfl must lie in (0, 1]");

    double q0_sq = 0.0;
    for (double v : config.q0) q0_sq += v * v;
    if (q0_sq > 1.0 + 1e-12)
        throw config_error("density evolution: initial overlaps lie outside the unit ball");

    const UGrid ugrid = build_u_grid(d1, config.n_u);
    const int n_w = config.n_w;
    const double dw = 2.0 * config.w_max / n_w;

    std::vector<double> w_centers(n_w);
    for (int j = 0; j < n_w; ++j) w_centers[j] = -config.w_max + (j + 0.5) * dw;

    // initial condition: P_0(w | u) is normal with mean q0.u and the
    // residual variance 1 - |q0|^2 (a point mass when the overlap is full)
    std::vector<double> density(static_cast<std::size_t>(ugrid.count) * n_w, 0.0);
    const double s2 = std::max(0.0, 1.0 - q0_sq);
    for (int k = 0; k < ugrid.count; ++k) {
        double mu = 0.0;
        for (int j = 0; j < d1; ++j)
            mu += config.q0[j] * ugrid.nodes[static_cast<std::size_t>(k) * d1 + j];
        double* p = density.data() + static_cast<std::size_t>(k) * n_w;
        if (s2 > 1e-12) {
            for (int j = 0; j < n_w; ++j) {
                const double z = w_centers[j] - mu;
                p[j] = std::exp(-0.5 * z * z / s2);
            }
        } else {
            int j = static_cast<int>(std::floor((mu + config.w_max) / dw));
            j = std::clamp(j, 0, n_w - 1);
            p[j] = 1.0;
        }
        double mass = 0.0;
        for (int j = 0; j < n_w; ++j) mass += p[j];
        mass *= dw;
        if (!(mass > 0.0))
            throw numeric_error("density evolution: initial condition has no mass on the grid "
                                "(w_max too small)");
        for (int j = 0; j < n_w; ++j) p[j] /= mass;
    }

    auto order_params = [&](std::vector<double>& q, double& r) {
        std::fill(q.begin(), q.end(), 0.0);
        r = 0.0;
        for (int k = 0; k < ugrid.count; ++k) {
            const double* p = density.data() + static_cast<std::size_t>(k) * n_w;
            double m1 = 0.0, mphi = 0.0;
            for (int j = 0; j < n_w; ++j) {
                m1 += w_centers[j] * p[j];
                if (params.prior.kind != Prior::Kind::none)
                    mphi += w_centers[j] * params.prior.apply(w_centers[j]) * p[j];
            }
            m1 *= dw;
            mphi *= dw;
            const double wt = ugrid.weights[k];
            for (int j = 0; j < d1; ++j)
                q[j] += wt * ugrid.nodes[static_cast<std::size_t>(k) * d1 + j] * m1;
            r += wt * mphi;
        }
    };

    PdeResult result;
    result.u_nodes = ugrid.nodes;
    result.u_weights = ugrid.weights;
    result.w_centers = w_centers;

    std::vector<double> q(d1, 0.0);
    double r = 0.0;
    order_params(q, r);
    result.trace.t.push_back(0.0);
    result.trace.q.push_back(q);
    result.trace.r.push_back(r);
    result.trace.mass_drift.push_back(0.0);
    result.trace.min_density.push_back(0.0);

    std::vector<double> gamma_face(n_w + 1);
    std::vector<double> base_face(n_w + 1);
    std::vector<double> slab(n_w);

    const long n_records = std::max(1l, std::lround(config.t_max / config.record_dt));
    const double rec_dt = config.t_max / static_cast<double>(n_records);

    double t = 0.0;
    double window_drift = 0.0, window_min = 0.0;
    for (long rec = 1; rec <= n_records; ++rec) {
        const double t_target = rec * rec_dt;
        while (t < t_target - 1e-12) {
            order_params(q, r);
            double qq = 0.0;
            for (double v : q) qq += v * v;
            if (qq > 1.0) // roundoff guard; the dynamics keeps |q| <= 1
                for (double& v : q) v /= std::sqrt(qq) * (1.0 + 1e-15);
            const DriftDiffusion dd = drift_diffusion(q, params, quad);

            double qg = 0.0;
            for (int j = 0; j < d1; ++j) qg += q[j] * dd.g[j];
            const double shrink = qg + params.tau * r - 0.5 * dd.lambda;

            for (int f = 0; f <= n_w; ++f) {
                const double wf = -config.w_max + f * dw;
                base_face[f] = wf * shrink - params.tau * params.prior.apply(wf);
            }
            double ug_min = 0.0, ug_max = 0.0;
            for (int k = 0; k < ugrid.count; ++k) {
                double ug = 0.0;
                for (int j = 0; j < d1; ++j)
                    ug += ugrid.nodes[static_cast<std::size_t>(k) * d1 + j] * dd.g[j];
                ug_min = std::min(ug_min, ug);
                ug_max = std::max(ug_max, ug);
            }
            double gamma_max = 0.0;
            for (int f = 0; f <= n_w; ++f)
                gamma_max = std::max(gamma_max, std::max(std::abs(base_face[f] - ug_min),
                                                         std::abs(base_face[f] - ug_max)));

            double dt_step;
            const double adv_limit = gamma_max > 0.0 ? dw / gamma_max : 1e300;
            const double dif_limit = dd.lambda > 0.0 ? dw * dw / dd.lambda : 1e300;
            if (config.dt > 0.0) {
                dt_step = std::min(config.dt, t_target - t);
                if (dt_step > adv_limit || dt_step > dif_limit)
                    throw numeric_error("density evolution: explicit dt violates the stability "
                                        "bound; reduce dt or leave it automatic");
            } else {
                dt_step = std::min(config.cfl * std::min(adv_limit, dif_limit), t_target - t);
            }

            for (int k = 0; k < ugrid.count; ++k) {
                double ug = 0.0;
                for (int j = 0; j < d1; ++j)
                    ug += ugrid.nodes[static_cast<std::size_t>(k) * d1 + j] * dd.g[j];
                for (int f = 0; f <= n_w; ++f) gamma_face[f] = base_face[f] - ug;

                double* p = density.data() + static_cast<std::size_t>(k) * n_w;
                slab.assign(p, p + n_w);
                advance_slab(slab, gamma_face, dd.lambda, dw, dt_step);

                double mass = 0.0, lowest = 0.0;
                for (int j = 0; j < n_w; ++j) {
                    lowest = std::min(lowest, slab[j]);
                    if (slab[j] < 0.0) slab[j] = 0.0;
                    mass += slab[j];
                }
                mass *= dw;
                if (!(mass > 0.0) || !std::isfinite(mass))
                    throw numeric_error("density evolution: slab mass vanished or diverged");
                window_drift = std::max(window_drift, std::abs(mass - 1.0));
                window_min = std::min(window_min, lowest);
                for (int j = 0; j < n_w; ++j) p[j] = slab[j] / mass;
            }
            t += dt_step;
            ++result.trace.n_steps;
        }
        t = t_target;
        order_params(q, r);
        result.trace.t.push_back(t);
        result.trace.q.push_back(q);
        result.trace.r.push_back(r);
        result.trace.mass_drift.push_back(window_drift);
        result.trace.min_density.push_back(window_min);
        window_drift = 0.0;
        window_min = 0.0;
    }

    result.density = std::move(density);
    return result;
}

} // namespace cldyn
