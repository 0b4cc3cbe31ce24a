#include "cldyn/expectations.hpp"

#include <cmath>

#include "cldyn/errors.hpp"

namespace cldyn {

namespace {

constexpr double kBoundarySwitch = 1e-3; // residual scale below which the
                                         // derivative average uses differences
constexpr double kFdStep = 1e-4;

/** Tensor grid over the hidden coordinates: weight, c.q, and the c values. */
struct HiddenGrid {
    int d1 = 0;
    std::vector<double> weight;
    std::vector<double> dot;
    std::vector<double> cvals; // combo k feature j at cvals[k*d1+j]
};

HiddenGrid build_hidden_grid(const std::vector<double>& q, const std::vector<HiddenLaw>& laws,
                             int n_c)
{
    const int d1 = static_cast<int>(laws.size());
    std::vector<QuadratureRule> rules;
    rules.reserve(d1);
    std::size_t combos = 1;
    for (const auto& law : laws) {
        rules.push_back(law.quadrature(n_c));
        combos *= rules.back().nodes.size();
    }

    HiddenGrid grid;
    grid.d1 = d1;
    grid.weight.resize(combos);
    grid.dot.resize(combos);
    grid.cvals.resize(combos * d1);

    std::vector<std::size_t> idx(d1, 0);
    for (std::size_t k = 0; k < combos; ++k) {
        double w = 1.0, dot = 0.0;
        for (int j = 0; j < d1; ++j) {
            double cj = rules[j].nodes[idx[j]];
            w *= rules[j].weights[idx[j]];
            dot += q[j] * cj;
            grid.cvals[k * d1 + j] = cj;
        }
        grid.weight[k] = w;
        grid.dot[k] = dot;
        for (int j = d1 - 1; j >= 0; --j) {
            if (++idx[j] < rules[j].nodes.size()) break;
            idx[j] = 0;
        }
    }
    return grid;
}

/** Paired view-noise nodes (gamma1, gamma2) with weights. */
struct NoiseGrid {
    std::vector<double> g1, g2, weight;
};

NoiseGrid build_noise_grid(const NoiseModel& noise, int n_gamma)
{
    NoiseGrid grid;
    if (noise.kind == NoiseModel::Kind::none) {
        grid.g1 = {0.0};
        grid.g2 = {0.0};
        grid.weight = {1.0};
        return grid;
    }
    const double s = std::sqrt(noise.eta);
    const QuadratureRule gh = gauss_hermite(n_gamma);
    const int n = static_cast<int>(gh.nodes.size());
    const double rho = noise.cross_correlation();

    if (noise.kind == NoiseModel::Kind::anticorrelated || std::abs(std::abs(rho) - 1.0) < 1e-15) {
        // degenerate pair: gamma2 = rho * gamma1 exactly
        for (int i = 0; i < n; ++i) {
            double g = s * gh.nodes[i];
            grid.g1.push_back(g);
            grid.g2.push_back(rho * g);
            grid.weight.push_back(gh.weights[i]);
        }
        return grid;
    }

    const double cross = std::sqrt(1.0 - rho * rho);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            grid.g1.push_back(s * gh.nodes[i]);
            grid.g2.push_back(s * (rho * gh.nodes[i] + cross * gh.nodes[j]));
            grid.weight.push_back(gh.weights[i] * gh.weights[j]);
        }
    }
    return grid;
}

double residual_scale(const std::vector<double>& q)
{
    double qq = 0.0;
    for (double v : q) qq += v * v;
    if (qq > 1.0 + 1e-12) throw numeric_error("overlap vector lies outside the unit ball");
    return std::sqrt(std::max(0.0, 1.0 - qq));
}

} // namespace

double projected_preactivation(const std::vector<double>& q, const std::vector<double>& c,
                               double e, double gamma)
{
    if (q.size() != c.size()) throw config_error("projected_preactivation: size mismatch");
    double dot = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) dot += q[j] * c[j];
    return dot + residual_scale(q) * e + gamma;
}

KernelPair contrast_kernels(const Activation& act, double th1, double th2,
                            double ybar1, double ybar2)
{
    KernelPair k;
    k.f12 = -2.0 * (act.value(th1) - ybar1) * act.deriv(th2);
    k.f21 = -2.0 * (act.value(th2) - ybar2) * act.deriv(th1);
    return k;
}

std::pair<double, double> population_centering(const std::vector<double>& q,
                                               const ModelParams& params,
                                               const QuadratureSpec& quad)
{
    if (static_cast<int>(q.size()) != params.d1())
        throw config_error("population_centering: overlap size must match the feature count");
    const double s = residual_scale(q);
    const HiddenGrid hidden = build_hidden_grid(q, params.laws, quad.n_c);
    const NoiseGrid ngrid = build_noise_grid(params.noise, quad.n_gamma);
    const QuadratureRule egh = gauss_hermite(quad.n_e);

    double y1 = 0.0, y2 = 0.0;
    for (std::size_t k = 0; k < hidden.weight.size(); ++k) {
        for (std::size_t ie = 0; ie < egh.nodes.size(); ++ie) {
            const double base = hidden.dot[k] + s * egh.nodes[ie];
            const double wke = hidden.weight[k] * egh.weights[ie];
            for (std::size_t ig = 0; ig < ngrid.weight.size(); ++ig) {
                const double w = wke * ngrid.weight[ig];
                y1 += w * params.activation.value(base + ngrid.g1[ig]);
                y2 += w * params.activation.value(base + ngrid.g2[ig]);
            }
        }
    }
    return {y1, y2};
}

DriftDiffusion drift_diffusion(const std::vector<double>& q, const ModelParams& params,
                               const QuadratureSpec& quad)
{
    const int d1 = params.d1();
    if (static_cast<int>(q.size()) != d1)
        throw config_error("drift_diffusion: overlap size must match the feature count");
    if (quad.n_e < 2 || quad.n_c < 1 || quad.n_gamma < 1)
        throw config_error("drift_diffusion: quadrature sizes out of range");

    const double s = residual_scale(q);
    const bool near_boundary = s < kBoundarySwitch;

    double ybar1 = 0.0, ybar2 = 0.0;
    if (params.centering == Centering::population) {
        auto y = population_centering(q, params, quad);
        ybar1 = y.first;
        ybar2 = y.second;
    }

    const HiddenGrid hidden = build_hidden_grid(q, params.laws, quad.n_c);
    const NoiseGrid ngrid = build_noise_grid(params.noise, quad.n_gamma);
    const QuadratureRule egh = gauss_hermite(quad.n_e);
    const Activation& act = params.activation;

    std::vector<double> s_cf(d1, 0.0); // <c_j (f12+f21)>
    double s_e = 0.0;                  // <e (f12+f21)>
    double s_fd = 0.0;                 // centered-difference derivative average
    double s_11 = 0.0, s_22 = 0.0, s_12 = 0.0;

    for (std::size_t k = 0; k < hidden.weight.size(); ++k) {
        const double* cvals = hidden.cvals.data() + k * d1;
        for (std::size_t ie = 0; ie < egh.nodes.size(); ++ie) {
            const double e = egh.nodes[ie];
            const double base = hidden.dot[k] + s * e;
            const double wke = hidden.weight[k] * egh.weights[ie];
            for (std::size_t ig = 0; ig < ngrid.weight.size(); ++ig) {
                const double w = wke * ngrid.weight[ig];
                const double th1 = base + ngrid.g1[ig];
                const double th2 = base + ngrid.g2[ig];
                const KernelPair f = contrast_kernels(act, th1, th2, ybar1, ybar2);
                const double fsum = f.f12 + f.f21;
                for (int j = 0; j < d1; ++j) s_cf[j] += w * cvals[j] * fsum;
                s_e += w * e * fsum;
                s_11 += w * f.f12 * f.f12;
                s_22 += w * f.f21 * f.f21;
                s_12 += w * f.f12 * f.f21;
                if (near_boundary) {
                    const KernelPair fp = contrast_kernels(act, th1 + kFdStep, th2 + kFdStep,
                                                           ybar1, ybar2);
                    const KernelPair fm = contrast_kernels(act, th1 - kFdStep, th2 - kFdStep,
                                                           ybar1, ybar2);
                    s_fd += w * (fp.f12 + fp.f21 - fm.f12 - fm.f21) / (2.0 * kFdStep);
                }
            }
        }
    }

    DriftDiffusion out;
    out.ybar1 = ybar1;
    out.ybar2 = ybar2;
    out.fprime_sym = near_boundary ? s_fd : s_e / s;
    out.g.resize(d1);
    for (int j = 0; j < d1; ++j)
        out.g[j] = 0.5 * params.tau * (s_cf[j] - q[j] * out.fprime_sym);

    const double eta = params.noise.variance();
    const double cross = params.noise.cross_correlation() * eta;
    out.lambda = params.tau * params.tau / (4.0 * params.m) *
                 ((1.0 + eta) * (s_11 + s_22) + 2.0 * (1.0 + cross) * s_12);
    return out;
}

std::vector<double> overlap_rhs(const std::vector<double>& q, const ModelParams& params,
                                const QuadratureSpec& quad)
{
    const DriftDiffusion dd = drift_diffusion(q, params, quad);
    double qg = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) qg += q[j] * dd.g[j];
    std::vector<double> rhs(q.size());
    for (std::size_t j = 0; j < q.size(); ++j)
        rhs[j] = q[j] * (qg - 0.5 * dd.lambda) - dd.g[j];
    return rhs;
}

} // namespace cldyn
