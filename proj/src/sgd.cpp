#include "cldyn/sgd.hpp"

#include <cmath>

#include "cldyn/errors.hpp"
#include "cldyn/expectations.hpp"
#include "cldyn/kernels.hpp"

namespace cldyn {

namespace {

std::vector<double> initial_weights(const FeatureBasis& basis, const SimInit& init, Rng& rng)
{
    const int n = basis.n, d1 = basis.d1;
    std::vector<double> w(n);
    if (init.kind == SimInit::Kind::random) {
        rng.fill_normals(w.data(), w.size());
        normalize_to_sphere(w);
        return w;
    }

    if (static_cast<int>(init.Q0.size()) != d1)
        throw config_error("directed init: Q0 must have one entry per feature");
    double total = 0.0;
    for (double v : init.Q0) {
        if (v < 0.0) throw config_error("directed init: Q0 entries must be non-negative");
        total += v;
    }
    if (total > 1.0 + 1e-12) throw config_error("directed init: sum of Q0 must not exceed 1");

    // residual direction orthogonal to every feature column
    const double s = std::sqrt(std::max(0.0, 1.0 - total));
    std::fill(w.begin(), w.end(), 0.0);
    if (s > 0.0) {
        rng.fill_normals(w.data(), w.size());
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < d1; ++j) {
                const double* uj = basis.col(j);
                axpy(-dot(uj, w.data(), n) / n, uj, w.data(), n);
            }
        const double norm = std::sqrt(dot(w.data(), w.data(), n));
        if (!(norm > 0.0)) throw numeric_error("directed init: degenerate residual direction");
        const double scale = s * std::sqrt(static_cast<double>(n)) / norm;
        for (double& v : w) v *= scale;
    }
    for (int j = 0; j < d1; ++j) axpy(std::sqrt(init.Q0[j]), basis.col(j), w.data(), n);
    return w;
}

} // namespace

void normalize_to_sphere(std::vector<double>& w)
{
    const int n = static_cast<int>(w.size());
    const double norm = std::sqrt(dot(w.data(), w.data(), n));
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw numeric_error("normalize_to_sphere: weight vector has zero or non-finite norm");
    const double scale = std::sqrt(static_cast<double>(n)) / norm;
    for (double& v : w) v *= scale;
}

OrderParams empirical_order_params(const std::vector<double>& w, const FeatureBasis& basis,
                                   const Prior& prior)
{
    if (static_cast<int>(w.size()) != basis.n)
        throw config_error("empirical_order_params: weight size must match the basis dimension");
    OrderParams out;
    out.q.resize(basis.d1);
    for (int j = 0; j < basis.d1; ++j)
        out.q[j] = dot(basis.col(j), w.data(), basis.n) / basis.n;
    if (prior.kind != Prior::Kind::none) {
        double acc = 0.0;
        for (double v : w) acc += v * prior.apply(v);
        out.r = acc / basis.n;
    }
    return out;
}

std::vector<double> gradient_step(const std::vector<double>& w, const ViewPair& views,
                                  const ModelParams& params, double ybar1, double ybar2)
{
    const int n = views.n, m = views.m;
    if (static_cast<int>(w.size()) != n)
        throw config_error("gradient_step: weight size must match the view dimension");
    if (m != params.m)
        throw config_error("gradient_step: view count must match the batch size");

    const double inv_root_n = 1.0 / std::sqrt(static_cast<double>(n));
    const double coef = params.tau / (2.0 * params.m) * inv_root_n;

    std::vector<double> next = w;
    if (params.prior.kind != Prior::Kind::none)
        for (int i = 0; i < n; ++i) next[i] -= params.tau / n * params.prior.apply(w[i]);
    for (int b = 0; b < m; ++b) {
        const double* x1 = views.view1(b);
        const double* x2 = views.view2(b);
        const double z1 = dot(w.data(), x1, n) * inv_root_n;
        const double z2 = dot(w.data(), x2, n) * inv_root_n;
        const KernelPair f = contrast_kernels(params.activation, z1, z2, ybar1, ybar2);
        axpy(-coef * f.f12, x2, next.data(), n);
        axpy(-coef * f.f21, x1, next.data(), n);
    }
    return next;
}

SimTrace run_training(const ModelParams& params, const SimConfig& config,
                      const QuadratureSpec& quad)
{
    params.validate();
    const int d1 = params.d1();
    if (config.n < d1 + 1)
        throw config_error("run_training: input dimension must exceed the feature count");
    if (!(config.t_max > 0.0)) throw config_error("run_training: t_max must be positive");
    if (config.record_stride < 0) throw config_error("run_training: record_stride must be >= 0");

    const int n = config.n, m = params.m;
    Rng rng(config.seed);
    const FeatureBasis basis = make_feature_basis(n, d1, rng);
    std::vector<double> w = initial_weights(basis, config.init, rng);
    normalize_to_sphere(w);

    const long steps = std::lround(config.t_max * n);
    const long stride = config.record_stride > 0 ? config.record_stride : std::max(1, n / 100);
    const double inv_root_n = 1.0 / std::sqrt(static_cast<double>(n));
    const double coef = params.tau / (2.0 * m) * inv_root_n;
    const bool fast_path = params.noise.kind == NoiseModel::Kind::none;
    const bool has_prior = params.prior.kind != Prior::Kind::none;
    const bool population = params.centering == Centering::population;

    SimTrace trace;
    auto record = [&](long k) {
        const OrderParams op = empirical_order_params(w, basis, params.prior);
        trace.t.push_back(static_cast<double>(k) / n);
        trace.q.push_back(op.q);
        trace.r.push_back(op.r);
        trace.norm_error.push_back(std::abs(dot(w.data(), w.data(), n) / n - 1.0));
    };

    Batch batch;
    batch.m = m;
    batch.n = n;
    batch.d1 = d1;
    batch.x.resize(static_cast<std::size_t>(m) * n);
    batch.c.resize(static_cast<std::size_t>(m) * d1);
    ViewPair views;
    std::vector<double> kern(m), z1v(m), z2v(m);
    std::vector<double> proj(static_cast<std::size_t>(m) * d1); // col_j . ambient_b
    std::vector<double> wu(d1), q_emp(d1), delta(n);

    for (long k = 0; k < steps; ++k) {
        if (k % stride == 0) record(k);

        double ybar1 = 0.0, ybar2 = 0.0;
        if (population) {
            for (int j = 0; j < d1; ++j) q_emp[j] = dot(basis.col(j), w.data(), n) / n;
            double qq = 0.0;
            for (double v : q_emp) qq += v * v;
            if (qq > 1.0)
                for (double& v : q_emp) v /= std::sqrt(qq) * (1.0 + 1e-15);
            auto y = population_centering(q_emp, params, quad);
            ybar1 = y.first;
            ybar2 = y.second;
        }

        if (fast_path) {
            // Noiseless views: both views equal the input, so the planted
            // component can be tracked through scalars. Each sample costs
            // one ambient fill, d1+1 dots, and one update accumulation, all
            // executed back to back while the sample is still cache-hot;
            // the drawn randomness matches the generic path exactly.
            for (int j = 0; j < d1; ++j) wu[j] = dot(basis.col(j), w.data(), n) * inv_root_n;
            std::fill(delta.begin(), delta.end(), 0.0);
            for (int b = 0; b < m; ++b) {
                double* cb = batch.hidden(b);
                for (int j = 0; j < d1; ++j) cb[j] = params.laws[j].sample(rng);
                double* ab = batch.sample(b);
                rng.fill_normals(ab, static_cast<std::size_t>(n));

                double zw, t0;
                dot2(ab, w.data(), basis.col(0), n, zw, t0);
                double z = zw * inv_root_n;
                for (int j = 0; j < d1; ++j) {
                    const double t = j == 0 ? t0 : dot(basis.col(j), ab, n);
                    proj[static_cast<std::size_t>(b) * d1 + j] = t;
                    z += (cb[j] * inv_root_n - t / n) * wu[j];
                }
                const KernelPair f = contrast_kernels(params.activation, z, z, ybar1, ybar2);
                kern[b] = f.f12 + f.f21;
                axpy(kern[b], ab, delta.data(), n);
            }

            if (has_prior)
                for (int i = 0; i < n; ++i) w[i] -= params.tau / n * params.prior.apply(w[i]);
            axpy(-coef, delta.data(), w.data(), n);
            for (int j = 0; j < d1; ++j) {
                double acc = 0.0;
                for (int b = 0; b < m; ++b)
                    acc += kern[b] * (batch.hidden(b)[j] * inv_root_n -
                                      proj[static_cast<std::size_t>(b) * d1 + j] / n);
                axpy(-coef * acc, basis.col(j), w.data(), n);
            }
        } else {
            fill_batch(basis, params.laws, m, rng, batch);
            fill_views(batch, params.noise, rng, views);
            for (int b = 0; b < m; ++b) {
                z1v[b] = dot(w.data(), views.view1(b), n) * inv_root_n;
                z2v[b] = dot(w.data(), views.view2(b), n) * inv_root_n;
            }
            // the prior sees the pre-update weights; the data term no longer
            // reads w once the projections are known
            if (has_prior)
                for (int i = 0; i < n; ++i) w[i] -= params.tau / n * params.prior.apply(w[i]);
            for (int b = 0; b < m; ++b) {
                const KernelPair f =
                    contrast_kernels(params.activation, z1v[b], z2v[b], ybar1, ybar2);
                axpy(-coef * f.f12, views.view2(b), w.data(), n);
                axpy(-coef * f.f21, views.view1(b), w.data(), n);
            }
        }
        normalize_to_sphere(w);
    }
    record(steps);
    return trace;
}

} // namespace cldyn
