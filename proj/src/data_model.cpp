#include "cldyn/data_model.hpp"

#include <algorithm>
#include <cmath>

#include "cldyn/errors.hpp"
#include "cldyn/kernels.hpp"

namespace cldyn {

FeatureBasis make_feature_basis(int n, int d1, Rng& rng)
{
    if (n < 1) throw config_error("feature basis: dimension must be positive");
    if (d1 < 1 || d1 > n) throw config_error("feature basis: need 1 <= d1 <= n");

    FeatureBasis basis;
    basis.n = n;
    basis.d1 = d1;
    basis.cols.resize(static_cast<std::size_t>(n) * d1);

    const double root_n = std::sqrt(static_cast<double>(n));
    for (int j = 0; j < d1; ++j) {
        double* cj = basis.col(j);
        rng.fill_normals(cj, static_cast<std::size_t>(n));
        // two Gram-Schmidt passes against the finished columns
        for (int pass = 0; pass < 2; ++pass) {
            for (int k = 0; k < j; ++k) {
                const double* ck = basis.col(k);
                axpy(-dot(ck, cj, n) / n, ck, cj, n); // finished columns have norm^2 = n
            }
        }
        double norm = std::sqrt(dot(cj, cj, n));
        if (!(norm > 0.0)) throw numeric_error("feature basis: degenerate column draw");
        for (int i = 0; i < n; ++i) cj[i] *= root_n / norm;
    }
    return basis;
}

void fill_batch(const FeatureBasis& basis, const std::vector<HiddenLaw>& laws, int m, Rng& rng,
                Batch& batch)
{
    const int n = basis.n, d1 = basis.d1;
    if (static_cast<int>(laws.size()) != d1)
        throw config_error("batch: one hidden law per feature column is required");
    if (m < 0) throw config_error("batch: sample count must be nonnegative");

    batch.m = m;
    batch.n = n;
    batch.d1 = d1;
    batch.x.resize(static_cast<std::size_t>(m) * n);
    batch.c.resize(static_cast<std::size_t>(m) * d1);

    const double inv_root_n = 1.0 / std::sqrt(static_cast<double>(n));
    for (int b = 0; b < m; ++b) {
        double* cb = batch.hidden(b);
        for (int j = 0; j < d1; ++j) cb[j] = laws[j].sample(rng);
        double* xb = batch.sample(b);
        rng.fill_normals(xb, static_cast<std::size_t>(n));
        // x = (I - U U^T / n) a + U c / sqrt(n), fused into one correction per column
        for (int j = 0; j < d1; ++j) {
            const double* uj = basis.col(j);
            double proj = dot(uj, xb, n);
            axpy(cb[j] * inv_root_n - proj / n, uj, xb, n);
        }
    }
}

Batch make_batch(const FeatureBasis& basis, const std::vector<HiddenLaw>& laws, int m, Rng& rng)
{
    Batch batch;
    fill_batch(basis, laws, m, rng, batch);
    return batch;
}

void fill_views(const Batch& batch, const NoiseModel& noise, Rng& rng, ViewPair& views)
{
    noise.validate();
    views.m = batch.m;
    views.n = batch.n;
    views.x1 = batch.x;
    views.x2 = batch.x;
    if (noise.kind == NoiseModel::Kind::none) return;

    const double s = std::sqrt(noise.eta);
    const std::size_t total = views.x1.size();
    switch (noise.kind) {
    case NoiseModel::Kind::independent:
        for (std::size_t i = 0; i < total; ++i) {
            views.x1[i] += s * rng.normal();
            views.x2[i] += s * rng.normal();
        }
        break;
    case NoiseModel::Kind::anticorrelated:
        for (std::size_t i = 0; i < total; ++i) {
            double g = s * rng.normal();
            views.x1[i] += g;
            views.x2[i] -= g;
        }
        break;
    case NoiseModel::Kind::correlated: {
        const double cross = std::sqrt(std::max(0.0, 1.0 - noise.rho * noise.rho));
        for (std::size_t i = 0; i < total; ++i) {
            double g1 = rng.normal();
            double g2 = noise.rho * g1 + cross * rng.normal();
            views.x1[i] += s * g1;
            views.x2[i] += s * g2;
        }
        break;
    }
    default: break;
    }
}

ViewPair make_views(const Batch& batch, const NoiseModel& noise, Rng& rng)
{
    ViewPair views;
    fill_views(batch, noise, rng, views);
    return views;
}

} // namespace cldyn
