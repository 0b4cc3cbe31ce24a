#ifndef CLDYN_DATA_MODEL_HPP
#define CLDYN_DATA_MODEL_HPP

#include <vector>

#include "cldyn/model.hpp"
#include "cldyn/rng.hpp"

namespace cldyn {

/** Planted feature directions: d1 columns of length n with U^T U = n I,
 *  i.e. each column has squared norm n (sqrt(n)-scaled orthonormal frame). */
struct FeatureBasis {
    int n = 0;
    int d1 = 0;
    std::vector<double> cols; // column-major, column j at cols[j*n .. j*n+n)

    double* col(int j) { return cols.data() + static_cast<std::size_t>(j) * n; }
    const double* col(int j) const { return cols.data() + static_cast<std::size_t>(j) * n; }
};

/** Random sqrt(n)-scaled orthonormal frame via Gram-Schmidt on Gaussian
 *  columns (one re-orthogonalization pass for numerical orthogonality). */
FeatureBasis make_feature_basis(int n, int d1, Rng& rng);

/** A mini-batch of spiked inputs x_b = U c_b / sqrt(n) + a_b where c_b has
 *  independent coordinates from the hidden laws and a_b is an ambient
 *  Gaussian with the feature subspace exactly projected out, so that
 *  U^T x_b = sqrt(n) c_b holds to rounding. */
struct Batch {
    int m = 0;
    int n = 0;
    int d1 = 0;
    std::vector<double> x; // row-major, sample b at x[b*n .. b*n+n)
    std::vector<double> c; // row-major, sample b at c[b*d1 .. b*d1+d1)

    double* sample(int b) { return x.data() + static_cast<std::size_t>(b) * n; }
    const double* sample(int b) const { return x.data() + static_cast<std::size_t>(b) * n; }
    double* hidden(int b) { return c.data() + static_cast<std::size_t>(b) * d1; }
    const double* hidden(int b) const { return c.data() + static_cast<std::size_t>(b) * d1; }
};

/** Draw order per sample: the d1 hidden coordinates, then the n ambient
 *  normals. Samples are drawn in batch order. */
Batch make_batch(const FeatureBasis& basis, const std::vector<HiddenLaw>& laws, int m, Rng& rng);

/** Same as make_batch but reuses the caller's buffers (hot loops). */
void fill_batch(const FeatureBasis& basis, const std::vector<HiddenLaw>& laws, int m, Rng& rng,
                Batch& batch);

/** Two noisy views of each batch sample, x^(l) = x + gamma^(l). */
struct ViewPair {
    int m = 0;
    int n = 0;
    std::vector<double> x1;
    std::vector<double> x2;

    const double* view1(int b) const { return x1.data() + static_cast<std::size_t>(b) * n; }
    const double* view2(int b) const { return x2.data() + static_cast<std::size_t>(b) * n; }
};

/** Apply the view-noise law. Draw order per sample per coordinate: the first
 *  view's noise, then (only for independent or correlated kinds) the second
 *  draw. Anticorrelated noise uses gamma2 = -gamma1 exactly, so
 *  x1 + x2 = 2x holds to rounding. */
ViewPair make_views(const Batch& batch, const NoiseModel& noise, Rng& rng);

/** Same as make_views but reuses the caller's buffers (hot loops). */
void fill_views(const Batch& batch, const NoiseModel& noise, Rng& rng, ViewPair& views);

} // namespace cldyn

#endif
