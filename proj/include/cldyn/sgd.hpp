#ifndef CLDYN_SGD_HPP
#define CLDYN_SGD_HPP

#include <cstdint>
#include <vector>

#include "cldyn/data_model.hpp"
#include "cldyn/model.hpp"
#include "cldyn/quadrature.hpp"

namespace cldyn {

/** Initial weight vector: uniform on the sphere |w| = sqrt(n), or directed
 *  with exact squared overlap Q0_j onto feature j and the remaining mass on
 *  a random direction orthogonal to all features. */
struct SimInit {
    enum class Kind { random, directed };
    Kind kind = Kind::random;
    std::vector<double> Q0;
};

struct SimConfig {
    int n = 4000;            // input dimension
    double t_max = 10.0;     // in units of steps / n
    SimInit init;
    int record_stride = 0;   // steps between snapshots; 0 = max(1, n/100)
    std::uint64_t seed = 1;
};

struct SimTrace {
    std::vector<double> t;
    std::vector<std::vector<double>> q; // signed overlaps col_j . w / n
    std::vector<double> r;              // w . phi(w) / n
    std::vector<double> norm_error;     // | |w|^2 / n - 1 |
};

/** One-pass mini-batch training of the normalized linear probe: per step a
 *  fresh batch of view pairs, the contrastive update
 *
 *    w~ = w - tau/(2 m sqrt(n)) sum_b [ f12_b x2_b + f21_b x1_b ] - (tau/n) phi(w),
 *    f12_b = -2 (sigma(z1_b) - ybar1) sigma'(z2_b),  z_l = w . x_l / sqrt(n),
 *
 *  followed by projection back to |w| = sqrt(n). Snapshots are taken every
 *  record_stride steps at t = step / n, plus the final state. The quad
 *  argument is only used for population centering. */
SimTrace run_training(const ModelParams& params, const SimConfig& config,
                      const QuadratureSpec& quad = {});

/** Pre-normalization update for one batch, exposed for verification. */
std::vector<double> gradient_step(const std::vector<double>& w, const ViewPair& views,
                                  const ModelParams& params, double ybar1, double ybar2);

/** Rescale to |w| = sqrt(n); throws numeric_error on a zero vector. */
void normalize_to_sphere(std::vector<double>& w);

struct OrderParams {
    std::vector<double> q;
    double r = 0.0;
};
OrderParams empirical_order_params(const std::vector<double>& w, const FeatureBasis& basis,
                                   const Prior& prior);

} // namespace cldyn

#endif
