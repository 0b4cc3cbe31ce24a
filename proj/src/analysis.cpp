#include "cldyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cldyn/errors.hpp"
#include "cldyn/expectations.hpp"
#include "cldyn/ode.hpp"

namespace cldyn {

const char* to_string(Stability s)
{
    switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    default: return "marginal";
    }
}

namespace {

Stability classify_slope(double slope, double marginal_tol)
{
    if (slope < -marginal_tol) return Stability::stable;
    if (slope > marginal_tol) return Stability::unstable;
    return Stability::marginal;
}

} // namespace

std::vector<ScalarFixedPoint> fixed_points_scalar(const std::function<double(double)>& rhs,
                                                  double lo, double hi, int resolution,
                                                  double marginal_tol)
{
    if (!(hi > lo)) throw config_error("fixed_points_scalar: need hi > lo");
    if (resolution < 2) throw config_error("fixed_points_scalar: resolution too small");

    const double span = hi - lo;
    const double zero_tol = 1e-14;
    std::vector<double> roots;

    double x_prev = lo, f_prev = rhs(lo);
    if (std::abs(f_prev) <= zero_tol) roots.push_back(lo);
    for (int i = 1; i <= resolution; ++i) {
        const double x = lo + span * i / resolution;
        const double f = rhs(x);
        if (std::abs(f) <= zero_tol) {
            roots.push_back(x);
        } else if (f_prev * f < 0.0) {
            double a = x_prev, b = x, fa = f_prev;
            for (int it = 0; it < 100; ++it) {
                double mid = 0.5 * (a + b);
                double fm = rhs(mid);
                if (fm == 0.0) {
                    a = b = mid;
                    break;
                }
                if (fa * fm < 0.0)
                    b = mid;
                else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x_prev = x;
        f_prev = f;
    }

    std::sort(roots.begin(), roots.end());
    const double dedupe = span * 1e-9;
    std::vector<ScalarFixedPoint> out;
    const double h = span * 1e-7;
    for (double root : roots) {
        if (!out.empty() && root - out.back().Q < dedupe) continue;
        ScalarFixedPoint fp;
        fp.Q = root;
        fp.slope = (rhs(root + h) - rhs(root - h)) / (2.0 * h);
        fp.stability = classify_slope(fp.slope, marginal_tol);
        out.push_back(fp);
    }
    return out;
}

std::vector<PlanarFixedPoint> fixed_points_planar(const PlanarRhs& rhs, int grid,
                                                  double marginal_tol)
{
    if (grid < 2) throw config_error("fixed_points_planar: grid too small");

    auto newton = [&](double x, double y, bool& ok) -> std::array<double, 2> {
        ok = false;
        for (int it = 0; it < 80; ++it) {
            const auto f = rhs(x, y);
            if (std::abs(f[0]) < 1e-13 && std::abs(f[1]) < 1e-13) {
                ok = std::isfinite(x) && std::isfinite(y);
                break;
            }
            const double hx = 1e-7 * std::max(1.0, std::abs(x));
            const double hy = 1e-7 * std::max(1.0, std::abs(y));
            const auto fxp = rhs(x + hx, y), fxm = rhs(x - hx, y);
            const auto fyp = rhs(x, y + hy), fym = rhs(x, y - hy);
            const double j00 = (fxp[0] - fxm[0]) / (2 * hx), j01 = (fyp[0] - fym[0]) / (2 * hy);
            const double j10 = (fxp[1] - fxm[1]) / (2 * hx), j11 = (fyp[1] - fym[1]) / (2 * hy);
            const double det = j00 * j11 - j01 * j10;
            if (!std::isfinite(det) || std::abs(det) < 1e-300) break;
            const double dx = (f[0] * j11 - f[1] * j01) / det;
            const double dy = (j00 * f[1] - j10 * f[0]) / det;
            x -= dx;
            y -= dy;
            if (!std::isfinite(x) || !std::isfinite(y) || std::abs(x) > 10 || std::abs(y) > 10)
                break;
        }
        return {x, y};
    };

    std::vector<PlanarFixedPoint> out;
    for (int i = 0; i <= grid; ++i) {
        for (int j = 0; j <= grid - i; ++j) {
            bool ok = false;
            auto p = newton(static_cast<double>(i) / grid, static_cast<double>(j) / grid, ok);
            if (!ok) continue;
            // clip roundoff and keep simplex interior points only
            for (double& v : p)
                if (v < 0.0 && v > -1e-9) v = 0.0;
            if (p[0] < 0.0 || p[1] < 0.0 || p[0] + p[1] > 1.0 + 1e-9) continue;
            // Newton's endpoint scatters along near-marginal directions, so
            // merge generously; distinct equilibria of these rate fields are
            // never this close.
            bool dup = false;
            for (const auto& fp : out)
                dup = dup || (std::abs(fp.Q[0] - p[0]) < 1e-5 && std::abs(fp.Q[1] - p[1]) < 1e-5);
            if (dup) continue;

            PlanarFixedPoint fp;
            fp.Q = p;
            const double hx = 1e-6, hy = 1e-6;
            const auto fxp = rhs(p[0] + hx, p[1]), fxm = rhs(p[0] - hx, p[1]);
            const auto fyp = rhs(p[0], p[1] + hy), fym = rhs(p[0], p[1] - hy);
            const double j00 = (fxp[0] - fxm[0]) / (2 * hx), j01 = (fyp[0] - fym[0]) / (2 * hy);
            const double j10 = (fxp[1] - fxm[1]) / (2 * hx), j11 = (fyp[1] - fym[1]) / (2 * hy);
            const double tr = j00 + j11;
            const double det = j00 * j11 - j01 * j10;
            const double disc = tr * tr - 4.0 * det;
            if (disc >= 0.0) {
                const double root = std::sqrt(disc);
                fp.eig_real = {0.5 * (tr - root), 0.5 * (tr + root)};
            } else {
                fp.eig_real = {0.5 * tr, 0.5 * tr};
            }
            const double worst = std::max(fp.eig_real[0], fp.eig_real[1]);
            if (worst < -marginal_tol)
                fp.stability = Stability::stable;
            else if (worst > marginal_tol)
                fp.stability = Stability::unstable;
            else
                fp.stability = Stability::marginal;
            out.push_back(fp);
        }
    }
    std::sort(out.begin(), out.end(), [](const PlanarFixedPoint& a, const PlanarFixedPoint& b) {
        return a.Q[0] + a.Q[1] < b.Q[0] + b.Q[1];
    });
    return out;
}

double trainability_threshold(const ModelParams& params, const QuadratureSpec& quad)
{
    ModelParams at_origin = params;
    at_origin.laws = {HiddenLaw::gaussian(1.0)}; // drops out at zero overlap
    const DriftDiffusion dd = drift_diffusion({0.0}, at_origin, quad);
    if (!(dd.fprime_sym < 0.0))
        throw numeric_error("trainability_threshold: zero-overlap state never destabilizes "
                            "for this activation/noise combination");
    return 1.0 - dd.lambda / (params.tau * dd.fprime_sym);
}

BasinMap basin_map(const PlanarRhs& rhs, const BasinOptions& opts)
{
    if (opts.grid < 1) throw config_error("basin_map: grid must be positive");
    if (!(opts.dt > 0.0) || !(opts.t_max > 0.0))
        throw config_error("basin_map: dt and t_max must be positive");

    BasinMap map;
    map.grid = opts.grid;
    map.fixed_points = fixed_points_planar(rhs, opts.fp_grid);
    const std::size_t n_cells = static_cast<std::size_t>(opts.grid) * opts.grid;
    map.label.assign(n_cells, BasinMap::label_outside);
    map.convergence_time.assign(n_cells, std::numeric_limits<double>::quiet_NaN());

    // Recovery threshold: half the largest stable level. When no stable
    // state sits away from the origin, nothing counts as recovered and
    // converged cells all fall back to the origin label.
    double top_stable = 0.0;
    for (const auto& fp : map.fixed_points)
        if (fp.stability == Stability::stable)
            top_stable = std::max({top_stable, fp.Q[0], fp.Q[1]});
    const double recovered_above = top_stable > 0.0
                                       ? 0.5 * top_stable
                                       : std::numeric_limits<double>::infinity();

    const long n_steps = std::lround(opts.t_max / opts.dt);
    long inside = 0;

    for (int i = 0; i < opts.grid; ++i) {
        for (int j = 0; j < opts.grid; ++j) {
            double x = (i + 0.5) / opts.grid;
            double y = (j + 0.5) / opts.grid;
            if (x + y > 1.0) continue;
            ++inside;

            bool converged = false;
            double t_conv = opts.t_max;
            for (long step = 0; step < n_steps; ++step) {
                const auto k1 = rhs(x, y);
                if (std::abs(k1[0]) < opts.settle_tol && std::abs(k1[1]) < opts.settle_tol) {
                    converged = true;
                    t_conv = step * opts.dt;
                    break;
                }
                const auto k2 = rhs(x + 0.5 * opts.dt * k1[0], y + 0.5 * opts.dt * k1[1]);
                const auto k3 = rhs(x + 0.5 * opts.dt * k2[0], y + 0.5 * opts.dt * k2[1]);
                const auto k4 = rhs(x + opts.dt * k3[0], y + opts.dt * k3[1]);
                x += opts.dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
                y += opts.dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
                if (x < 0.0) x = 0.0;
                if (y < 0.0) y = 0.0;
                const double sum = x + y;
                if (sum > 1.0) {
                    x /= sum;
                    y /= sum;
                }
            }
            if (!converged) {
                const auto r = rhs(x, y);
                converged = std::abs(r[0]) < opts.settle_tol && std::abs(r[1]) < opts.settle_tol;
            }

            int label = BasinMap::label_unresolved;
            if (converged) {
                const double top = std::max(x, y);
                if (top <= recovered_above)
                    label = BasinMap::label_origin;
                else if (x > y)
                    label = BasinMap::label_feature1;
                else if (y > x)
                    label = BasinMap::label_feature2;
                // exact tie: stays unresolved, never silently assigned
            }
            const std::size_t cell = static_cast<std::size_t>(i) * opts.grid + j;
            map.label[cell] = label;
            map.convergence_time[cell] = t_conv;
            switch (label) {
            case BasinMap::label_feature1: map.area_fraction[0] += 1.0; break;
            case BasinMap::label_feature2: map.area_fraction[1] += 1.0; break;
            case BasinMap::label_origin: map.origin_fraction += 1.0; break;
            default: ++map.unresolved; break;
            }
        }
    }
    if (inside > 0) {
        map.area_fraction[0] /= static_cast<double>(inside);
        map.area_fraction[1] /= static_cast<double>(inside);
        map.origin_fraction /= static_cast<double>(inside);
    }
    return map;
}

NoiseSweepResult noise_robustness_sweep(const MomentTriple& mom, double tau, int m,
                                        NoiseModel::Kind kind, double eta_max, int n_eta,
                                        double q_floor, double jump_tol, int refine_rounds)
{
    if (n_eta < 2) throw config_error("noise sweep: need at least two grid points");
    if (!(eta_max > 0.0)) throw config_error("noise sweep: eta_max must be positive");

    auto recovery_level = [&](double eta) -> SweepPoint {
        auto rate = [&](double Q) { return squared_overlap_rate_noisy(Q, eta, kind, mom, tau, m); };
        SweepPoint pt;
        pt.eta = eta;
        for (const auto& fp : fixed_points_scalar(rate, 0.0, 1.0, 4000)) {
            if (fp.stability == Stability::stable && fp.Q > q_floor) {
                pt.exists = true;
                pt.Q = std::max(pt.Q, fp.Q);
            }
        }
        return pt;
    };

    NoiseSweepResult result;
    for (int i = 0; i < n_eta; ++i)
        result.points.push_back(recovery_level(eta_max * i / (n_eta - 1)));

    // refine visible jumps in the recovery level by inserting midpoints
    for (int round = 0; round < refine_rounds; ++round) {
        std::vector<SweepPoint> extra;
        for (std::size_t i = 0; i + 1 < result.points.size(); ++i) {
            const auto& a = result.points[i];
            const auto& b = result.points[i + 1];
            const bool jump = (a.exists && b.exists && std::abs(a.Q - b.Q) > jump_tol) ||
                              (a.exists != b.exists && b.eta - a.eta > eta_max / (4.0 * n_eta));
            if (jump) extra.push_back(recovery_level(0.5 * (a.eta + b.eta)));
        }
        if (extra.empty()) break;
        result.points.insert(result.points.end(), extra.begin(), extra.end());
        std::sort(result.points.begin(), result.points.end(),
                  [](const SweepPoint& a, const SweepPoint& b) { return a.eta < b.eta; });
    }

    // critical noise level by bisection on the first disappearance
    result.eta_critical = std::numeric_limits<double>::quiet_NaN();
    if (!result.points.front().exists) {
        result.eta_critical = 0.0;
        return result;
    }
    for (std::size_t i = 0; i + 1 < result.points.size(); ++i) {
        if (result.points[i].exists && !result.points[i + 1].exists) {
            double lo = result.points[i].eta, hi = result.points[i + 1].eta;
            for (int it = 0; it < 60 && hi - lo > 1e-9; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (recovery_level(mid).exists)
                    lo = mid;
                else
                    hi = mid;
            }
            result.eta_critical = 0.5 * (lo + hi);
            break;
        }
    }
    return result;
}

} // namespace cldyn
