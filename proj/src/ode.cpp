#include "cldyn/ode.hpp"

#include <cmath>

#include "cldyn/errors.hpp"

namespace cldyn {

double squared_overlap_rate(double Q, const MomentTriple& mom, double tau, int m,
                            DriftVariant variant)
{
    const double k = mom.m4 - 3.0, n = mom.m2 - 1.0, b = mom.m6 - 15.0;
    const double drift_bracket = variant == DriftVariant::standard
                                     ? Q * Q * k + 3.0 * Q * (1.0 - 2.0 * Q) * n
                                     : Q * Q * k + 3.0 * Q * n;
    const double t6 = Q * Q * Q * b + 15.0 * Q * Q * (1.0 - Q) * k +
                      45.0 * Q * (1.0 - Q) * (1.0 - Q) * n + 15.0;
    return 8.0 * tau * (1.0 - Q) * drift_bracket - 16.0 * tau * tau / m * Q * t6;
}

std::array<double, 2> squared_overlap_rate_two(double Q1, double Q2, const MomentTriple& mom1,
                                               const MomentTriple& mom2, double tau, int m)
{
    const double k1 = mom1.m4 - 3.0, n1 = mom1.m2 - 1.0, b1 = mom1.m6 - 15.0;
    const double k2 = mom2.m4 - 3.0, n2 = mom2.m2 - 1.0, b2 = mom2.m6 - 15.0;

    // Shared sixth-moment bracket of the residual pre-activation, grouped so
    // that exchanging the two features maps the expression onto itself term
    // by term: swapping the arguments then yields bitwise-identical values.
    auto own6 = [](double Q, double k, double n, double b) {
        const double s = 1.0 - Q;
        return b * Q * Q * Q + 15.0 * k * Q * Q * s + 45.0 * n * Q * s * s;
    };
    auto pair6 = [](double Qi, double ki, double Qj, double nj) {
        return 15.0 * (ki * nj) * ((Qi * Qi) * Qj);
    };
    const double t6 = ((own6(Q1, k1, n1, b1) + own6(Q2, k2, n2, b2)) +
                       ((pair6(Q1, k1, Q2, n2) + pair6(Q2, k2, Q1, n1)) +
                        90.0 * (n1 * n2) * ((Q1 * Q2) * (1.0 - (Q1 + Q2))))) +
                      15.0;

    auto component = [&](double Qa, double Qb, double ka, double na, double kb, double nb) {
        const double own = ka * Qa + 3.0 * na * (1.0 - 2.0 * Qa) + 3.0 * na * nb * Qb;
        const double other = kb * Qb + 3.0 * nb * (1.0 - 2.0 * Qb) + 3.0 * na * nb * Qa;
        return 8.0 * tau * Qa * (1.0 - Qa) * own - 8.0 * tau * Qa * Qb * other -
               16.0 * tau * tau / m * Qa * t6;
    };
    return {component(Q1, Q2, k1, n1, k2, n2), component(Q2, Q1, k2, n2, k1, n1)};
}

double squared_overlap_rate_noisy(double Q, double eta, NoiseModel::Kind kind,
                                  const MomentTriple& mom, double tau, int m)
{
    if (std::abs(mom.m2 - 1.0) > 1e-9)
        throw config_error("noisy overlap rate: the closed form requires m2 = 1");
    const double k = mom.m4 - 3.0, b = mom.m6 - 15.0;
    const double t6 = Q * Q * Q * b + 15.0 * Q * Q * (1.0 - Q) * k + 15.0;
    const double t4 = Q * Q * k + 3.0;
    const double e2 = eta * eta, e3 = e2 * eta, e4 = e2 * e2;

    double bracket;
    switch (kind) {
    case NoiseModel::Kind::independent:
        bracket = (2.0 + eta) * t6 + (13.0 * eta + 7.0 * e2) * t4 + 18.0 * e2 + 12.0 * e3 + 3.0 * e4;
        break;
    case NoiseModel::Kind::anticorrelated:
        bracket = 2.0 * t6 + (2.0 * e2 - 4.0 * eta) * t4 + 6.0 * e2 - 12.0 * e3 + 30.0 * e4;
        break;
    default:
        throw config_error("noisy overlap rate: closed forms exist for independent and anticorrelated noise only");
    }
    return 8.0 * tau * (1.0 - Q) * Q * Q * k - 8.0 * tau * tau / m * Q * bracket;
}

Trajectory integrate_rk4(const OdeRhs& rhs, std::vector<double> x0, const OdeOptions& opts)
{
    if (!(opts.t_max > 0.0)) throw config_error("integrate_rk4: t_max must be positive");
    if (!(opts.dt > 0.0)) throw config_error("integrate_rk4: dt must be positive");
    if (!(opts.record_dt > 0.0)) throw config_error("integrate_rk4: record_dt must be positive");

    // lay the snapshot grid first, then split each interval into whole steps
    const long n_records = std::max(1l, std::lround(opts.t_max / opts.record_dt));
    const double rec_dt = opts.t_max / static_cast<double>(n_records);
    const long n_sub = std::max(1l, std::lround(rec_dt / opts.dt));
    const double dt = rec_dt / static_cast<double>(n_sub);

    const std::size_t dim = x0.size();
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

    Trajectory out;
    out.t.reserve(n_records + 1);
    out.x.reserve(n_records + 1);
    out.t.push_back(0.0);
    out.x.push_back(x0);

    std::vector<double> x = std::move(x0);
    for (long rec = 0; rec < n_records; ++rec) {
        for (long sub = 0; sub < n_sub; ++sub) {
            const double t = (rec * n_sub + sub) * dt;
            rhs(t, x, k1);
            for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
            rhs(t + 0.5 * dt, tmp, k2);
            for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
            rhs(t + 0.5 * dt, tmp, k3);
            for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + dt * k3[i];
            rhs(t + dt, tmp, k4);
            for (std::size_t i = 0; i < dim; ++i)
                x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (opts.clamp && opts.clamp(x)) ++out.clamp_events;
        }
        for (double v : x)
            if (!std::isfinite(v)) throw numeric_error("integrate_rk4: state became non-finite");
        out.t.push_back((rec + 1) * rec_dt);
        out.x.push_back(x);
    }
    return out;
}

std::function<bool(std::vector<double>&)> clamp_squared_simplex()
{
    return [](std::vector<double>& x) {
        bool changed = false;
        double sum = 0.0;
        for (double& v : x) {
            if (v < 0.0) {
                v = 0.0;
                changed = true;
            }
            sum += v;
        }
        if (sum > 1.0) {
            for (double& v : x) v /= sum;
            changed = true;
        }
        return changed;
    };
}

std::function<bool(std::vector<double>&)> clamp_unit_ball()
{
    return [](std::vector<double>& x) {
        double qq = 0.0;
        for (double v : x) qq += v * v;
        if (qq <= 1.0) return false;
        const double scale = 1.0 / std::sqrt(qq);
        for (double& v : x) v *= scale;
        return true;
    };
}

} // namespace cldyn
