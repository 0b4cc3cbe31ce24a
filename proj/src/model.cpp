#include "cldyn/model.hpp"

#include <cmath>
#include <utility>

#include "cldyn/errors.hpp"

namespace cldyn {

void validate_moments(const MomentTriple& mom)
{
    const double slack = 1e-12;
    if (!(mom.m2 > 0.0)) throw config_error("hidden moments: m2 must be positive");
    if (!(mom.m4 > 0.0) || !(mom.m6 > 0.0))
        throw config_error("hidden moments: m4 and m6 must be positive");
    if (mom.m4 < mom.m2 * mom.m2 * (1.0 - slack) - slack)
        throw config_error("hidden moments: need m4 >= m2^2");
    if (mom.m6 < mom.m4 * mom.m4 / mom.m2 * (1.0 - slack) - slack)
        throw config_error("hidden moments: need m6 >= m4^2/m2");
}

Activation Activation::quadratic()
{
    Activation a;
    a.kind = Kind::quadratic;
    a.name = "x^2";
    return a;
}

Activation Activation::relu()
{
    Activation a;
    a.kind = Kind::relu;
    a.name = "relu";
    return a;
}

Activation Activation::custom(std::string name, std::function<double(double)> f,
                              std::function<double(double)> df)
{
    if (!f || !df) throw config_error("custom activation needs both the function and its derivative");
    Activation a;
    a.kind = Kind::custom;
    a.name = std::move(name);
    a.fn = std::move(f);
    a.dfn = std::move(df);
    return a;
}

HiddenLaw HiddenLaw::gaussian(double variance)
{
    if (!(variance > 0.0)) throw config_error("gaussian hidden law: variance must be positive");
    HiddenLaw law;
    law.kind_ = Kind::gaussian;
    law.variance_ = variance;
    return law;
}

HiddenLaw HiddenLaw::three_point(double alpha, double p)
{
    if (!(alpha > 0.0)) throw config_error("three-point hidden law: alpha must be positive");
    if (!(p > 0.0) || p > 1.0) throw config_error("three-point hidden law: need 0 < p <= 1");
    HiddenLaw law;
    law.kind_ = Kind::three_point;
    law.alpha_ = alpha;
    law.p_ = p;
    return law;
}

HiddenLaw HiddenLaw::discrete(std::vector<double> values, std::vector<double> probs)
{
    if (values.empty() || values.size() != probs.size())
        throw config_error("discrete hidden law: values and probs must be non-empty and equal-sized");
    double total = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (probs[i] < 0.0) throw config_error("discrete hidden law: negative probability");
        total += probs[i];
        scale = std::max(scale, std::abs(values[i]));
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw config_error("discrete hidden law: probabilities must sum to 1");
    double m1 = 0, m2 = 0, m3 = 0, m5 = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double v = values[i], pr = probs[i];
        m1 += pr * v;
        m2 += pr * v * v;
        m3 += pr * v * v * v;
        m5 += pr * v * v * v * v * v;
    }
    const double tol = 1e-9 * std::max(1.0, scale * scale * scale * scale * scale);
    if (std::abs(m1) > tol || std::abs(m3) > tol || std::abs(m5) > tol)
        throw config_error("discrete hidden law: odd moments up to order 5 must vanish");
    if (!(m2 > 0.0)) throw config_error("discrete hidden law: second moment must be positive");
    HiddenLaw law;
    law.kind_ = Kind::discrete;
    law.values_ = std::move(values);
    law.probs_ = std::move(probs);
    return law;
}

HiddenLaw HiddenLaw::from_moments(const MomentTriple& mom)
{
    validate_moments(mom);
    // Moments of y = c^2 are (m2, m4, m6). A two-node Gauss rule for the
    // y-law reproduces them exactly; reflecting each node y to +-sqrt(y)
    // with half its weight gives a symmetric law for c itself.
    const double mu1 = mom.m2, mu2 = mom.m4, mu3 = mom.m6;
    const double b1 = mu2 - mu1 * mu1;

    std::vector<double> values, probs;
    if (b1 <= 1e-14 * mu2) {
        const double root = std::sqrt(mu1);
        values = {-root, root};
        probs = {0.5, 0.5};
    } else {
        const double a0 = mu1;
        const double a1 = (mu3 - 2.0 * a0 * mu2 + a0 * a0 * mu1) / b1;
        const double half_gap = 0.5 * std::sqrt((a0 - a1) * (a0 - a1) + 4.0 * b1);
        const double y_hi = 0.5 * (a0 + a1) + half_gap;
        double y_lo = 0.5 * (a0 + a1) - half_gap;
        if (y_lo < 0.0) {
            if (y_lo < -1e-12 * y_hi)
                throw config_error("hidden moments: triple is not realizable by a symmetric law");
            y_lo = 0.0;
        }
        double w_hi = b1 / (b1 + (y_hi - a0) * (y_hi - a0));
        double w_lo = b1 / (b1 + (y_lo - a0) * (y_lo - a0));
        const double total = w_hi + w_lo;
        w_hi /= total;
        w_lo /= total;
        const double root_hi = std::sqrt(y_hi);
        if (y_lo <= 1e-12 * y_hi) {
            values = {-root_hi, 0.0, root_hi};
            probs = {0.5 * w_hi, w_lo, 0.5 * w_hi};
        } else {
            const double root_lo = std::sqrt(y_lo);
            values = {-root_hi, -root_lo, root_lo, root_hi};
            probs = {0.5 * w_hi, 0.5 * w_lo, 0.5 * w_lo, 0.5 * w_hi};
        }
    }

    HiddenLaw law = discrete(std::move(values), std::move(probs));
    const MomentTriple got = law.moments();
    const double tol = 1e-9;
    if (std::abs(got.m2 - mom.m2) > tol * mom.m2 || std::abs(got.m4 - mom.m4) > tol * mom.m4 ||
        std::abs(got.m6 - mom.m6) > tol * mom.m6)
        throw config_error("hidden moments: triple is not realizable by a symmetric law");
    return law;
}

MomentTriple HiddenLaw::moments() const
{
    MomentTriple mom;
    switch (kind_) {
    case Kind::gaussian:
        mom.m2 = variance_;
        mom.m4 = 3.0 * variance_ * variance_;
        mom.m6 = 15.0 * variance_ * variance_ * variance_;
        break;
    case Kind::three_point:
        mom.m2 = alpha_ * p_;
        mom.m4 = alpha_ * alpha_ * p_;
        mom.m6 = alpha_ * alpha_ * alpha_ * p_;
        break;
    case Kind::discrete: {
        double m2 = 0, m4 = 0, m6 = 0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            double v2 = values_[i] * values_[i];
            m2 += probs_[i] * v2;
            m4 += probs_[i] * v2 * v2;
            m6 += probs_[i] * v2 * v2 * v2;
        }
        mom = {m2, m4, m6};
        break;
    }
    }
    return mom;
}

double HiddenLaw::sample(Rng& rng) const
{
    switch (kind_) {
    case Kind::gaussian:
        return std::sqrt(variance_) * rng.normal();
    case Kind::three_point: {
        double u = rng.uniform();
        if (u < 0.5 * p_) return std::sqrt(alpha_);
        if (u < p_) return -std::sqrt(alpha_);
        return 0.0;
    }
    case Kind::discrete: {
        double u = rng.uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            acc += probs_[i];
            if (u < acc) return values_[i];
        }
        return values_.back();
    }
    }
    return 0.0;
}

QuadratureRule HiddenLaw::quadrature(int n_gauss) const
{
    QuadratureRule rule;
    switch (kind_) {
    case Kind::gaussian: {
        rule = gauss_hermite(n_gauss);
        double s = std::sqrt(variance_);
        for (double& x : rule.nodes) x *= s;
        break;
    }
    case Kind::three_point: {
        double root = std::sqrt(alpha_);
        if (p_ < 1.0) {
            rule.nodes = {-root, 0.0, root};
            rule.weights = {0.5 * p_, 1.0 - p_, 0.5 * p_};
        } else {
            rule.nodes = {-root, root};
            rule.weights = {0.5, 0.5};
        }
        break;
    }
    case Kind::discrete:
        rule.nodes = values_;
        rule.weights = probs_;
        break;
    }
    return rule;
}

void NoiseModel::validate() const
{
    if (eta < 0.0) throw config_error("noise model: eta must be non-negative");
    if (kind == Kind::correlated && !(rho >= -1.0 && rho <= 1.0))
        throw config_error("noise model: need -1 <= rho <= 1");
    if (kind != Kind::none && !(eta > 0.0))
        throw config_error("noise model: eta must be positive unless the kind is none");
}

Prior Prior::l2(double strength)
{
    Prior p;
    p.kind = Kind::l2;
    p.strength = strength;
    return p;
}

Prior Prior::custom(std::function<double(double)> fn)
{
    if (!fn) throw config_error("custom prior needs a callable");
    Prior p;
    p.kind = Kind::custom;
    p.fn = std::move(fn);
    return p;
}

double Prior::linear_coefficient() const
{
    switch (kind) {
    case Kind::none: return 0.0;
    case Kind::l2: return strength;
    default: throw config_error("prior is not linear; only the density description supports it");
    }
}

void ModelParams::validate() const
{
    if (!(tau > 0.0)) throw config_error("model: tau must be positive");
    if (m < 1) throw config_error("model: batch size m must be at least 1");
    if (laws.empty()) throw config_error("model: need at least one hidden feature law");
    for (const auto& law : laws) validate_moments(law.moments());
    noise.validate();
}

} // namespace cldyn
