#ifndef CLDYN_MODEL_HPP
#define CLDYN_MODEL_HPP

#include <functional>
#include <string>
#include <vector>

#include "cldyn/quadrature.hpp"
#include "cldyn/rng.hpp"

namespace cldyn {

/** Even moments E[c^2], E[c^4], E[c^6] of a symmetric hidden coordinate. */
struct MomentTriple {
    double m2 = 1.0;
    double m4 = 3.0;
    double m6 = 15.0;
};

/** Throws config_error unless the triple is realizable by a symmetric law
 *  (Cauchy-Schwarz chain m4 >= m2^2, m6 >= m4^2/m2, all positive). */
void validate_moments(const MomentTriple& mom);

/** Pointwise nonlinearity applied to the projected input. */
struct Activation {
    enum class Kind { quadratic, relu, custom };

    Kind kind = Kind::quadratic;
    std::string name = "x^2";
    std::function<double(double)> fn;      // used when kind == custom
    std::function<double(double)> dfn;

    static Activation quadratic();
    static Activation relu();
    static Activation custom(std::string name, std::function<double(double)> f,
                             std::function<double(double)> df);

    double value(double z) const
    {
        switch (kind) {
        case Kind::quadratic: return z * z;
        case Kind::relu: return z > 0.0 ? z : 0.0;
        default: return fn(z);
        }
    }

    /** First derivative; the relu convention at the kink is deriv(0) = 0. */
    double deriv(double z) const
    {
        switch (kind) {
        case Kind::quadratic: return 2.0 * z;
        case Kind::relu: return z > 0.0 ? 1.0 : 0.0;
        default: return dfn(z);
        }
    }
};

/** Symmetric zero-mean law of one hidden coordinate. The planted signal in
 *  each input is a mixture of the feature directions weighted by independent
 *  draws from these laws. */
class HiddenLaw {
public:
    enum class Kind { gaussian, three_point, discrete };

    /** N(0, variance). */
    static HiddenLaw gaussian(double variance);
    /** Mass p/2 at each of +-sqrt(alpha) and 1-p at zero, so the even
     *  moments are (alpha p, alpha^2 p, alpha^3 p). */
    static HiddenLaw three_point(double alpha, double p);
    /** Arbitrary atoms; odd moments up to order five must vanish. */
    static HiddenLaw discrete(std::vector<double> values, std::vector<double> probs);
    /** Symmetric discrete law whose even moments match the triple exactly:
     *  a two-node Gauss rule for the law of c^2 built from (m2, m4, m6),
     *  reflected to +-sqrt(node). Throws config_error when no symmetric law
     *  has those moments. */
    static HiddenLaw from_moments(const MomentTriple& mom);

    Kind kind() const { return kind_; }
    double variance() const { return variance_; }
    double alpha() const { return alpha_; }
    double p() const { return p_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& probs() const { return probs_; }

    MomentTriple moments() const;
    double sample(Rng& rng) const;

    /** Quadrature rule that is exact for expectations against this law:
     *  the atoms themselves for discrete laws, a scaled Gauss-Hermite rule
     *  with n_gauss nodes for the Gaussian. */
    QuadratureRule quadrature(int n_gauss) const;

private:
    HiddenLaw() = default;
    Kind kind_ = Kind::gaussian;
    double variance_ = 1.0;            // gaussian
    double alpha_ = 0.0, p_ = 0.0;     // three_point
    std::vector<double> values_, probs_; // discrete
};

/** Law of the additive noise pair used to make the two views of an input.
 *  Both views receive noise of per-coordinate variance eta; the kinds differ
 *  only in the correlation between the two draws. */
struct NoiseModel {
    enum class Kind { none, independent, anticorrelated, correlated };

    Kind kind = Kind::none;
    double eta = 0.0;
    double rho = 0.0; // only read when kind == correlated

    /** Correlation coefficient between the paired noise draws. */
    double cross_correlation() const
    {
        switch (kind) {
        case Kind::independent: return 0.0;
        case Kind::anticorrelated: return -1.0;
        case Kind::correlated: return rho;
        default: return 0.0;
        }
    }

    double variance() const { return kind == Kind::none ? 0.0 : eta; }

    void validate() const;
};

/** Weight prior entering the update as -(tau/n) phi(w), applied per
 *  coordinate. The closed-form and limiting descriptions of the overlap
 *  dynamics require a linear phi; the density description accepts any. */
struct Prior {
    enum class Kind { none, l2, custom };

    Kind kind = Kind::none;
    double strength = 0.0;                // l2: phi(w) = strength * w
    std::function<double(double)> fn;     // custom phi

    static Prior none() { return Prior{}; }
    static Prior l2(double strength);
    static Prior custom(std::function<double(double)> fn);

    double apply(double w) const
    {
        switch (kind) {
        case Kind::none: return 0.0;
        case Kind::l2: return strength * w;
        default: return fn(w);
        }
    }

    bool is_linear() const { return kind != Kind::custom; }
    /** phi(w) = coef * w for linear priors; throws for custom ones. */
    double linear_coefficient() const;
};

/** Which constant is subtracted inside the contrast kernel. */
enum class Centering { zero, population };

/** Full description of the learning problem: activation, learning rate tau,
 *  batch size m, the planted feature laws, the view-noise law, the prior,
 *  and the centering convention. */
struct ModelParams {
    Activation activation = Activation::quadratic();
    double tau = 0.1;
    int m = 10;
    std::vector<HiddenLaw> laws = {HiddenLaw::gaussian(1.0)};
    NoiseModel noise;
    Prior prior;
    Centering centering = Centering::zero;

    int d1() const { return static_cast<int>(laws.size()); }
    void validate() const;
};

} // namespace cldyn

#endif
