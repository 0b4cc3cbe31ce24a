#include "cldyn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cldyn/errors.hpp"

namespace cldyn {

namespace {

/** Eigenvalues of a symmetric tridiagonal matrix together with the first
 *  component of each eigenvector, via the implicit-shift QL iteration.
 *  `d` holds the diagonal and is overwritten with the eigenvalues; `e` holds
 *  the off-diagonal in e[0..n-2]; `z` starts as (1,0,...,0) and ends as the
 *  first row of the eigenvector matrix. */
void tridiagonal_eigen(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z)
{
    const int n = static_cast<int>(d.size());
    e.resize(n);
    e[n - 1] = 0.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw numeric_error("gauss_hermite: QL iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
                if (r == 0.0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

} // namespace

QuadratureRule gauss_hermite(int n)
{
    if (n < 1) throw config_error("gauss_hermite: need at least one node");

    // Jacobi matrix of the probabilists' Hermite polynomials: zero diagonal,
    // off-diagonal sqrt(k). The measure already has unit total mass, so the
    // weights are the squared first eigenvector components.
    std::vector<double> d(n, 0.0), e(n, 0.0), z(n, 0.0);
    for (int k = 1; k < n; ++k) e[k - 1] = std::sqrt(static_cast<double>(k));
    z[0] = 1.0;
    tridiagonal_eigen(d, e, z);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = d[order[i]];
        rule.weights[i] = z[order[i]] * z[order[i]];
    }

    // Enforce the exact symmetry of the rule; QL leaves O(eps) asymmetries.
    for (int i = 0, j = n - 1; i < j; ++i, --j) {
        double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.weights[i] = rule.weights[j] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;

    double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
    for (double& w : rule.weights) w /= total;
    return rule;
}

} // namespace cldyn
