#ifndef CLDYN_KERNELS_HPP
#define CLDYN_KERNELS_HPP

#include <cstring>

namespace cldyn {

#if defined(__GNUC__) || defined(__clang__)

namespace detail {
typedef double v4df __attribute__((vector_size(32)));

inline v4df load4(const double* p)
{
    v4df v;
    std::memcpy(&v, p, sizeof(v));
    return v;
}

inline void store4(double* p, v4df v) { std::memcpy(p, &v, sizeof(v)); }
} // namespace detail

/** Dense inner product. A plain running sum is a single rounding-ordered
 *  dependency chain, which caps the loop at one fused multiply-add per
 *  add-latency; four explicit SIMD partial sums (sixteen lanes) pipeline
 *  freely while the summation order — hence the result, bit for bit — stays
 *  fixed for a given length. The pointers may alias each other only because
 *  dot never stores (e.g. a squared norm is fine). */
inline double dot(const double* a, const double* b, int n)
{
    using detail::load4;
    detail::v4df c0 = {}, c1 = {}, c2 = {}, c3 = {};
    int i = 0;
    for (; i + 16 <= n; i += 16) {
        c0 += load4(a + i) * load4(b + i);
        c1 += load4(a + i + 4) * load4(b + i + 4);
        c2 += load4(a + i + 8) * load4(b + i + 8);
        c3 += load4(a + i + 12) * load4(b + i + 12);
    }
    const detail::v4df c = (c0 + c1) + (c2 + c3);
    double s = (c[0] + c[1]) + (c[2] + c[3]);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

/** Two inner products against a shared left factor in one pass: ab = a.b and
 *  ac = a.c. Saves re-streaming `a` when a sample must be projected onto both
 *  the weight vector and a feature column. */
inline void dot2(const double* a, const double* b, const double* c, int n, double& ab, double& ac)
{
    using detail::load4;
    detail::v4df p0 = {}, p1 = {}, q0 = {}, q1 = {};
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        const detail::v4df a0 = load4(a + i), a1 = load4(a + i + 4);
        p0 += a0 * load4(b + i);
        p1 += a1 * load4(b + i + 4);
        q0 += a0 * load4(c + i);
        q1 += a1 * load4(c + i + 4);
    }
    const detail::v4df p = p0 + p1, q = q0 + q1;
    double sp = (p[0] + p[1]) + (p[2] + p[3]);
    double sq = (q[0] + q[1]) + (q[2] + q[3]);
    for (; i < n; ++i) {
        sp += a[i] * b[i];
        sq += a[i] * c[i];
    }
    ab = sp;
    ac = sq;
}

/** y += alpha * x over disjoint arrays. */
inline void axpy(double alpha, const double* __restrict x, double* __restrict y, int n)
{
    using detail::load4;
    using detail::store4;
    const detail::v4df av = {alpha, alpha, alpha, alpha};
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        store4(y + i, load4(y + i) + av * load4(x + i));
        store4(y + i + 4, load4(y + i + 4) + av * load4(x + i + 4));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

#else

inline double dot(const double* a, const double* b, int n)
{
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        c0 += a[i + 0] * b[i + 0];
        c1 += a[i + 1] * b[i + 1];
        c2 += a[i + 2] * b[i + 2];
        c3 += a[i + 3] * b[i + 3];
    }
    double s = (c0 + c1) + (c2 + c3);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

inline void dot2(const double* a, const double* b, const double* c, int n, double& ab, double& ac)
{
    double p0 = 0.0, p1 = 0.0, q0 = 0.0, q1 = 0.0;
    int i = 0;
    for (; i + 2 <= n; i += 2) {
        p0 += a[i] * b[i];
        p1 += a[i + 1] * b[i + 1];
        q0 += a[i] * c[i];
        q1 += a[i + 1] * c[i + 1];
    }
    double sp = p0 + p1, sq = q0 + q1;
    for (; i < n; ++i) {
        sp += a[i] * b[i];
        sq += a[i] * c[i];
    }
    ab = sp;
    ac = sq;
}

inline void axpy(double alpha, const double* __restrict x, double* __restrict y, int n)
{
    for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

#endif

} // namespace cldyn

#endif
