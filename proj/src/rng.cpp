#include "cldyn/rng.hpp"

#include <cmath>
#include <limits>

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace cldyn {

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr int kLayers = 256;

double gauss_density(double x) { return std::exp(-0.5 * x * x); }

double gauss_tail_area(double r)
{
    // integral of exp(-x^2/2) over [r, inf)
    return std::sqrt(std::acos(-1.0) / 2.0) * std::erfc(r / std::sqrt(2.0));
}

/** Walks the equal-area layer recursion down from tail boundary r and
 *  returns the closure defect at the top (positive when r is too small). */
double layer_closure_defect(double r, detail::ZigguratTables* out)
{
    const double v = r * gauss_density(r) + gauss_tail_area(r);
    double x = r;
    double y = gauss_density(r);
    if (out) {
        out->r = r;
        out->x[0] = v / y;
        out->x[1] = r;
        out->y[0] = 0.0;
        out->y[1] = y;
    }
    for (int i = 2; i < kLayers; ++i) {
        double ynext = y + v / x;
        if (ynext >= 1.0) return 1.0; // layers exhausted early: r too small
        x = std::sqrt(-2.0 * std::log(ynext));
        y = ynext;
        if (out) {
            out->x[i] = x;
            out->y[i] = y;
        }
    }
    if (out) {
        out->x[kLayers] = 0.0;
        out->y[kLayers] = 1.0;
    }
    return (y + v / x) - 1.0;
}

detail::ZigguratTables build_ziggurat()
{
    double lo = 3.0, hi = 4.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (layer_closure_defect(mid, nullptr) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-16) break;
    }
    detail::ZigguratTables t{};
    layer_closure_defect(0.5 * (lo + hi), &t);
    for (int i = 0; i < kLayers; ++i) {
        t.xs[i] = t.x[i] * 0x1.0p-52;
        t.xs[i + kLayers] = -t.xs[i];
        t.thr[i] = t.x[i + 1] / t.x[i] * 0x1.0p52;
        t.thr[i + kLayers] = t.thr[i];
    }
    return t;
}

} // namespace

namespace detail {
const ZigguratTables ziggurat = build_ziggurat();

const ZigguratTables& ziggurat_tables() { return ziggurat; }
} // namespace detail

Rng::Rng(std::uint64_t seed)
{
    // One splitmix chain seeds all five streams, so a single integer pins
    // the full behavior. Each xoshiro state must avoid the all-zero word.
    std::uint64_t state = seed;
    for (auto& word : s_) word = splitmix64(state);
    if (!(s_[0] | s_[1] | s_[2] | s_[3])) s_[0] = 1;
    for (int lane = 0; lane < 4; ++lane) {
        std::uint64_t any = 0;
        for (int w = 0; w < 4; ++w) any |= (f_[4 * w + lane] = splitmix64(state));
        if (!any) f_[lane] = 1;
    }
}

double Rng::fill_edge_case(std::uint64_t b)
{
    const auto& zt = detail::ziggurat;
    const double x = std::abs(static_cast<double>(b >> 12) * zt.xs[b & 511u]);
    double v = normal_slow_path(b, x, static_cast<int>(b & 255u));
    // NaN marks strip rejection: the attempt is abandoned and replaced by a
    // fresh draw from the primary stream, which retries until acceptance.
    if (std::isnan(v)) v = normal();
    return v;
}

namespace {

// One xoshiro256++ output from a word-major four-lane state block.
inline std::uint64_t lane_next(std::uint64_t* f, int lane)
{
    auto rot = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
    std::uint64_t& w0 = f[lane];
    std::uint64_t& w1 = f[4 + lane];
    std::uint64_t& w2 = f[8 + lane];
    std::uint64_t& w3 = f[12 + lane];
    const std::uint64_t result = rot(w0 + w3, 23) + w0;
    const std::uint64_t t = w1 << 17;
    w2 ^= w0;
    w3 ^= w1;
    w1 ^= w2;
    w0 ^= w3;
    w2 ^= t;
    w3 = rot(w3, 45);
    return result;
}

} // namespace

#if defined(__AVX2__)

void Rng::fill_normals(double* dst, std::size_t count)
{
    const auto& zt = detail::ziggurat;
    const __m256i mask511 = _mm256_set1_epi64x(511);
    // (b | 2^52) interpreted as a double equals 2^52 + b for b < 2^52, so a
    // subtract yields an exact 52-bit unsigned-to-double conversion, which
    // AVX2 lacks as a native instruction.
    const __m256i magic_i = _mm256_set1_epi64x(0x4330000000000000ll);
    const __m256d magic_d = _mm256_castsi256_pd(magic_i);

    __m256i s0 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(&f_[0]));
    __m256i s1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(&f_[4]));
    __m256i s2 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(&f_[8]));
    __m256i s3 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(&f_[12]));

    std::size_t k = 0;
    for (; k + 4 <= count; k += 4) {
        const __m256i sum = _mm256_add_epi64(s0, s3);
        const __m256i b = _mm256_add_epi64(
            _mm256_or_si256(_mm256_slli_epi64(sum, 23), _mm256_srli_epi64(sum, 41)), s0);
        const __m256i t = _mm256_slli_epi64(s1, 17);
        s2 = _mm256_xor_si256(s2, s0);
        s3 = _mm256_xor_si256(s3, s1);
        s1 = _mm256_xor_si256(s1, s2);
        s0 = _mm256_xor_si256(s0, s3);
        s2 = _mm256_xor_si256(s2, t);
        s3 = _mm256_or_si256(_mm256_slli_epi64(s3, 45), _mm256_srli_epi64(s3, 19));

        const __m256i idx = _mm256_and_si256(b, mask511);
        const __m256d m = _mm256_sub_pd(
            _mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(b, 12), magic_i)), magic_d);
        const __m256d thr = _mm256_i64gather_pd(zt.thr.data(), idx, 8);
        const __m256d xs = _mm256_i64gather_pd(zt.xs.data(), idx, 8);
        _mm256_storeu_pd(dst + k, _mm256_mul_pd(m, xs));
        const int ok = _mm256_movemask_pd(_mm256_cmp_pd(m, thr, _CMP_LT_OQ));
        if (ok != 0xF) {
            alignas(32) std::uint64_t raw[4];
            _mm256_store_si256(reinterpret_cast<__m256i*>(raw), b);
            for (int lane = 0; lane < 4; ++lane)
                if (!(ok & (1 << lane))) dst[k + lane] = fill_edge_case(raw[lane]);
        }
    }

    _mm256_storeu_si256(reinterpret_cast<__m256i*>(&f_[0]), s0);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(&f_[4]), s1);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(&f_[8]), s2);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(&f_[12]), s3);

    for (int lane = 0; k < count; ++k, ++lane) {
        const std::uint64_t b = lane_next(f_.data(), lane);
        const std::uint64_t i = b & 511u;
        const double m = static_cast<double>(b >> 12);
        dst[k] = m < zt.thr[i] ? m * zt.xs[i] : fill_edge_case(b);
    }
}

#else

void Rng::fill_normals(double* dst, std::size_t count)
{
    // Portable fallback with the same lane assignment (slot k comes from
    // lane k mod 4) and identical output: every operation below rounds the
    // same way as its SIMD counterpart.
    const auto& zt = detail::ziggurat;
    std::size_t k = 0;
    for (; k + 4 <= count; k += 4) {
        for (int lane = 0; lane < 4; ++lane) {
            const std::uint64_t b = lane_next(f_.data(), lane);
            const std::uint64_t i = b & 511u;
            const double m = static_cast<double>(b >> 12);
            dst[k + lane] = m < zt.thr[i] ? m * zt.xs[i] : fill_edge_case(b);
        }
    }
    for (int lane = 0; k < count; ++k, ++lane) {
        const std::uint64_t b = lane_next(f_.data(), lane);
        const std::uint64_t i = b & 511u;
        const double m = static_cast<double>(b >> 12);
        dst[k] = m < zt.thr[i] ? m * zt.xs[i] : fill_edge_case(b);
    }
}

#endif

double Rng::normal_slow_path(std::uint64_t b, double x, int layer)
{
    const auto& zt = detail::ziggurat_tables();
    const double sign = (b & 256u) ? -1.0 : 1.0;
    if (layer == 0) {
        // Exact sample from the normal tail beyond r.
        for (;;) {
            double xt = -std::log(uniform_pos()) / zt.r;
            double yt = -std::log(uniform_pos());
            if (yt + yt > xt * xt) return sign * (zt.r + xt);
        }
    }
    double y = zt.y[layer] + uniform() * (zt.y[layer + 1] - zt.y[layer]);
    if (y < gauss_density(x)) return sign * x;
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace cldyn
