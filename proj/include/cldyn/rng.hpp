#ifndef CLDYN_RNG_HPP
#define CLDYN_RNG_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace cldyn {

namespace detail {
struct ZigguratTables {
    // x[i] is the right edge of layer i; x[0] is the virtual width of the
    // base layer (rectangle plus tail), x[256] = 0. y[i] = exp(-x[i]^2/2)
    // for i >= 1, y[256] = 1.
    std::array<double, 257> x;
    std::array<double, 257> y;
    // Acceptance test rewritten in 52-bit mantissa units so the hot path is
    // one convert, one compare, one multiply: a draw with mantissa m lands in
    // the layer interior iff m < thr[i], and then maps to m * xs[i]. The
    // tables are indexed by the low nine bits of the draw — eight layer bits
    // plus the sign bit — with xs negated on the upper half, so the sign
    // costs nothing instead of a data-dependent negate that would mispredict
    // half the time.
    std::array<double, 512> xs;  // +/- x[i & 255] * 2^-52
    std::array<double, 512> thr; // x[(i & 255) + 1] / x[i & 255] * 2^52
    double r;                    // tail boundary
};
// Built once before main() from closed-form layer recursions; a plain global
// (rather than a function-local static) lets the inline sampler below read it
// without a call or an initialization guard.
extern const ZigguratTables ziggurat;
const ZigguratTables& ziggurat_tables();
} // namespace detail

/** Deterministic random stream: xoshiro256++ seeded through splitmix64, with
 *  a 256-layer ziggurat normal sampler. Chosen over <random> engines because
 *  the normal draws must be byte-identical across standard library versions
 *  (std::normal_distribution is implementation-defined) and fast enough to
 *  feed the finite-size training loop, which consumes one normal per input
 *  coordinate per step.
 *
 *  One seed defines five independent xoshiro streams: a primary stream
 *  behind next_u64()/uniform()/normal(), and four auxiliary streams that
 *  fill_normals() interleaves. Everything a given Rng produces is a fixed
 *  deterministic function of the seed and the call sequence. */
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /** Uniform on [0,1) with 53 random bits. */
    double uniform();

    /** Uniform on (0,1); never returns 0, safe under log(). */
    double uniform_pos();

    /** Standard normal draw (ziggurat with exact tail sampling). */
    double normal();

    /** Fills dst[0..count) with independent standard normals. This is the
     *  bulk entry point for the training loop, which consumes one normal per
     *  input coordinate per sample; slot k is drawn from auxiliary stream
     *  k mod 4, so four serial state recurrences run in parallel (with SIMD
     *  when available) instead of one recurrence gating every draw. The rare
     *  ziggurat edge/tail draws (~1.5%) are completed from the primary
     *  stream. The sequence is deterministic but distinct from repeated
     *  normal() calls. */
    void fill_normals(double* dst, std::size_t count);

private:
    std::array<std::uint64_t, 4> s_; // primary stream
    // Auxiliary stream states, stored word-major: f_[4*w + lane] is state
    // word w of lane `lane`, so each word spans one SIMD register.
    std::array<std::uint64_t, 16> f_;

    // Handles the ziggurat edge and tail regions. Returns NaN to request a
    // fresh attempt (strip rejection).
    double normal_slow_path(std::uint64_t b, double x, int layer);

    // Completes a fill draw whose mantissa fell outside the layer interior.
    double fill_edge_case(std::uint64_t b);

    static std::uint64_t rotl(std::uint64_t x, int k)
    {
        return (x << k) | (x >> (64 - k));
    }
};

inline std::uint64_t Rng::next_u64()
{
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

inline double Rng::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

inline double Rng::uniform_pos()
{
    return static_cast<double>((next_u64() >> 11) | 1ull) * 0x1.0p-53;
}

inline double Rng::normal()
{
    const auto& zt = detail::ziggurat;
    for (;;) {
        const std::uint64_t b = next_u64();
        const std::uint64_t i = b & 511u;
        const double m = static_cast<double>(b >> 12);
        const double x = m * zt.xs[i];
        if (m < zt.thr[i]) return x;
        const double v = normal_slow_path(b, std::abs(x), static_cast<int>(b & 255u));
        if (!std::isnan(v)) return v;
    }
}

} // namespace cldyn

#endif
