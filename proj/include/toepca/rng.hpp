#pragma once

// Counter-based random source with a pinned cross-platform contract,
// identified by kGeneratorId. Changing any step below is a contract break
// and must bump the version suffix.
//
//   generator     philox4x32-10: 4x32-bit blocks, 10 rounds,
//                 multipliers 0xD2511F53 / 0xCD9E8D57,
//                 key schedule  +0x9E3779B9 / +0xBB67AE85 per round
//   key           64-bit seed, little 32-bit word first
//   counter       words (block_lo, block_hi, stream_lo, stream_hi); each
//                 stream (one path) owns its own 64-bit block counter
//   uniforms      each block yields two doubles; 64-bit words are formed
//                 low-output-first, the top 53 bits give
//                 u = (word >> 11 + 0.5) * 2^-53 in (0, 1)
//   normals       inverse normal CDF (Wichura's high-accuracy rational
//                 approximation) applied to u

#include <array>
#include <cmath>
#include <cstdint>

#include "toepca/error.hpp"

namespace toepca {

inline constexpr char kGeneratorId[] = "philox4x32-10/u53/icdf/v1";

namespace rng {

struct Block {
    std::array<std::uint32_t, 4> x;
};

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

/// One philox4x32-10 block for the given counter and 64-bit key.
inline Block philox4x32(std::array<std::uint32_t, 4> ctr, std::uint64_t seed) {
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(0xD2511F53u, ctr[0], hi0, lo0);
        mulhilo(0xCD9E8D57u, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    }
    return {ctr};
}

inline double uniform_from_bits(std::uint64_t word) {
    return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

/// Inverse of the standard normal CDF (absolute error below 1e-15 across
/// (0, 1)); Wichura's rational minimax pieces.
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw ValidationError("inverse_normal_cdf: argument must lie strictly in (0, 1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                      6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                    1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                  1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.226495278852545703e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return num / den;
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                  1.8463183175100546818e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        value = num / den;
    }
    return q < 0.0 ? -value : value;
}

}  // namespace rng

/// Stream of standard normal variates; `stream` selects an independent
/// substream (one per sample path), `seed` is the shared experiment key.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const rng::Block b = rng::philox4x32(
            {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
             static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
            seed_);
        ++block_;
        const std::uint64_t w0 =
            static_cast<std::uint64_t>(b.x[0]) | (static_cast<std::uint64_t>(b.x[1]) << 32);
        const std::uint64_t w1 =
            static_cast<std::uint64_t>(b.x[2]) | (static_cast<std::uint64_t>(b.x[3]) << 32);
        spare_ = rng::inverse_normal_cdf(rng::uniform_from_bits(w1));
        have_spare_ = true;
        return rng::inverse_normal_cdf(rng::uniform_from_bits(w0));
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace toepca
