#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace pcg {

// Draw purposes. Each (seed, sequence, step, purpose) tuple names its own
// stream, so replications are reproducible and independent of evaluation
// order. Acceptance uniforms and thinning draws never share a stream.
enum class RngPurpose : uint64_t {
    DraftToken    = 1,
    GroupLabel    = 2,
    AcceptU       = 3,
    Thinning      = 4,
    TokenResidual = 5,
    Bonus         = 6,
    TargetToken   = 7,
    Projection    = 8,
    Synthesis     = 9,
};

// Counter-based stream: splitmix64 over a keyed counter. Cheap to construct,
// no warm-up, and streams with distinct keys are independent for our purposes.
class RngStream {
  public:
    explicit RngStream(uint64_t key) : state_(key) {}

    // Derive a stream key from up to four identifying words.
    static RngStream from(uint64_t seed, uint64_t a = 0, uint64_t b = 0, uint64_t c = 0) {
        uint64_t k = mix(seed + 0x9E3779B97F4A7C15ull);
        k          = mix(k ^ (a + 0x9E3779B97F4A7C15ull));
        k          = mix(k ^ (b + 0x9E3779B97F4A7C15ull));
        k          = mix(k ^ (c + 0x9E3779B97F4A7C15ull));
        return RngStream(k);
    }

    static RngStream from(uint64_t seed, uint64_t seq, uint64_t step, RngPurpose purpose) {
        return from(seed, seq, step, static_cast<uint64_t>(purpose));
    }

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform in [0, 1), 53 bits of precision.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, bound).
    uint64_t next_below(uint64_t bound) {
        const uint64_t threshold = (0ull - bound) % bound; // 2^64 mod bound
        for (;;) {
            const uint64_t x = next_u64();
            if (x >= threshold) {
                return x % bound;
            }
        }
    }

    // Standard normal via Marsaglia polar, one value cached.
    double next_gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_unit() - 1.0;
            v = 2.0 * next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        cached_        = v * m;
        has_cached_    = true;
        return u * m;
    }

  private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    uint64_t state_;
    bool     has_cached_ = false;
    double   cached_     = 0.0;
};

// Invert the CDF of a probability vector at u in [0,1). If u lands past the
// accumulated total (floating-point shortfall near 1), falls back to the last
// index with positive mass.
inline uint32_t sample_categorical(std::span<const double> probs, double u) {
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) {
            return static_cast<uint32_t>(i);
        }
    }
    for (size_t i = probs.size(); i-- > 0;) {
        if (probs[i] > 0.0) {
            return static_cast<uint32_t>(i);
        }
    }
    return 0;
}

inline uint32_t sample_categorical(std::span<const double> probs, RngStream & rng) {
    return sample_categorical(probs, rng.next_unit());
}

} // namespace pcg
