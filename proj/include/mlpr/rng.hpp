#pragma once

#include <cstdint>
#include <random>

namespace mlpr {

/// Mixes seed words into a single well-scrambled 64-bit value (splitmix64
/// finalizer). Used to derive independent RNG streams for chunks, experiment
/// cells and generated instances so that results do not depend on thread
/// count or evaluation order.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    auto scramble = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = scramble(a);
    h = scramble(h ^ scramble(b + 0x632be59bd9b4e019ULL));
    h = scramble(h ^ scramble(c + 0xd6e8feb86659fd93ULL));
    return h;
}

/// Deterministic RNG. Wraps std::mt19937_64 (whose output sequence is fully
/// specified by the standard) and draws bounded values by rejection sampling,
/// avoiding the implementation-defined std:: distributions. Equal seeds give
/// bit-identical streams on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    /// Uniform integer in [lo, hi], inclusive.
    long long uniform_int(long long lo, long long hi) {
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    /// Uniform real in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

} // namespace mlpr
