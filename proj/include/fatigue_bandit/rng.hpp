#pragma once

#include <cstdint>
#include <limits>

// Seeded randomness utilities shared by the simulator and the harness.
//
// Two layers:
//  - SplitMix64: a tiny counter-style generator used for Bernoulli user
//    draws and instance sampling (cheap to construct per round).
//  - derive_seed / derive_substream: injective seed fan-out so that every
//    (replication, policy) pair and every simulated round gets its own
//    stream. Common-random-numbers pairing across policies falls out of
//    user/instance streams not depending on the policy index.

namespace fatigue_bandit {

// Finalizer from splitmix64 (Steele, Lea, Flood 2014). Bijective on uint64.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64_mix(state_);
    }

private:
    std::uint64_t state_;
};

// Uniform double in [0, 1) from the top 53 bits of a 64-bit generator.
template <class Rng>
double uniform01(Rng& rng) {
    static_assert(sizeof(typename Rng::result_type) == 8, "needs a 64-bit generator");
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

enum class StreamKind : std::uint64_t {
    Instance = 1,  // rewards/preferences of a replication's environment
    User = 2,      // interaction randomness (shared across compared policies)
    Policy = 3,    // posterior sampling randomness
};

// Injective for replication < 2^16 and aux < 2^40: the packed word is
// unique per (kind, replication, aux) and xor-then-mix is a bijection.
constexpr std::uint64_t derive_seed(std::uint64_t master, StreamKind kind,
                                    std::uint32_t replication, std::uint64_t aux = 0) {
    const std::uint64_t pack = (static_cast<std::uint64_t>(kind) << 56) |
                               (static_cast<std::uint64_t>(replication & 0xffff) << 40) |
                               (aux & 0xffffffffffULL);
    return splitmix64_mix(splitmix64_mix(master) ^ pack);
}

// Per-index substream of an already-derived stream seed (odd stride keeps
// index -> state injective).
constexpr std::uint64_t derive_substream(std::uint64_t stream_seed, std::uint64_t index) {
    return splitmix64_mix(stream_seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace fatigue_bandit
