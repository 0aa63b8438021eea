#ifndef RIDGEINFO_RNG_H
#define RIDGEINFO_RNG_H

#include <cstdint>
#include <span>
#include <utility>

namespace ridgeinfo {

/// SplitMix64 finalizer.
constexpr uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of substream `index` under `seed`. Every stochastic routine draws
/// replicate / key / shot i from Stream(derive_seed(seed, i)), so results do
/// not depend on evaluation order or thread count.
constexpr uint64_t derive_seed(uint64_t seed, uint64_t index) {
    return mix64(mix64(seed) ^ (index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

/// Counter-based SplitMix64 stream: output i is mix64(key + i * golden).
class Stream {
   public:
    explicit constexpr Stream(uint64_t key) : state_(key) {
    }

    constexpr uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). bound must be positive.
    uint64_t below(uint64_t bound) {
        // Rejection on the top of the range keeps the draw exactly uniform.
        uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    template <typename T>
    void shuffle(std::span<T> items) {
        for (size_t i = items.size(); i > 1; i--) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

   private:
    uint64_t state_;
};

}  // namespace ridgeinfo

#endif
