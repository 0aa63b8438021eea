#ifndef RIDGEINFO_BITS_H
#define RIDGEINFO_BITS_H

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ridgeinfo {

/// Packed measurement outcome. Bit i-1 holds D_i, so the low n bits are
/// register a (u) and the next n bits are register b (v); numerically
/// outcome = u + 2^n * v.
using Outcome = uint32_t;

inline constexpr unsigned kMaxRegisterWidth = 8;

struct ExperimentSpec {
    unsigned n = 4;
    std::vector<uint32_t> keys{1, 3, 5, 7, 2, 4, 8, 12};
    uint32_t shots_per_key = 1024;

    unsigned bit_count() const {
        return 2 * n;
    }
    uint32_t modulus() const {
        return uint32_t{1} << n;
    }
    uint32_t outcome_count() const {
        return uint32_t{1} << bit_count();
    }
    size_t num_keys() const {
        return keys.size();
    }
    bool has_key(uint32_t key) const;
    /// Position of `key` in `keys`; throws InputError if absent.
    size_t key_index(uint32_t key) const;

    /// Throws InputError unless 1 <= n <= 8, keys nonempty, distinct and < 2^n,
    /// and shots_per_key >= 1.
    void validate() const;

    bool operator==(const ExperimentSpec &) const = default;
};

struct Shot {
    uint32_t key = 0;
    std::vector<uint8_t> bits;  // D_1..D_{2n}

    bool operator==(const Shot &) const = default;
};

struct DecodedShot {
    uint32_t u = 0;
    uint32_t v = 0;

    bool operator==(const DecodedShot &) const = default;
};

/// Little-endian decode of the a and b registers. Throws InputError when
/// bits.size() != 2n or a bit is not 0/1.
DecodedShot decode_registers(std::span<const uint8_t> bits, unsigned n);
DecodedShot decode_registers(const Shot &shot, unsigned n);

/// Inverse of decode_registers.
std::vector<uint8_t> encode_registers(DecodedShot decoded, unsigned n);

Outcome pack_bits(std::span<const uint8_t> bits);
std::vector<uint8_t> unpack_bits(Outcome outcome, unsigned bit_count);

inline DecodedShot split_outcome(Outcome outcome, unsigned n) {
    uint32_t mask = (uint32_t{1} << n) - 1;
    return {outcome & mask, (outcome >> n) & mask};
}
inline Outcome join_outcome(uint32_t u, uint32_t v, unsigned n) {
    return u | (v << n);
}

/// (v - k*u) mod 2^n. Throws InputError if u or v is out of range.
uint32_t ridge_residual(uint32_t key, uint32_t u, uint32_t v, unsigned n);

bool ridge_hit(uint32_t key, uint32_t u, uint32_t v, unsigned n);

/// Circular distance of a residual from zero on Z_{2^n}: min(r, 2^n - r).
uint32_t ridge_distance(uint32_t residual, unsigned n);

}  // namespace ridgeinfo

#endif
