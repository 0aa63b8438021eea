#include "ridgeinfo/bits.h"

#include <algorithm>
#include <string>

#include "ridgeinfo/errors.h"

namespace ridgeinfo {

bool ExperimentSpec::has_key(uint32_t key) const {
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

size_t ExperimentSpec::key_index(uint32_t key) const {
    auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) {
        throw InputError("key " + std::to_string(key) + " not in spec");
    }
    return static_cast<size_t>(it - keys.begin());
}

void ExperimentSpec::validate() const {
    if (n < 1 || n > kMaxRegisterWidth) {
        throw InputError("register width n must be in [1, 8], got " + std::to_string(n));
    }
    if (keys.empty()) {
        throw InputError("key list is empty");
    }
    for (size_t i = 0; i < keys.size(); i++) {
        if (keys[i] >= modulus()) {
            throw InputError(
                "key " + std::to_string(keys[i]) + " out of range for n=" + std::to_string(n));
        }
        for (size_t j = 0; j < i; j++) {
            if (keys[j] == keys[i]) {
                throw InputError("duplicate key " + std::to_string(keys[i]));
            }
        }
    }
    if (shots_per_key == 0) {
        throw InputError("shots_per_key must be positive");
    }
}

DecodedShot decode_registers(std::span<const uint8_t> bits, unsigned n) {
    if (bits.size() != 2 * static_cast<size_t>(n)) {
        throw InputError(
            "malformed shot: expected " + std::to_string(2 * n) + " bits, got " +
            std::to_string(bits.size()));
    }
    DecodedShot out;
    for (unsigned i = 0; i < n; i++) {
        if (bits[i] > 1 || bits[n + i] > 1) {
            throw InputError("malformed shot: non-binary bit value");
        }
        out.u |= uint32_t{bits[i]} << i;
        out.v |= uint32_t{bits[n + i]} << i;
    }
    return out;
}

DecodedShot decode_registers(const Shot &shot, unsigned n) {
    return decode_registers(std::span<const uint8_t>(shot.bits), n);
}

std::vector<uint8_t> encode_registers(DecodedShot decoded, unsigned n) {
    return unpack_bits(join_outcome(decoded.u, decoded.v, n), 2 * n);
}

Outcome pack_bits(std::span<const uint8_t> bits) {
    Outcome out = 0;
    for (size_t i = 0; i < bits.size(); i++) {
        out |= Outcome{bits[i] & 1u} << i;
    }
    return out;
}

std::vector<uint8_t> unpack_bits(Outcome outcome, unsigned bit_count) {
    std::vector<uint8_t> bits(bit_count);
    for (unsigned i = 0; i < bit_count; i++) {
        bits[i] = static_cast<uint8_t>((outcome >> i) & 1u);
    }
    return bits;
}

uint32_t ridge_residual(uint32_t key, uint32_t u, uint32_t v, unsigned n) {
    uint32_t mod = uint32_t{1} << n;
    if (u >= mod || v >= mod) {
        throw InputError("register value out of range for n=" + std::to_string(n));
    }
    uint32_t mask = mod - 1;
    return (v - key * u) & mask;
}

bool ridge_hit(uint32_t key, uint32_t u, uint32_t v, unsigned n) {
    return ridge_residual(key, u, v, n) == 0;
}

uint32_t ridge_distance(uint32_t residual, unsigned n) {
    uint32_t mod = uint32_t{1} << n;
    residual &= mod - 1;
    return std::min(residual, mod - residual);
}

}  // namespace ridgeinfo
