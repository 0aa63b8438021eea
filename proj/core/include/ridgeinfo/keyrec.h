#ifndef RIDGEINFO_KEYREC_H
#define RIDGEINFO_KEYREC_H

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ridgeinfo/dataset.h"
#include "ridgeinfo/ridge_metrics.h"
#include "ridgeinfo/rng.h"

namespace ridgeinfo {

/// Candidate keys (as indices into `keys`) at minimum circular ridge distance.
std::vector<size_t> nearest_ridge_keys(uint32_t u, uint32_t v, std::span<const uint32_t> keys, unsigned n);

/// Ridge-distance classifier. Ties are broken uniformly with one draw from
/// `tie_rng`.
uint32_t classify_shot(uint32_t u, uint32_t v, std::span<const uint32_t> keys, unsigned n, Stream &tie_rng);

/// Predicted key index for every shot. Shot i breaks ties with
/// Stream(derive_seed(seed, i)), so the result is label-free and
/// independent of evaluation order.
std::vector<uint16_t> classify_dataset(const Dataset &dataset, uint64_t seed);

struct AccuracyResult {
    uint64_t correct = 0;
    uint64_t total = 0;
    double accuracy = 0;
    Interval ci;

    bool operator==(const AccuracyResult &) const = default;
};

AccuracyResult per_shot_accuracy(const Dataset &dataset, uint64_t seed);

/// Fraction of shots whose prediction equals the label; used by the
/// permutation test with shuffled labels.
double label_agreement(std::span<const uint16_t> predicted, std::span<const uint16_t> labels);

struct DictionaryRecovery {
    std::vector<std::pair<uint32_t, uint32_t>> predictions;  // (true key, predicted key)
    uint64_t correct = 0;
    double accuracy = 0;

    bool operator==(const DictionaryRecovery &) const = default;
};

/// One prediction per key group: most ridge hits across the group, then
/// smaller mean ridge distance, then smaller key value.
DictionaryRecovery dictionary_recovery(const Dataset &dataset);

}  // namespace ridgeinfo

#endif
