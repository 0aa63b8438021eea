#include "ridgeinfo/keyrec.h"

#include <limits>

#include "ridgeinfo/errors.h"
#include "ridgeinfo/parallel.h"

namespace ridgeinfo {

std::vector<size_t> nearest_ridge_keys(uint32_t u, uint32_t v, std::span<const uint32_t> keys, unsigned n) {
    if (keys.empty()) {
        throw InputError("classifier needs at least one candidate key");
    }
    std::vector<size_t> best;
    uint32_t best_dist = std::numeric_limits<uint32_t>::max();
    for (size_t i = 0; i < keys.size(); i++) {
        uint32_t d = ridge_distance(ridge_residual(keys[i], u, v, n), n);
        if (d < best_dist) {
            best_dist = d;
            best.clear();
        }
        if (d == best_dist) {
            best.push_back(i);
        }
    }
    return best;
}

uint32_t classify_shot(uint32_t u, uint32_t v, std::span<const uint32_t> keys, unsigned n, Stream &tie_rng) {
    auto ties = nearest_ridge_keys(u, v, keys, n);
    return keys[ties[tie_rng.below(ties.size())]];
}

std::vector<uint16_t> classify_dataset(const Dataset &dataset, uint64_t seed) {
    const auto &spec = dataset.spec();
    std::vector<std::vector<size_t>> ties(spec.outcome_count());
    for (Outcome o = 0; o < spec.outcome_count(); o++) {
        DecodedShot d = split_outcome(o, spec.n);
        ties[o] = nearest_ridge_keys(d.u, d.v, spec.keys, spec.n);
    }
    std::vector<uint16_t> predicted(dataset.size());
    auto outcomes = dataset.outcomes();
    parallel_for(dataset.size(), [&](size_t i) {
        const auto &t = ties[outcomes[i]];
        Stream rng(derive_seed(seed, i));
        predicted[i] = static_cast<uint16_t>(t[rng.below(t.size())]);
    });
    return predicted;
}

double label_agreement(std::span<const uint16_t> predicted, std::span<const uint16_t> labels) {
    if (predicted.size() != labels.size() || predicted.empty()) {
        throw InputError("prediction and label counts differ");
    }
    uint64_t correct = 0;
    for (size_t i = 0; i < predicted.size(); i++) {
        correct += predicted[i] == labels[i];
    }
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

AccuracyResult per_shot_accuracy(const Dataset &dataset, uint64_t seed) {
    if (dataset.size() == 0) {
        throw InputError("accuracy needs a nonempty dataset");
    }
    auto predicted = classify_dataset(dataset, seed);
    auto labels = dataset.labels();
    AccuracyResult out;
    for (size_t i = 0; i < predicted.size(); i++) {
        out.correct += predicted[i] == labels[i];
    }
    out.total = predicted.size();
    out.accuracy = static_cast<double>(out.correct) / static_cast<double>(out.total);
    out.ci = wilson_interval(out.correct, out.total);
    return out;
}

DictionaryRecovery dictionary_recovery(const Dataset &dataset) {
    const auto &spec = dataset.spec();
    DictionaryRecovery out;
    for (size_t g = 0; g < dataset.num_groups(); g++) {
        auto group = dataset.group(g);
        if (group.empty()) {
            throw InputError("dictionary recovery needs nonempty key groups");
        }
        size_t best = 0;
        uint64_t best_hits = 0;
        uint64_t best_dist = std::numeric_limits<uint64_t>::max();
        for (size_t c = 0; c < spec.keys.size(); c++) {
            uint64_t hits = 0;
            uint64_t dist = 0;  // summed; group size is fixed so it orders like the mean
            for (Outcome o : group) {
                DecodedShot d = split_outcome(o, spec.n);
                uint32_t r = ridge_residual(spec.keys[c], d.u, d.v, spec.n);
                hits += r == 0;
                dist += ridge_distance(r, spec.n);
            }
            bool better = c == 0 || hits > best_hits ||
                          (hits == best_hits && dist < best_dist) ||
                          (hits == best_hits && dist == best_dist && spec.keys[c] < spec.keys[best]);
            if (better) {
                best = c;
                best_hits = hits;
                best_dist = dist;
            }
        }
        out.predictions.emplace_back(spec.keys[g], spec.keys[best]);
        out.correct += best == g;
    }
    out.accuracy = static_cast<double>(out.correct) / static_cast<double>(dataset.num_groups());
    return out;
}

}  // namespace ridgeinfo
