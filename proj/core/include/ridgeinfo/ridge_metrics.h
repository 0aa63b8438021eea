#ifndef RIDGEINFO_RIDGE_METRICS_H
#define RIDGEINFO_RIDGE_METRICS_H

#include <cstdint>
#include <utility>
#include <vector>

#include "ridgeinfo/dataset.h"

namespace ridgeinfo {

inline constexpr double kZ95 = 1.959964;

struct Interval {
    double lo = 0;
    double hi = 0;

    bool operator==(const Interval &) const = default;
};

struct KeyHits {
    uint32_t key = 0;
    uint64_t hits = 0;
    uint64_t count = 0;
    double p_hit = 0;

    bool operator==(const KeyHits &) const = default;
};

struct RidgeStats {
    uint64_t pooled_hits = 0;
    uint64_t total = 0;
    double p_hit = 0;
    double contrast = 0;  // p_hit * 2^n
    std::vector<KeyHits> per_key;
    Interval wilson_ci;
    Interval contrast_ci;

    bool operator==(const RidgeStats &) const = default;
};

/// Pooled and per-key ridge-hit fractions under each shot's own label.
/// Confidence intervals are left zero.
RidgeStats ridge_hit_probability(const Dataset &dataset);

/// Wilson score interval clipped to [0,1]. Throws InputError if trials == 0
/// or successes > trials.
Interval wilson_interval(uint64_t successes, uint64_t trials, double z = kZ95);

/// Percentile (2.5%, 97.5%) bootstrap of the pooled contrast, resampling
/// with replacement inside each key group. Replicate b uses
/// Stream(derive_seed(seed, b)).
Interval bootstrap_contrast_ci(const Dataset &dataset, size_t replicates, uint64_t seed);

/// ridge_hit_probability plus Wilson and bootstrap intervals.
RidgeStats ridge_stats(const Dataset &dataset, size_t replicates, uint64_t seed);

struct Heatmap {
    uint32_t key = 0;
    unsigned n = 0;
    std::vector<std::vector<uint64_t>> counts;  // counts[v][u]
    std::vector<std::pair<uint32_t, uint32_t>> overlay;  // (u, k*u mod 2^n)
};

Heatmap heatmap(const Dataset &dataset, uint32_t key);

/// Comma separated rows, v = 0 first.
std::string heatmap_csv(const Heatmap &map);
/// Plain-text PGM (P2), darker = more counts, row 0 is the largest v.
std::string heatmap_pgm(const Heatmap &map);
/// One `u,v` line per overlay point.
std::string heatmap_overlay_text(const Heatmap &map);

}  // namespace ridgeinfo

#endif
