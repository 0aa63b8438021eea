#ifndef RIDGEINFO_STATS_H
#define RIDGEINFO_STATS_H

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ridgeinfo/dataset.h"
#include "ridgeinfo/infolattice.h"

namespace ridgeinfo {

enum class PermStatistic { accuracy, cps };

inline constexpr size_t kDefaultAccuracyPermutations = 500;
inline constexpr size_t kDefaultCpsPermutations = 200;

const char *statistic_name(PermStatistic statistic);
/// Accepts "accuracy" or "cps"; throws InputError otherwise.
PermStatistic parse_statistic(const std::string &name);

struct PermutationResult {
    std::string statistic;
    double observed = 0;
    std::vector<double> null_values;
    size_t n_perm = 0;
    double p_value = 1;

    bool operator==(const PermutationResult &) const = default;
};

/// (1 + #{null >= observed}) / (1 + n_perm). Nulls within a relative 1e-12
/// of the observed value count as ties, hence as exceedances.
double permutation_p_value(double observed, std::span<const double> null_values);

/// Label-shuffle permutation test. Permutation p shuffles all labels with
/// Stream(derive_seed(derive_seed(seed, kPermutationStream), p)). The
/// accuracy statistic classifies with tie seed `seed` once, since the
/// classifier never sees labels; the cps statistic rebuilds the full
/// lattice per permutation.
PermutationResult permutation_test(
    const Dataset &dataset, PermStatistic statistic, size_t n_perm, uint64_t seed, unsigned k_max = 3);

inline constexpr uint64_t kPermutationStream = 0x7065726d;

struct OrderReliability {
    unsigned order = 0;
    double mean = 0;
    double sd = 0;
    std::optional<double> cv;  // sd / mean; absent unless mean > 0

    bool operator==(const OrderReliability &) const = default;
};

struct ReliabilityPoint {
    uint32_t shots_per_key = 0;
    std::vector<OrderReliability> orders;
    unsigned k_star = 0;  // largest order with mean > 0 and CV <= 1, else 0

    bool operator==(const ReliabilityPoint &) const = default;
};

inline const std::vector<uint32_t> kDefaultBudgets{128, 256, 512, 768, 1024};
inline constexpr size_t kDefaultReliabilityReplicates = 100;

/// Summarizes positive mass across bootstrap replicates of the Möbius
/// transform f.
ReliabilityPoint reliability_point(uint32_t shots_per_key, std::span<const LatticeFunction> replicate_f, unsigned n);

/// For each budget s, `replicates` bootstrap draws of s shots per key (with
/// replacement); replicate b of budget s uses
/// Stream(derive_seed(derive_seed(seed, s), b)). Throws InputError when a
/// budget exceeds a key group or replicates < 50.
std::vector<ReliabilityPoint> reliability_sweep(
    const Dataset &dataset, std::span<const uint32_t> budgets, size_t replicates, unsigned k_max, uint64_t seed);

}  // namespace ridgeinfo

#endif
