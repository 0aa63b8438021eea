#include "ridgeinfo/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ridgeinfo/errors.h"
#include "ridgeinfo/keyrec.h"
#include "ridgeinfo/parallel.h"
#include "ridgeinfo/rng.h"

namespace ridgeinfo {

const char *statistic_name(PermStatistic statistic) {
    return statistic == PermStatistic::accuracy ? "accuracy" : "cps";
}

PermStatistic parse_statistic(const std::string &name) {
    if (name == "accuracy") {
        return PermStatistic::accuracy;
    }
    if (name == "cps") {
        return PermStatistic::cps;
    }
    throw InputError("unknown statistic `" + name + "` (expected accuracy or cps)");
}

double permutation_p_value(double observed, std::span<const double> null_values) {
    double tol = 1e-12 * std::max(1.0, std::abs(observed));
    size_t extreme = 0;
    for (double v : null_values) {
        extreme += v >= observed - tol;
    }
    return static_cast<double>(1 + extreme) / static_cast<double>(1 + null_values.size());
}

PermutationResult permutation_test(
    const Dataset &dataset, PermStatistic statistic, size_t n_perm, uint64_t seed, unsigned k_max) {
    if (n_perm == 0) {
        throw InputError("permutation test needs at least one permutation");
    }
    if (dataset.size() == 0) {
        throw InputError("permutation test needs a nonempty dataset");
    }
    const auto &spec = dataset.spec();
    auto labels = dataset.labels();

    std::vector<uint16_t> predicted;
    PermutationResult out;
    out.statistic = statistic_name(statistic);
    out.n_perm = n_perm;
    if (statistic == PermStatistic::accuracy) {
        predicted = classify_dataset(dataset, seed);
        out.observed = label_agreement(predicted, labels);
    } else {
        out.observed = cps(dataset, k_max);
    }

    const uint64_t perm_seed = derive_seed(seed, kPermutationStream);
    out.null_values.assign(n_perm, 0.0);
    parallel_for(n_perm, [&](size_t p) {
        std::vector<uint16_t> shuffled(labels.begin(), labels.end());
        Stream rng(derive_seed(perm_seed, p));
        rng.shuffle(std::span<uint16_t>(shuffled));
        if (statistic == PermStatistic::accuracy) {
            out.null_values[p] = label_agreement(predicted, shuffled);
        } else {
            auto table =
                JointTable::from_labels(dataset.num_groups(), spec.bit_count(), dataset.outcomes(), shuffled);
            out.null_values[p] = cps(table, spec.n, k_max);
        }
    });
    out.p_value = permutation_p_value(out.observed, out.null_values);
    return out;
}

ReliabilityPoint reliability_point(uint32_t shots_per_key, std::span<const LatticeFunction> replicate_f, unsigned n) {
    if (replicate_f.size() < 2) {
        throw InputError("reliability summary needs at least two replicates");
    }
    const unsigned k_max = replicate_f.front().k_max();
    std::vector<std::vector<double>> mass(k_max, std::vector<double>(replicate_f.size()));
    for (size_t b = 0; b < replicate_f.size(); b++) {
        auto m = positive_mass(replicate_f[b], n);
        for (unsigned k = 0; k < k_max; k++) {
            mass[k][b] = m[k].total;
        }
    }
    ReliabilityPoint point;
    point.shots_per_key = shots_per_key;
    const double count = static_cast<double>(replicate_f.size());
    for (unsigned k = 0; k < k_max; k++) {
        OrderReliability r;
        r.order = k + 1;
        r.mean = std::accumulate(mass[k].begin(), mass[k].end(), 0.0) / count;
        double ss = 0;
        for (double x : mass[k]) {
            ss += (x - r.mean) * (x - r.mean);
        }
        r.sd = std::sqrt(ss / (count - 1));
        if (r.mean > 0) {
            r.cv = r.sd / r.mean;
            if (*r.cv <= 1.0) {
                point.k_star = r.order;
            }
        }
        point.orders.push_back(r);
    }
    return point;
}

std::vector<ReliabilityPoint> reliability_sweep(
    const Dataset &dataset, std::span<const uint32_t> budgets, size_t replicates, unsigned k_max, uint64_t seed) {
    if (replicates < 50) {
        throw InputError("reliability sweep needs at least 50 replicates");
    }
    const auto &spec = dataset.spec();
    if (k_max < 1 || k_max > spec.bit_count()) {
        throw InputError("k_max must be in [1, 2n]");
    }
    for (uint32_t s : budgets) {
        if (s == 0 || s > dataset.min_group_size()) {
            throw InputError(
                "budget " + std::to_string(s) + " exceeds the smallest key group (" +
                std::to_string(dataset.min_group_size()) + " shots)");
        }
    }
    std::vector<ReliabilityPoint> out;
    for (uint32_t s : budgets) {
        const uint64_t budget_seed = derive_seed(seed, s);
        std::vector<LatticeFunction> fs(replicates, LatticeFunction(0, 0));
        parallel_for(replicates, [&](size_t b) {
            Stream rng(derive_seed(budget_seed, b));
            JointTable table(dataset.num_groups(), spec.bit_count());
            for (size_t k = 0; k < dataset.num_groups(); k++) {
                auto group = dataset.group(k);
                for (uint32_t i = 0; i < s; i++) {
                    table.add(k, group[rng.below(group.size())]);
                }
            }
            fs[b] = mobius_invert(compute_g(table, k_max));
        });
        out.push_back(reliability_point(s, fs, spec.n));
    }
    return out;
}

}  // namespace ridgeinfo
