#include "ridgeinfo/ridge_metrics.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "ridgeinfo/errors.h"
#include "ridgeinfo/parallel.h"
#include "ridgeinfo/rng.h"

namespace ridgeinfo {

namespace {

bool outcome_hits(uint32_t key, Outcome o, unsigned n) {
    DecodedShot d = split_outcome(o, n);
    return ((d.v - key * d.u) & ((uint32_t{1} << n) - 1)) == 0;
}

// Percentile by linear interpolation between order statistics.
double percentile(std::vector<double> sorted, double q) {
    std::sort(sorted.begin(), sorted.end());
    double pos = q * static_cast<double>(sorted.size() - 1);
    size_t i = static_cast<size_t>(std::floor(pos));
    size_t j = std::min(i + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(i);
    return sorted[i] + (sorted[j] - sorted[i]) * frac;
}

}  // namespace

RidgeStats ridge_hit_probability(const Dataset &dataset) {
    if (dataset.size() == 0) {
        throw InputError("ridge metrics need a nonempty dataset");
    }
    const auto &spec = dataset.spec();
    RidgeStats out;
    for (size_t k = 0; k < dataset.num_groups(); k++) {
        KeyHits kh;
        kh.key = spec.keys[k];
        for (Outcome o : dataset.group(k)) {
            kh.hits += outcome_hits(kh.key, o, spec.n);
        }
        kh.count = dataset.group_size(k);
        kh.p_hit = static_cast<double>(kh.hits) / static_cast<double>(kh.count);
        out.pooled_hits += kh.hits;
        out.total += kh.count;
        out.per_key.push_back(kh);
    }
    out.p_hit = static_cast<double>(out.pooled_hits) / static_cast<double>(out.total);
    out.contrast = out.p_hit * static_cast<double>(spec.modulus());
    return out;
}

Interval wilson_interval(uint64_t successes, uint64_t trials, double z) {
    if (trials == 0) {
        throw InputError("wilson interval needs at least one trial");
    }
    if (successes > trials) {
        throw InputError("successes exceed trials");
    }
    if (!(z > 0)) {
        throw InputError("z must be positive");
    }
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    // the endpoints at p = 0 and p = 1 are exact; avoid rounding just inside
    double lo = successes == 0 ? 0.0 : std::clamp(center - half, 0.0, 1.0);
    double hi = successes == trials ? 1.0 : std::clamp(center + half, 0.0, 1.0);
    return {lo, hi};
}

Interval bootstrap_contrast_ci(const Dataset &dataset, size_t replicates, uint64_t seed) {
    if (replicates < 100) {
        throw InputError("bootstrap needs at least 100 replicates");
    }
    const auto &spec = dataset.spec();
    // Per-group hit indicators; resampling only needs these.
    std::vector<std::vector<uint8_t>> hits(dataset.num_groups());
    for (size_t k = 0; k < dataset.num_groups(); k++) {
        for (Outcome o : dataset.group(k)) {
            hits[k].push_back(outcome_hits(spec.keys[k], o, spec.n));
        }
    }
    const double scale = static_cast<double>(spec.modulus()) / static_cast<double>(dataset.size());
    std::vector<double> contrasts(replicates);
    parallel_for(replicates, [&](size_t b) {
        Stream rng(derive_seed(seed, b));
        uint64_t total = 0;
        for (const auto &group : hits) {
            for (size_t i = 0; i < group.size(); i++) {
                total += group[rng.below(group.size())];
            }
        }
        contrasts[b] = static_cast<double>(total) * scale;
    });
    return {percentile(contrasts, 0.025), percentile(contrasts, 0.975)};
}

RidgeStats ridge_stats(const Dataset &dataset, size_t replicates, uint64_t seed) {
    RidgeStats out = ridge_hit_probability(dataset);
    out.wilson_ci = wilson_interval(out.pooled_hits, out.total);
    out.contrast_ci = bootstrap_contrast_ci(dataset, replicates, seed);
    return out;
}

Heatmap heatmap(const Dataset &dataset, uint32_t key) {
    const auto &spec = dataset.spec();
    size_t k = spec.key_index(key);
    uint32_t mod = spec.modulus();
    Heatmap map;
    map.key = key;
    map.n = spec.n;
    map.counts.assign(mod, std::vector<uint64_t>(mod, 0));
    for (Outcome o : dataset.group(k)) {
        DecodedShot d = split_outcome(o, spec.n);
        map.counts[d.v][d.u]++;
    }
    for (uint32_t u = 0; u < mod; u++) {
        map.overlay.emplace_back(u, (key * u) & (mod - 1));
    }
    return map;
}

std::string heatmap_csv(const Heatmap &map) {
    std::ostringstream out;
    for (const auto &row : map.counts) {
        for (size_t u = 0; u < row.size(); u++) {
            out << (u ? "," : "") << row[u];
        }
        out << '\n';
    }
    return out.str();
}

std::string heatmap_pgm(const Heatmap &map) {
    uint64_t peak = 1;
    for (const auto &row : map.counts) {
        for (uint64_t c : row) {
            peak = std::max(peak, c);
        }
    }
    size_t side = map.counts.size();
    std::ostringstream out;
    out << "P2\n# key " << map.key << "\n" << side << ' ' << side << "\n255\n";
    for (size_t r = side; r-- > 0;) {
        const auto &row = map.counts[r];
        for (size_t u = 0; u < row.size(); u++) {
            uint64_t shade = 255 - (row[u] * 255) / peak;
            out << (u ? " " : "") << shade;
        }
        out << '\n';
    }
    return out.str();
}

std::string heatmap_overlay_text(const Heatmap &map) {
    std::ostringstream out;
    out << "u,v\n";
    for (const auto &[u, v] : map.overlay) {
        out << u << ',' << v << '\n';
    }
    return out.str();
}

}  // namespace ridgeinfo
