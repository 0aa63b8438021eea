#include "ridgeinfo/simulate.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ridgeinfo/errors.h"
#include "ridgeinfo/parallel.h"
#include "ridgeinfo/rng.h"

namespace ridgeinfo {

void NoiseModel::validate(unsigned bit_count) const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw InputError("lambda must be in [0, 1]");
    }
    if (!(q >= 0.0 && q <= 0.5)) {
        throw InputError("flip probability q must be in [0, 0.5]");
    }
    if (!bias.empty() && bias.size() != bit_count) {
        throw InputError(
            "bias needs " + std::to_string(bit_count) + " entries, got " + std::to_string(bias.size()));
    }
    for (double b : bias) {
        if (!(std::abs(b) < 0.5)) {
            throw InputError("bias offsets must lie in (-0.5, 0.5)");
        }
    }
}

double ExactJoint::pooled_hit_probability() const {
    double total = 0;
    uint32_t mod = uint32_t{1} << n;
    for (size_t k = 0; k < keys.size(); k++) {
        for (uint32_t u = 0; u < mod; u++) {
            uint32_t v = (keys[k] * u) & (mod - 1);
            total += probs[k][join_outcome(u, v, n)];
        }
    }
    return total / static_cast<double>(keys.size());
}

namespace {

// Applies a 2x2 column-stochastic channel to bit `bit` of every outcome.
// p01 = P(out=1 | in=0), p10 = P(out=0 | in=1).
void apply_bit_channel(std::vector<double> &p, unsigned bit, double p01, double p10) {
    if (p01 == 0.0 && p10 == 0.0) {
        return;
    }
    size_t stride = size_t{1} << bit;
    for (size_t base = 0; base < p.size(); base += 2 * stride) {
        for (size_t off = 0; off < stride; off++) {
            double &zero = p[base + off];
            double &one = p[base + off + stride];
            double z = zero * (1.0 - p01) + one * p10;
            double o = zero * p01 + one * (1.0 - p10);
            zero = z;
            one = o;
        }
    }
}

}  // namespace

ExactJoint exact_distribution(const ExperimentSpec &spec, const NoiseModel &noise) {
    spec.validate();
    noise.validate(spec.bit_count());
    const unsigned n = spec.n;
    const uint32_t mod = spec.modulus();
    const size_t outcomes = spec.outcome_count();

    ExactJoint out;
    out.n = n;
    out.keys = spec.keys;
    out.probs.reserve(spec.keys.size());
    const double floor = (1.0 - noise.lambda) / static_cast<double>(outcomes);
    const double on_ridge = noise.lambda / static_cast<double>(mod);
    for (uint32_t key : spec.keys) {
        std::vector<double> p(outcomes, floor);
        for (uint32_t u = 0; u < mod; u++) {
            p[join_outcome(u, (key * u) & (mod - 1), n)] += on_ridge;
        }
        for (unsigned b = 0; b < spec.bit_count(); b++) {
            apply_bit_channel(p, b, noise.q, noise.q);
            if (!noise.bias.empty()) {
                double beta = noise.bias[b];
                apply_bit_channel(p, b, beta > 0 ? 2 * beta : 0.0, beta < 0 ? -2 * beta : 0.0);
            }
        }
        out.probs.push_back(std::move(p));
    }
    return out;
}

Dataset sample_dataset(const ExperimentSpec &spec, const NoiseModel &noise, uint64_t seed) {
    ExactJoint joint = exact_distribution(spec, noise);
    std::vector<std::vector<Outcome>> groups(spec.keys.size());
    parallel_for(spec.keys.size(), [&](size_t k) {
        const auto &p = joint.probs[k];
        std::vector<double> cdf(p.size());
        double acc = 0;
        for (size_t i = 0; i < p.size(); i++) {
            acc += p[i];
            cdf[i] = acc;
        }
        Stream rng(derive_seed(seed, k));
        auto &group = groups[k];
        group.reserve(spec.shots_per_key);
        for (uint32_t s = 0; s < spec.shots_per_key; s++) {
            double x = rng.uniform() * acc;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
            size_t idx = std::min<size_t>(static_cast<size_t>(it - cdf.begin()), cdf.size() - 1);
            group.push_back(static_cast<Outcome>(idx));
        }
    });
    return Dataset::from_groups(spec, std::move(groups));
}

double calibrate_lambda(double target_p_hit, const NoiseModel &noise, const ExperimentSpec &spec) {
    spec.validate();
    auto hit_at = [&](double lambda) {
        NoiseModel m = noise;
        m.lambda = lambda;
        return exact_distribution(spec, m).pooled_hit_probability();
    };
    const double uniform_floor = 1.0 / static_cast<double>(spec.modulus());
    double lo_hit = hit_at(0.0);
    double hi_hit = hit_at(1.0);
    if (!(target_p_hit > uniform_floor) || !(target_p_hit > lo_hit)) {
        throw NumericError(
            "target ridge-hit probability " + std::to_string(target_p_hit) +
            " is not above the uniform floor");
    }
    if (target_p_hit > hi_hit + 1e-12) {
        throw NumericError(
            "target ridge-hit probability " + std::to_string(target_p_hit) +
            " exceeds the maximum " + std::to_string(hi_hit) + " reachable under this noise");
    }
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-15; iter++) {
        double mid = 0.5 * (lo + hi);
        if (hit_at(mid) < target_p_hit) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::min(1.0, 0.5 * (lo + hi));
}

double calibrate_lambda(double target_p_hit, double q, const ExperimentSpec &spec) {
    NoiseModel noise;
    noise.q = q;
    return calibrate_lambda(target_p_hit, noise, spec);
}

}  // namespace ridgeinfo
