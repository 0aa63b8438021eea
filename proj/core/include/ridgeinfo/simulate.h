#ifndef RIDGEINFO_SIMULATE_H
#define RIDGEINFO_SIMULATE_H

#include <cstdint>
#include <vector>

#include "ridgeinfo/bits.h"
#include "ridgeinfo/dataset.h"

namespace ridgeinfo {

/// Ridge/uniform mixture followed by independent bit flips and an optional
/// per-bit asymmetric bias channel.
///
/// bias[i] > 0 sets a 0 bit to 1 with probability 2*bias[i]; bias[i] < 0
/// clears a 1 bit with probability 2*|bias[i]|. A fair bit therefore ends
/// with one-probability 0.5 + bias[i]. Empty bias means no bias.
struct NoiseModel {
    double lambda = 1.0;
    double q = 0.0;
    std::vector<double> bias;

    /// Throws InputError unless lambda in [0,1], q in [0,0.5], |bias| < 0.5
    /// and bias is empty or has bit_count entries.
    void validate(unsigned bit_count) const;
};

/// Per-key outcome distribution; probs[key_index][u + 2^n * v].
struct ExactJoint {
    unsigned n = 4;
    std::vector<uint32_t> keys;
    std::vector<std::vector<double>> probs;

    /// Probability mass on the key's own ridge, averaged over keys.
    double pooled_hit_probability() const;
};

ExactJoint exact_distribution(const ExperimentSpec &spec, const NoiseModel &noise);

/// Inverse-CDF sampling per key; key i draws from Stream(derive_seed(seed, i)).
Dataset sample_dataset(const ExperimentSpec &spec, const NoiseModel &noise, uint64_t seed);

/// Mixture weight whose exact pooled ridge-hit probability equals target
/// (within 1e-9), by bisection over [0,1]. `noise.lambda` is ignored.
/// Throws NumericError when the target is not strictly above the lambda=0
/// floor or above what lambda=1 reaches.
double calibrate_lambda(double target_p_hit, const NoiseModel &noise, const ExperimentSpec &spec);
double calibrate_lambda(double target_p_hit, double q, const ExperimentSpec &spec);

}  // namespace ridgeinfo

#endif
