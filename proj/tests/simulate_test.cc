#include "ridgeinfo/simulate.h"

#include <cmath>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles.h"
#include "ridgeinfo/errors.h"
#include "ridgeinfo/parallel.h"
#include "ridgeinfo/ridge_metrics.h"

using namespace ridgeinfo;

TEST(simulate, noiseless_ridge_distribution) {
    ExperimentSpec spec;
    auto joint = exact_distribution(spec, NoiseModel{1.0, 0.0, {}});
    const auto &p = joint.probs[spec.key_index(1)];
    for (uint32_t u = 0; u < 16; u++) {
        for (uint32_t v = 0; v < 16; v++) {
            EXPECT_DOUBLE_EQ(p[u + 16 * v], v == u ? 1.0 / 16 : 0.0);
        }
    }
}

TEST(simulate, uniform_limits) {
    ExperimentSpec spec;
    for (auto noise : {NoiseModel{0.0, 0.0, {}}, NoiseModel{0.0, 0.2, {}}, NoiseModel{0.7, 0.5, {}}, NoiseModel{1.0, 0.5, {}}}) {
        auto joint = exact_distribution(spec, noise);
        for (const auto &row : joint.probs) {
            for (double x : row) {
                ASSERT_NEAR(x, 1.0 / 256, 1e-15);
            }
        }
    }
}

TEST(simulate, rows_sum_to_one) {
    ExperimentSpec spec;
    std::vector<double> bias{0.05, -0.1, 0.2, 0, 0.01, -0.3, 0.4, -0.49};
    for (double lambda : {0.0, 0.3, 1.0}) {
        for (double q : {0.0, 0.07, 0.5}) {
            auto joint = exact_distribution(spec, NoiseModel{lambda, q, bias});
            for (const auto &row : joint.probs) {
                double s = 0;
                for (double x : row) {
                    ASSERT_GE(x, 0.0);
                    s += x;
                }
                ASSERT_NEAR(s, 1.0, 1e-12);
            }
        }
    }
}

TEST(simulate, bias_shifts_fair_bit_marginal) {
    ExperimentSpec spec;
    std::vector<double> bias(8, 0.0);
    bias[2] = 0.07;
    bias[5] = -0.1;
    auto joint = exact_distribution(spec, NoiseModel{0.0, 0.0, bias});
    double one2 = 0, one5 = 0;
    for (size_t o = 0; o < 256; o++) {
        one2 += ((o >> 2) & 1) * joint.probs[0][o];
        one5 += ((o >> 5) & 1) * joint.probs[0][o];
    }
    EXPECT_NEAR(one2, 0.57, 1e-12);
    EXPECT_NEAR(one5, 0.40, 1e-12);
}

TEST(simulate, hit_probability_identity_at_zero_flip) {
    ExperimentSpec spec;
    for (int i = 0; i <= 20; i++) {
        double lambda = i / 20.0;
        auto joint = exact_distribution(spec, NoiseModel{lambda, 0.0, {}});
        ASSERT_NEAR(joint.pooled_hit_probability(), lambda + (1 - lambda) / 16.0, 1e-13);
    }
}

TEST(simulate, hit_probability_monotone) {
    ExperimentSpec spec;
    for (int qi = 0; qi <= 10; qi++) {
        double prev = -1;
        for (int li = 0; li <= 10; li++) {
            double h = exact_distribution(spec, NoiseModel{li / 10.0, qi * 0.05, {}}).pooled_hit_probability();
            ASSERT_GE(h, prev - 1e-15);
            prev = h;
        }
    }
    for (int li = 0; li <= 10; li++) {
        double prev = 2;
        for (int qi = 0; qi <= 10; qi++) {
            double h = exact_distribution(spec, NoiseModel{li / 10.0, qi * 0.05, {}}).pooled_hit_probability();
            ASSERT_LE(h, prev + 1e-15);
            prev = h;
        }
    }
}

TEST(simulate, noiseless_samples_stay_on_ridge) {
    ExperimentSpec spec;
    spec.shots_per_key = 200;
    auto d = sample_dataset(spec, NoiseModel{1.0, 0.0, {}}, 3);
    for (size_t i = 0; i < d.size(); i++) {
        auto dec = split_outcome(d.outcomes()[i], 4);
        ASSERT_TRUE(ridge_hit(d.key_of(i), dec.u, dec.v, 4));
    }
}

TEST(simulate, uniform_samples_hit_rate_binomial) {
    ExperimentSpec spec;
    auto d = sample_dataset(spec, NoiseModel{0.0, 0.0, {}}, 11);
    double p = ridge_hit_probability(d).p_hit;
    EXPECT_NEAR(p, 1.0 / 16, oracle::three_sigma(1.0 / 16, 8192));
}

TEST(simulate, deterministic_and_thread_invariant) {
    ExperimentSpec spec;
    NoiseModel noise{0.2, 0.03, {}};
    set_max_threads(1);
    auto a = sample_dataset(spec, noise, 99);
    set_max_threads(4);
    auto b = sample_dataset(spec, noise, 99);
    set_max_threads(1);
    std::ostringstream sa, sb;
    write_dataset(sa, a);
    write_dataset(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_NE(sa.str().size(), 0u);
    auto c = sample_dataset(spec, noise, 100);
    EXPECT_FALSE(a == c);
}

TEST(simulate, empirical_converges_to_exact) {
    ExperimentSpec spec;
    spec.shots_per_key = 100000;
    NoiseModel noise{0.3, 0.05, {}};
    auto joint = exact_distribution(spec, noise);
    auto d = sample_dataset(spec, noise, 5);
    for (size_t k = 0; k < spec.keys.size(); k++) {
        std::vector<double> freq(256, 0.0);
        for (Outcome o : d.group(k)) {
            freq[o] += 1.0 / spec.shots_per_key;
        }
        double tv = 0;
        for (size_t o = 0; o < 256; o++) {
            tv += std::abs(freq[o] - joint.probs[k][o]);
        }
        EXPECT_LT(0.5 * tv, 0.05);
    }
}

TEST(simulate, calibrate_lambda_closed_form) {
    ExperimentSpec spec;
    double expected = (0.1830 - 1.0 / 16) / (1 - 1.0 / 16);
    EXPECT_NEAR(calibrate_lambda(0.1830, 0.0, spec), expected, 1e-12);
    EXPECT_NEAR(expected, 0.12853, 1e-5);
    EXPECT_NEAR(calibrate_lambda(1.0, 0.0, spec), 1.0, 1e-12);
    EXPECT_THROW(calibrate_lambda(1.0 / 16, 0.0, spec), NumericError);
    EXPECT_THROW(calibrate_lambda(0.01, 0.0, spec), NumericError);
    // q = 0.5 flattens everything, nothing above the floor is reachable.
    EXPECT_THROW(calibrate_lambda(0.2, 0.5, spec), NumericError);
}

TEST(simulate, calibrate_lambda_hits_target_under_noise) {
    ExperimentSpec spec;
    for (double q : {0.01, 0.05}) {
        double lambda = calibrate_lambda(0.1830, q, spec);
        double hit = exact_distribution(spec, NoiseModel{lambda, q, {}}).pooled_hit_probability();
        EXPECT_NEAR(hit, 0.1830, 1e-9);
    }
}

TEST(simulate, noise_validation) {
    ExperimentSpec spec;
    EXPECT_THROW(exact_distribution(spec, NoiseModel{1.5, 0, {}}), InputError);
    EXPECT_THROW(exact_distribution(spec, NoiseModel{1, 0.6, {}}), InputError);
    EXPECT_THROW(exact_distribution(spec, NoiseModel{1, 0, {0.1}}), InputError);
    EXPECT_THROW(exact_distribution(spec, NoiseModel{1, 0, std::vector<double>(8, 0.5)}), InputError);
}
