#include "ridgeinfo/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "oracles.h"
#include "ridgeinfo/errors.h"
#include "ridgeinfo/rng.h"
#include "ridgeinfo/simulate.h"

using namespace ridgeinfo;

TEST(diagnostics, uniform_marginals) {
    ExperimentSpec spec;
    auto d = sample_dataset(spec, NoiseModel{0.0, 0.0, {}}, 3);
    auto u = uniformity(d);
    ASSERT_EQ(u.one_probability.size(), 8u);
    EXPECT_LE(u.max_marginal_deviation, 0.02);
    EXPECT_EQ(u.covariances.size(), 28u);
    for (size_t i = 1; i < u.covariances.size(); i++) {
        ASSERT_GE(std::abs(u.covariances[i - 1].cov), std::abs(u.covariances[i].cov));
    }
    for (const auto &c : u.covariances) {
        ASSERT_LE(std::abs(c.cov), 0.25);
    }
}

TEST(diagnostics, perfectly_correlated_pair) {
    ExperimentSpec spec;
    spec.keys = {1};
    Stream rng(4);
    std::vector<Outcome> group;
    uint64_t ones = 0;
    for (int i = 0; i < 1000; i++) {
        Outcome o = static_cast<Outcome>(rng.below(256)) & ~Outcome{0b110000};
        if (rng.below(4) == 0) {
            o |= 0b110000;  // D5 = D6 = 1
            ones++;
        }
        group.push_back(o);
    }
    auto u = uniformity(Dataset::from_groups(spec, {group}));
    double p = ones / 1000.0;
    bool found = false;
    for (const auto &c : u.covariances) {
        if (c.i == 5 && c.j == 6) {
            found = true;
            EXPECT_NEAR(c.cov, p * (1 - p), 1e-12);
            EXPECT_EQ(c.tag, RegisterTag::within_b);
        }
    }
    EXPECT_TRUE(found);
}

TEST(diagnostics, covariance_tag_partition) {
    ExperimentSpec spec;
    auto u = uniformity(sample_dataset(spec, NoiseModel{0.3, 0.0, {}}, 1));
    int a = 0, b = 0, cross = 0;
    for (const auto &c : u.covariances) {
        ASSERT_LT(c.i, c.j);
        a += c.tag == RegisterTag::within_a;
        b += c.tag == RegisterTag::within_b;
        cross += c.tag == RegisterTag::cross;
    }
    EXPECT_EQ(a, 6);
    EXPECT_EQ(b, 6);
    EXPECT_EQ(cross, 16);
}

TEST(diagnostics, stratified_split_sizes) {
    ExperimentSpec spec;
    auto d = sample_dataset(spec, NoiseModel{0.2, 0.0, {}}, 1);
    auto s = stratified_split(d, 5);
    EXPECT_EQ(s.train.size(), 4096u);
    EXPECT_EQ(s.test.size(), 4096u);
    for (size_t k = 0; k < 8; k++) {
        EXPECT_EQ(s.train.group_size(k), 512u);
        EXPECT_EQ(s.test.group_size(k), 512u);
    }
    auto again = stratified_split(d, 5);
    EXPECT_EQ(again.train, s.train);
    EXPECT_EQ(again.test, s.test);

    ExperimentSpec small;
    small.keys = {1, 3};
    auto odd = stratified_split(Dataset::from_groups(small, {{1, 2, 3}, {4, 5, 6}}), 1);
    EXPECT_EQ(odd.train.group_size(0), 1u);
    EXPECT_EQ(odd.test.group_size(0), 2u);
}

TEST(diagnostics, predictions_are_normalized_and_positive) {
    ExperimentSpec spec;
    spec.shots_per_key = 200;
    auto d = sample_dataset(spec, NoiseModel{0.4, 0.02, {}}, 2);
    MaxEntConfig quick{1e-3, 0.1, 50};
    for (auto v : {AblationVariant::marginals_only, AblationVariant::pairwise, AblationVariant::full_bitstring}) {
        auto model = train_ablation_model(d, v, quick);
        for (Outcome o = 0; o < 256; o += 7) {
            auto p = model->predict(o);
            ASSERT_EQ(p.size(), 8u);
            double s = std::accumulate(p.begin(), p.end(), 0.0);
            ASSERT_NEAR(s, 1.0, 1e-9);
            for (double x : p) {
                ASSERT_GT(x, 0.0);
            }
        }
    }
    ExperimentSpec one;
    one.keys = {1};
    EXPECT_THROW(
        train_ablation_model(Dataset::from_groups(one, {{1, 2}}), AblationVariant::marginals_only), InputError);
}

TEST(diagnostics, pairwise_separates_pair_pattern_classes) {
    // Key is the (D1, D2) pattern; other bits are noise.
    ExperimentSpec spec;
    spec.n = 2;
    spec.keys = {0, 1, 2, 3};
    std::vector<std::vector<Outcome>> groups(4);
    Stream rng(12);
    for (uint32_t k = 0; k < 4; k++) {
        for (int i = 0; i < 400; i++) {
            groups[k].push_back(k | (static_cast<Outcome>(rng.below(4)) << 2));
        }
    }
    auto d = Dataset::from_groups(spec, groups);
    auto split = stratified_split(d, 3);
    auto model = train_ablation_model(split.train, AblationVariant::pairwise);
    size_t correct = 0;
    for (size_t i = 0; i < split.test.size(); i++) {
        auto p = model->predict(split.test.outcomes()[i]);
        correct += static_cast<size_t>(std::max_element(p.begin(), p.end()) - p.begin()) == split.test.labels()[i];
    }
    EXPECT_EQ(correct, split.test.size());
}

TEST(diagnostics, uniform_noise_ablation_is_chance) {
    ExperimentSpec spec;
    auto d = sample_dataset(spec, NoiseModel{0.0, 0.0, {}}, 41);
    auto r = run_ablation(d, 6);
    ASSERT_EQ(r.models.size(), 3u);
    EXPECT_EQ(r.train_size + r.test_size, 8192u);
    for (const auto &m : r.models) {
        EXPECT_NEAR(m.accuracy, 0.125, oracle::three_sigma(0.125, 4096)) << m.model;
        EXPECT_GE(m.ece, 0.0);
        EXPECT_LE(m.ece, 1.0);
    }
}

TEST(diagnostics, maxent_gradient_matches_finite_differences) {
    ExperimentSpec spec;
    spec.shots_per_key = 60;
    auto d = sample_dataset(spec, NoiseModel{0.5, 0.05, {}}, 9);
    auto problem = MaxEntProblem::from_dataset(d, 1e-3);
    Stream rng(3);
    for (int trial = 0; trial < 5; trial++) {
        std::vector<double> x(problem.num_params());
        for (double &v : x) {
            v = rng.uniform() - 0.5;
        }
        std::vector<double> grad(x.size());
        maxent_objective(problem, x, grad);
        for (size_t i = 0; i < x.size(); i += 5) {
            const double h = 1e-5;
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            double fd = (maxent_objective(problem, xp, {}) - maxent_objective(problem, xm, {})) / (2 * h);
            double scale = std::max(std::abs(fd), std::abs(grad[i]));
            if (scale < 1e-8) {
                continue;
            }
            ASSERT_LT(std::abs(fd - grad[i]) / scale, 1e-4) << "param " << i;
        }
    }
}

TEST(diagnostics, maxent_training_is_deterministic) {
    ExperimentSpec spec;
    spec.shots_per_key = 100;
    auto d = sample_dataset(spec, NoiseModel{0.5, 0.0, {}}, 9);
    auto problem = MaxEntProblem::from_dataset(d, 1e-3);
    MaxEntConfig cfg{1e-3, 0.1, 100};
    EXPECT_EQ(train_maxent(problem, cfg), train_maxent(problem, cfg));
    auto params = train_maxent(problem, cfg);
    EXPECT_LT(maxent_objective(problem, params, {}), std::log(8.0));
}

TEST(diagnostics, ece_examples) {
    std::vector<Prediction> right{{{1.0, 0.0}, 0}, {{0.0, 1.0}, 1}};
    EXPECT_EQ(ece(right), 0.0);
    std::vector<Prediction> half{{{1.0, 0.0}, 0}, {{1.0, 0.0}, 1}};
    EXPECT_DOUBLE_EQ(ece(half), 0.5);
    std::vector<Prediction> none;
    EXPECT_THROW(ece(none), InputError);
    EXPECT_THROW(ece(right, 0), InputError);
}

TEST(diagnostics, calibrated_predictor_has_small_ece) {
    Stream rng(2718);
    std::vector<Prediction> preds;
    const size_t classes = 8;
    for (int i = 0; i < 100000; i++) {
        double conf = 0.125 + 0.875 * rng.uniform();
        size_t predicted = rng.below(classes);
        std::vector<double> p(classes, (1 - conf) / (classes - 1));
        p[predicted] = conf;
        bool correct = rng.uniform() < conf;
        size_t truth = correct ? predicted : (predicted + 1 + rng.below(classes - 1)) % classes;
        preds.push_back({p, truth});
    }
    auto cal = calibration(preds, 10);
    EXPECT_LT(cal.ece, 0.02);
    uint64_t total = 0;
    for (const auto &b : cal.bins) {
        total += b.count;
    }
    EXPECT_EQ(total, 100000u);
}
