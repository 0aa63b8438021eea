#include "ridgeinfo/infolattice.h"

#include <cmath>

#include "gtest/gtest.h"
#include "oracles.h"
#include "ridgeinfo/errors.h"
#include "ridgeinfo/parallel.h"
#include "ridgeinfo/rng.h"

using namespace ridgeinfo;

namespace {

JointTable parity_table() {
    JointTable t(2, 4);
    for (const auto &row : oracle::parity_rows()) {
        Outcome o = 0;
        for (int b = 0; b < 4; b++) {
            o |= static_cast<Outcome>(row.bits[b]) << b;
        }
        t.add(row.key, o, row.weight);
    }
    return t;
}

std::vector<int> positions_of(BitMask m) {
    std::vector<int> out;
    for (int b = 0; b < 32; b++) {
        if ((m >> b) & 1u) {
            out.push_back(b);
        }
    }
    return out;
}

Dataset random_dataset(uint64_t seed, size_t shots_per_key) {
    ExperimentSpec spec;
    Stream rng(seed);
    std::vector<std::vector<Outcome>> groups(spec.keys.size());
    // Skewed per-key distributions so g carries real structure.
    for (size_t k = 0; k < groups.size(); k++) {
        uint32_t favored = static_cast<uint32_t>(rng.below(256));
        for (size_t i = 0; i < shots_per_key; i++) {
            Outcome o = static_cast<Outcome>(rng.below(256));
            if (rng.below(3) == 0) {
                o = (o & 0x0f) | (favored & 0xf0);
            }
            groups[k].push_back(o);
        }
    }
    return Dataset::from_groups(spec, groups);
}

}  // namespace

TEST(infolattice, lattice_sizes) {
    EXPECT_EQ(lattice_masks(8, 3).size(), 92u);
    EXPECT_EQ(lattice_masks(8, 1).size(), 8u);
    EXPECT_EQ(lattice_masks(8, 8).size(), 255u);
    auto masks = lattice_masks(8, 3);
    for (size_t i = 1; i < masks.size(); i++) {
        ASSERT_LE(mask_order(masks[i - 1]), mask_order(masks[i]));
    }
}

TEST(infolattice, independence_gives_zero) {
    ExperimentSpec spec;
    for (double q : {0.0, 0.2}) {
        auto table = JointTable::from_exact(exact_distribution(spec, NoiseModel{0.0, q, {}}));
        for (BitMask m : lattice_masks(8, 3)) {
            ASSERT_NEAR(plugin_mi(table, m), 0.0, 1e-12);
        }
    }
}

TEST(infolattice, key_indicator_bit_is_one_bit) {
    JointTable t(2, 2);
    t.add(0, 0b00, 1);
    t.add(0, 0b10, 1);
    t.add(1, 0b01, 1);
    t.add(1, 0b11, 1);
    EXPECT_NEAR(plugin_mi(t, 0b01), 1.0, 1e-15);
    EXPECT_NEAR(plugin_mi(t, 0b10), 0.0, 1e-15);
    EXPECT_NEAR(plugin_mi(t, 0b11), 1.0, 1e-15);
}

TEST(infolattice, parity_matches_brute_force_oracle) {
    auto table = parity_table();
    auto rows = oracle::parity_rows();
    for (BitMask m : lattice_masks(4, 4)) {
        double expected = oracle::mutual_information(rows, positions_of(m));
        ASSERT_NEAR(plugin_mi(table, m), expected, 1e-12) << "mask " << m;
    }
    // Oracle values: zero for every subset of 1 or 2 bits, 1 bit for {1,2,3}.
    EXPECT_NEAR(oracle::mutual_information(rows, {0, 1}), 0.0, 1e-12);
    EXPECT_NEAR(oracle::mutual_information(rows, {0, 1, 2}), 1.0, 1e-12);
}

TEST(infolattice, plugin_matches_oracle_on_random_data) {
    auto d = random_dataset(17, 40);
    std::vector<oracle::Row> rows;
    for (size_t i = 0; i < d.size(); i++) {
        auto s = d.shot(i);
        rows.push_back({s.key, std::vector<int>(s.bits.begin(), s.bits.end()), 1.0});
    }
    auto table = JointTable::from_dataset(d);
    for (BitMask m : lattice_masks(8, 3)) {
        ASSERT_NEAR(plugin_mi(table, m), oracle::mutual_information(rows, positions_of(m)), 1e-12);
    }
}

TEST(infolattice, plugin_bounds) {
    auto d = random_dataset(5, 30);
    auto g = compute_g(d, 3);
    for (BitMask m : g.masks()) {
        double v = g.at(m);
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, std::min(3.0, static_cast<double>(mask_order(m))) + 1e-12);
    }
}

TEST(infolattice, g_is_inclusion_monotone) {
    for (uint64_t seed = 0; seed < 20; seed++) {
        auto g = compute_g(random_dataset(seed, 25), 3);
        for (BitMask t : g.masks()) {
            for (BitMask s = (t - 1) & t; s != 0; s = (s - 1) & t) {
                ASSERT_LE(g.at(s), g.at(t) + 1e-12);
            }
        }
    }
}

TEST(infolattice, mobius_of_additive_function) {
    LatticeFunction g(8, 3);
    std::vector<double> c{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    for (BitMask m : g.masks()) {
        double s = 0;
        for (int b : positions_of(m)) {
            s += c[b];
        }
        g.set(m, s);
    }
    auto f = mobius_invert(g);
    for (BitMask m : f.masks()) {
        if (mask_order(m) == 1) {
            ASSERT_NEAR(f.at(m), c[positions_of(m)[0]], 1e-15);
        } else {
            ASSERT_NEAR(f.at(m), 0.0, 1e-15);
        }
    }
}

TEST(infolattice, mobius_of_parity) {
    auto g = compute_g(parity_table(), 3);
    auto f = mobius_invert(g);
    for (BitMask m : f.masks()) {
        double expected = m == 0b0111 ? 1.0 : 0.0;
        ASSERT_NEAR(f.at(m), expected, 1e-12) << "mask " << m;
    }
    auto mass = positive_mass(f, 2);
    ASSERT_EQ(mass.size(), 3u);
    EXPECT_NEAR(mass[0].total, 0.0, 1e-12);
    EXPECT_NEAR(mass[1].total, 0.0, 1e-12);
    EXPECT_NEAR(mass[2].total, 1.0, 1e-12);
    EXPECT_NEAR(cps(parity_table(), 2), 1.0, 1e-12);
}

TEST(infolattice, zeta_mobius_round_trip) {
    Stream rng(123);
    for (unsigned k_max = 1; k_max <= 3; k_max++) {
        for (int trial = 0; trial < 50; trial++) {
            LatticeFunction g(8, k_max);
            for (BitMask m : g.masks()) {
                g.set(m, rng.uniform() * 2 - 1);
            }
            auto back = zeta_transform(mobius_invert(g));
            for (BitMask m : g.masks()) {
                ASSERT_NEAR(back.at(m), g.at(m), 1e-12);
            }
        }
    }
}

TEST(infolattice, singleton_and_pair_identities) {
    auto g = compute_g(random_dataset(9, 60), 3);
    auto f = mobius_invert(g);
    for (BitMask m : f.masks()) {
        if (mask_order(m) == 1) {
            ASSERT_EQ(f.at(m), g.at(m));
        } else if (mask_order(m) == 2) {
            BitMask lo = m & (~m + 1);
            ASSERT_NEAR(f.at(m), g.at(m) - g.at(lo) - g.at(m ^ lo), 1e-15);
        }
    }
    auto mass = positive_mass(f, 4);
    double singles = 0;
    for (BitMask m : g.masks()) {
        if (mask_order(m) == 1) {
            singles += g.at(m);
        }
    }
    EXPECT_NEAR(mass[0].total, singles, 1e-12);
}

TEST(infolattice, incomplete_lattice_rejected) {
    LatticeFunction g(8, 2);
    g.set(1, 0.5);
    EXPECT_FALSE(g.complete());
    EXPECT_THROW(mobius_invert(g), InputError);
    EXPECT_THROW(g.at(2), InputError);
    EXPECT_THROW(g.set(0b111, 1.0), InputError);
    EXPECT_EQ(g.at(0), 0.0);
}

TEST(infolattice, negative_f_has_no_positive_mass) {
    LatticeFunction f(8, 3);
    for (BitMask m : f.masks()) {
        f.set(m, -0.25);
    }
    for (const auto &m : positive_mass(f, 4)) {
        EXPECT_EQ(m.total, 0.0);
        EXPECT_EQ(m.cross_fraction, 0.0);
    }
}

TEST(infolattice, register_tags_and_split) {
    EXPECT_EQ(register_tag(0b00000111, 4), RegisterTag::within_a);
    EXPECT_EQ(register_tag(0b11100000, 4), RegisterTag::within_b);
    EXPECT_EQ(register_tag(0b00010001, 4), RegisterTag::cross);
    LatticeFunction f(8, 3);
    for (BitMask m : f.masks()) {
        f.set(m, 1.0);
    }
    auto mass = positive_mass(f, 4);
    // Order 3: C(4,3)*2 = 8 within, 56 - 8 = 48 cross.
    EXPECT_EQ(mass[2].within, 8.0);
    EXPECT_EQ(mass[2].cross, 48.0);
    EXPECT_EQ(mass[2].total, mass[2].within + mass[2].cross);
}

TEST(infolattice, noiseless_ridge_is_cross_register) {
    ExperimentSpec spec;
    auto table = JointTable::from_exact(exact_distribution(spec, NoiseModel{1.0, 0.0, {}}));
    auto d = decompose(table, 4, 3);
    EXPECT_GT(d.mass[2].cross_fraction, 0.8);
}

TEST(infolattice, sampled_parity_cps) {
    auto d = oracle::parity_dataset(100000, 31);
    EXPECT_NEAR(cps(d), 1.0, 0.02);
}

TEST(infolattice, uniform_data_cps_is_small_bias) {
    ExperimentSpec spec;
    auto d = sample_dataset(spec, NoiseModel{0.0, 0.0, {}}, 88);
    double c = cps(d);
    EXPECT_GT(c, 0.0);
    EXPECT_LT(c, 0.05);
}

TEST(infolattice, key_slices) {
    ExperimentSpec spec;
    spec.shots_per_key = 64;
    auto d = sample_dataset(spec, NoiseModel{0.5, 0.0, {}}, 2);
    std::vector<uint32_t> all(spec.keys.begin(), spec.keys.end());
    EXPECT_EQ(key_slice(d, all), d);

    std::vector<uint32_t> odd{7, 1, 5, 3};
    auto sliced = key_slice(d, odd);
    EXPECT_EQ(sliced.spec().keys, (std::vector<uint32_t>{1, 3, 5, 7}));
    EXPECT_EQ(sliced.size(), 4u * 64);

    std::vector<uint32_t> one{4};
    auto g = compute_g(key_slice(d, one), 3);
    for (BitMask m : g.masks()) {
        ASSERT_EQ(g.at(m), 0.0);
    }

    std::vector<uint32_t> none;
    EXPECT_THROW(key_slice(d, none), InputError);
    std::vector<uint32_t> unknown{9};
    EXPECT_THROW(key_slice(d, unknown), InputError);
}

TEST(infolattice, compute_g_thread_invariant) {
    auto d = random_dataset(3, 50);
    set_max_threads(1);
    auto a = compute_g(d, 3);
    set_max_threads(4);
    auto b = compute_g(d, 3);
    set_max_threads(1);
    EXPECT_EQ(a, b);
}
