#include "ridgeinfo/infolattice.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ridgeinfo/errors.h"
#include "ridgeinfo/parallel.h"

namespace ridgeinfo {

JointTable::JointTable(size_t num_keys, unsigned num_bits)
    : num_keys_(num_keys),
      num_bits_(num_bits),
      outcome_count_(size_t{1} << num_bits),
      weights_(num_keys * outcome_count_, 0.0) {
}

JointTable JointTable::from_labels(
    size_t num_keys, unsigned num_bits, std::span<const Outcome> outcomes, std::span<const uint16_t> labels) {
    if (outcomes.size() != labels.size()) {
        throw InputError("outcome and label counts differ");
    }
    JointTable t(num_keys, num_bits);
    for (size_t i = 0; i < outcomes.size(); i++) {
        t.add(labels[i], outcomes[i]);
    }
    return t;
}

JointTable JointTable::from_dataset(const Dataset &dataset) {
    return from_labels(
        dataset.num_groups(), dataset.spec().bit_count(), dataset.outcomes(), dataset.labels());
}

JointTable JointTable::from_exact(const ExactJoint &joint) {
    JointTable t(joint.keys.size(), 2 * joint.n);
    double prior = 1.0 / static_cast<double>(joint.keys.size());
    for (size_t k = 0; k < joint.keys.size(); k++) {
        for (size_t o = 0; o < joint.probs[k].size(); o++) {
            t.add(k, static_cast<Outcome>(o), joint.probs[k][o] * prior);
        }
    }
    return t;
}

double JointTable::total() const {
    double s = 0;
    for (double w : weights_) {
        s += w;
    }
    return s;
}

namespace {

// Dense index of `outcome` restricted to the bits of `mask` (software pext).
uint32_t compress(Outcome outcome, BitMask mask) {
    uint32_t out = 0;
    unsigned pos = 0;
    while (mask) {
        unsigned bit = static_cast<unsigned>(__builtin_ctz(mask));
        out |= ((outcome >> bit) & 1u) << pos++;
        mask &= mask - 1;
    }
    return out;
}

}  // namespace

double plugin_mi(const JointTable &table, BitMask subset) {
    if (subset == 0) {
        throw InputError("mutual information needs a nonempty bit subset");
    }
    if (table.num_bits() < 32 && (subset >> table.num_bits()) != 0) {
        throw InputError("bit subset exceeds the measured bits");
    }
    const size_t cells = size_t{1} << mask_order(subset);
    const size_t keys = table.num_keys();
    std::vector<double> joint(keys * cells, 0.0);
    std::vector<double> key_w(keys, 0.0);
    std::vector<double> cell_w(cells, 0.0);

    std::vector<uint32_t> index(table.outcome_count());
    for (size_t o = 0; o < index.size(); o++) {
        index[o] = compress(static_cast<Outcome>(o), subset);
    }
    for (size_t k = 0; k < keys; k++) {
        double *row = &joint[k * cells];
        for (size_t o = 0; o < index.size(); o++) {
            row[index[o]] += table.weight(k, static_cast<Outcome>(o));
        }
    }
    double total = 0;
    for (size_t k = 0; k < keys; k++) {
        for (size_t c = 0; c < cells; c++) {
            double w = joint[k * cells + c];
            key_w[k] += w;
            cell_w[c] += w;
        }
        total += key_w[k];
    }
    if (!(total > 0)) {
        throw InputError("mutual information needs nonzero total weight");
    }
    double acc = 0;
    for (size_t k = 0; k < keys; k++) {
        for (size_t c = 0; c < cells; c++) {
            double w = joint[k * cells + c];
            if (w > 0) {
                acc += w * std::log2(w * total / (key_w[k] * cell_w[c]));
            }
        }
    }
    return std::max(0.0, acc / total);
}

double plugin_mi(const Dataset &dataset, BitMask subset) {
    return plugin_mi(JointTable::from_dataset(dataset), subset);
}

std::vector<BitMask> lattice_masks(unsigned num_bits, unsigned k_max) {
    std::vector<BitMask> out;
    BitMask limit = BitMask{1} << num_bits;
    for (unsigned order = 1; order <= std::min(k_max, num_bits); order++) {
        for (BitMask m = 1; m < limit; m++) {
            if (mask_order(m) == order) {
                out.push_back(m);
            }
        }
    }
    return out;
}

LatticeFunction::LatticeFunction(unsigned num_bits, unsigned k_max)
    : num_bits_(num_bits),
      k_max_(std::min(k_max, num_bits)),
      masks_(lattice_masks(num_bits, k_max)),
      values_(size_t{1} << num_bits, 0.0),
      defined_(size_t{1} << num_bits, 0) {
    if (num_bits > 2 * kMaxRegisterWidth) {
        throw InputError("lattice supports at most 16 bits");
    }
}

bool LatticeFunction::contains(BitMask mask) const {
    return mask != 0 && mask < values_.size() && mask_order(mask) <= k_max_;
}

double LatticeFunction::at(BitMask mask) const {
    if (mask == 0) {
        return 0.0;
    }
    if (!contains(mask)) {
        throw InputError("subset " + std::to_string(mask) + " is outside the lattice");
    }
    if (!defined_[mask]) {
        throw InputError("lattice function is incomplete at subset " + std::to_string(mask));
    }
    return values_[mask];
}

void LatticeFunction::set(BitMask mask, double value) {
    if (!contains(mask)) {
        throw InputError("subset " + std::to_string(mask) + " is outside the lattice");
    }
    values_[mask] = value;
    defined_[mask] = 1;
}

bool LatticeFunction::complete() const {
    return std::all_of(masks_.begin(), masks_.end(), [&](BitMask m) {
        return defined_[m] != 0;
    });
}

LatticeFunction compute_g(const JointTable &table, unsigned k_max) {
    if (k_max > table.num_bits()) {
        throw InputError("k_max exceeds the number of measured bits");
    }
    LatticeFunction g(table.num_bits(), k_max);
    const auto &masks = g.masks();
    std::vector<double> values(masks.size());
    parallel_for(masks.size(), [&](size_t i) {
        values[i] = plugin_mi(table, masks[i]);
    });
    for (size_t i = 0; i < masks.size(); i++) {
        g.set(masks[i], values[i]);
    }
    return g;
}

LatticeFunction compute_g(const Dataset &dataset, unsigned k_max) {
    return compute_g(JointTable::from_dataset(dataset), k_max);
}

namespace {

// Sum over nonempty submasks S of T of sign(|T|-|S|) * h(S).
template <bool Alternating>
LatticeFunction subset_sum(const LatticeFunction &h) {
    if (!h.complete()) {
        throw InputError("lattice function is incomplete");
    }
    LatticeFunction out(h.num_bits(), h.k_max());
    for (BitMask t : h.masks()) {
        unsigned order = mask_order(t);
        double acc = 0;
        for (BitMask s = t; s != 0; s = (s - 1) & t) {
            double v = h.at(s);
            if (Alternating && ((order - mask_order(s)) & 1u)) {
                acc -= v;
            } else {
                acc += v;
            }
        }
        out.set(t, acc);
    }
    return out;
}

}  // namespace

LatticeFunction mobius_invert(const LatticeFunction &g) {
    return subset_sum<true>(g);
}

LatticeFunction zeta_transform(const LatticeFunction &f) {
    return subset_sum<false>(f);
}

RegisterTag register_tag(BitMask mask, unsigned n) {
    BitMask a = (BitMask{1} << n) - 1;
    BitMask b = a << n;
    if ((mask & ~a) == 0) {
        return RegisterTag::within_a;
    }
    if ((mask & ~b) == 0) {
        return RegisterTag::within_b;
    }
    return RegisterTag::cross;
}

const char *register_tag_name(RegisterTag tag) {
    switch (tag) {
        case RegisterTag::within_a:
            return "within-A";
        case RegisterTag::within_b:
            return "within-B";
        case RegisterTag::cross:
            return "cross";
    }
    return "?";
}

std::vector<OrderMass> positive_mass(const LatticeFunction &f, unsigned n) {
    if (!f.complete()) {
        throw InputError("lattice function is incomplete");
    }
    if (2 * n != f.num_bits()) {
        throw InputError("register width does not match lattice bit count");
    }
    std::vector<OrderMass> out(f.k_max());
    for (unsigned k = 0; k < f.k_max(); k++) {
        out[k].order = k + 1;
    }
    for (BitMask t : f.masks()) {
        double v = f.at(t);
        if (v <= 0) {
            continue;
        }
        auto &m = out[mask_order(t) - 1];
        m.total += v;
        if (register_tag(t, n) == RegisterTag::cross) {
            m.cross += v;
        } else {
            m.within += v;
        }
    }
    for (auto &m : out) {
        m.cross_fraction = m.total > 0 ? m.cross / m.total : 0.0;
    }
    return out;
}

LatticeDecomposition decompose(const JointTable &table, unsigned n, unsigned k_max) {
    if (table.num_bits() != 2 * n) {
        throw InputError("register width does not match table bit count");
    }
    LatticeDecomposition out;
    out.n = n;
    out.k_max = k_max;
    out.g = compute_g(table, k_max);
    out.f = mobius_invert(out.g);
    out.mass = positive_mass(out.f, n);
    if (k_max >= 3) {
        out.cps = out.mass[2].total;
    }
    return out;
}

LatticeDecomposition decompose(const Dataset &dataset, unsigned k_max) {
    return decompose(JointTable::from_dataset(dataset), dataset.spec().n, k_max);
}

double cps(const JointTable &table, unsigned n, unsigned k_max) {
    if (k_max < 3) {
        throw InputError("order-3 synergy needs k_max >= 3");
    }
    return *decompose(table, n, k_max).cps;
}

double cps(const Dataset &dataset, unsigned k_max) {
    return cps(JointTable::from_dataset(dataset), dataset.spec().n, k_max);
}

Dataset key_slice(const Dataset &dataset, std::span<const uint32_t> keys) {
    const auto &spec = dataset.spec();
    for (uint32_t k : keys) {
        if (!spec.has_key(k)) {
            throw InputError("slice key " + std::to_string(k) + " not in spec");
        }
    }
    ExperimentSpec sliced = spec;
    sliced.keys.clear();
    std::vector<std::vector<Outcome>> groups;
    for (size_t i = 0; i < spec.keys.size(); i++) {
        if (std::find(keys.begin(), keys.end(), spec.keys[i]) == keys.end()) {
            continue;
        }
        sliced.keys.push_back(spec.keys[i]);
        auto g = dataset.group(i);
        groups.emplace_back(g.begin(), g.end());
    }
    if (sliced.keys.empty()) {
        throw InputError("key slice selects no keys");
    }
    return Dataset::from_groups(std::move(sliced), std::move(groups));
}

}  // namespace ridgeinfo
