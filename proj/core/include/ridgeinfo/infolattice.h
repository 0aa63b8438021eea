#ifndef RIDGEINFO_INFOLATTICE_H
#define RIDGEINFO_INFOLATTICE_H

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ridgeinfo/dataset.h"
#include "ridgeinfo/simulate.h"

namespace ridgeinfo {

/// Subset of detector bits; bit i-1 set means D_i is in the subset. Uses
/// the same bit positions as Outcome, so projection is `outcome & mask`.
using BitMask = uint32_t;

inline unsigned mask_order(BitMask mask) {
    return static_cast<unsigned>(__builtin_popcount(mask));
}

/// Nonnegative weights over (key index, outcome). Counts for sampled data,
/// probabilities for exact distributions.
class JointTable {
   public:
    JointTable(size_t num_keys, unsigned num_bits);

    static JointTable from_dataset(const Dataset &dataset);
    static JointTable from_labels(
        size_t num_keys, unsigned num_bits, std::span<const Outcome> outcomes, std::span<const uint16_t> labels);
    /// Exact per-key distributions with a uniform key prior.
    static JointTable from_exact(const ExactJoint &joint);

    void add(size_t key_index, Outcome outcome, double weight = 1.0) {
        weights_[key_index * outcome_count_ + outcome] += weight;
    }
    double weight(size_t key_index, Outcome outcome) const {
        return weights_[key_index * outcome_count_ + outcome];
    }
    size_t num_keys() const {
        return num_keys_;
    }
    unsigned num_bits() const {
        return num_bits_;
    }
    size_t outcome_count() const {
        return outcome_count_;
    }
    double total() const;

   private:
    size_t num_keys_;
    unsigned num_bits_;
    size_t outcome_count_;
    std::vector<double> weights_;
};

/// Plug-in I(K; D_S) in bits, 0 log 0 = 0. Clamped below at 0.
double plugin_mi(const JointTable &table, BitMask subset);
double plugin_mi(const Dataset &dataset, BitMask subset);

/// All nonempty masks over num_bits bits with order <= k_max, sorted by
/// (order, mask).
std::vector<BitMask> lattice_masks(unsigned num_bits, unsigned k_max);

/// Real-valued function on the truncated subset lattice; value(empty) = 0.
class LatticeFunction {
   public:
    LatticeFunction(unsigned num_bits, unsigned k_max);

    unsigned num_bits() const {
        return num_bits_;
    }
    unsigned k_max() const {
        return k_max_;
    }
    bool contains(BitMask mask) const;
    /// Throws InputError for masks outside the lattice or not yet set.
    double at(BitMask mask) const;
    void set(BitMask mask, double value);

    /// Every lattice mask, in lattice_masks order.
    const std::vector<BitMask> &masks() const {
        return masks_;
    }
    size_t size() const {
        return masks_.size();
    }
    bool complete() const;

    bool operator==(const LatticeFunction &) const = default;

   private:
    unsigned num_bits_;
    unsigned k_max_;
    std::vector<BitMask> masks_;
    std::vector<double> values_;
    std::vector<uint8_t> defined_;
};

/// g(S) = I(K; D_S) for every lattice subset.
LatticeFunction compute_g(const JointTable &table, unsigned k_max);
LatticeFunction compute_g(const Dataset &dataset, unsigned k_max);

/// f(T) = sum over S subset of T of (-1)^{|T|-|S|} g(S). Exact on the
/// truncated lattice since every subset of T has order <= |T|.
/// Throws InputError if g is incomplete.
LatticeFunction mobius_invert(const LatticeFunction &g);

/// g(S) = sum over T subset of S of f(T); inverse of mobius_invert.
LatticeFunction zeta_transform(const LatticeFunction &f);

enum class RegisterTag { within_a, within_b, cross };

/// within_a when every bit is in D_1..D_n, within_b when every bit is in
/// D_{n+1}..D_{2n}, cross otherwise.
RegisterTag register_tag(BitMask mask, unsigned n);
const char *register_tag_name(RegisterTag tag);

struct OrderMass {
    unsigned order = 0;
    double total = 0;
    double within = 0;
    double cross = 0;
    double cross_fraction = 0;  // cross / total, 0 when total == 0

    bool operator==(const OrderMass &) const = default;
};

/// Positive mass sum max(f(T), 0) per order 1..k_max, split by register.
std::vector<OrderMass> positive_mass(const LatticeFunction &f, unsigned n);

/// Order-3 positive mass of the decomposition. k_max must be >= 3.
double cps(const JointTable &table, unsigned n, unsigned k_max = 3);
double cps(const Dataset &dataset, unsigned k_max = 3);

struct LatticeDecomposition {
    unsigned n = 0;
    unsigned k_max = 0;
    LatticeFunction g{0, 0};
    LatticeFunction f{0, 0};
    std::vector<OrderMass> mass;
    std::optional<double> cps;  // present when k_max >= 3
};

LatticeDecomposition decompose(const JointTable &table, unsigned n, unsigned k_max);
LatticeDecomposition decompose(const Dataset &dataset, unsigned k_max);

/// Restricts the dataset to the given keys, kept in the original spec order.
/// Throws InputError on an empty selection or keys outside ExperimentSpec::keys.
Dataset key_slice(const Dataset &dataset, std::span<const uint32_t> keys);

}  // namespace ridgeinfo

#endif
