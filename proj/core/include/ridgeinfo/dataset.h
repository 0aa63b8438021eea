#ifndef RIDGEINFO_DATASET_H
#define RIDGEINFO_DATASET_H

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ridgeinfo/bits.h"

namespace ridgeinfo {

/// Key-labelled shots stored grouped by key in spec key order. Shots are
/// kept packed (see Outcome); `labels()` holds the key index of each shot.
class Dataset {
   public:
    Dataset() = default;

    /// Groups shots by key in spec order, keeping arrival order within a
    /// group. Throws InputError on unknown keys, bad bit vectors or an empty
    /// key group.
    static Dataset from_shots(ExperimentSpec spec, std::span<const Shot> shots);

    /// groups[i] holds the outcomes of spec.keys[i].
    static Dataset from_groups(ExperimentSpec spec, std::vector<std::vector<Outcome>> groups);

    const ExperimentSpec &spec() const {
        return spec_;
    }
    size_t size() const {
        return outcomes_.size();
    }
    size_t num_groups() const {
        return spec_.keys.size();
    }
    size_t group_size(size_t key_index) const {
        return offsets_[key_index + 1] - offsets_[key_index];
    }
    size_t group_begin(size_t key_index) const {
        return offsets_[key_index];
    }
    size_t min_group_size() const;
    std::span<const Outcome> group(size_t key_index) const {
        return std::span<const Outcome>(outcomes_).subspan(offsets_[key_index], group_size(key_index));
    }
    std::span<const Outcome> outcomes() const {
        return outcomes_;
    }
    std::span<const uint16_t> labels() const {
        return labels_;
    }
    uint32_t key_of(size_t shot_index) const {
        return spec_.keys[labels_[shot_index]];
    }
    Shot shot(size_t shot_index) const;
    std::vector<Shot> shots() const;

    bool operator==(const Dataset &) const = default;

   private:
    ExperimentSpec spec_;
    std::vector<Outcome> outcomes_;
    std::vector<uint16_t> labels_;
    std::vector<size_t> offsets_{0};
};

/// Shot file: one `key,bitstring` record per line, bits D_1..D_{2n} left to
/// right. `#` starts a comment line; an optional `key,bits` header is skipped.
Dataset read_dataset(std::istream &in, const ExperimentSpec &spec);
void write_dataset(std::ostream &out, const Dataset &dataset);

Dataset load_dataset(const std::string &path, const ExperimentSpec &spec);
void save_dataset(const Dataset &dataset, const std::string &path);

}  // namespace ridgeinfo

#endif
