#include "ridgeinfo/dataset.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "ridgeinfo/errors.h"

namespace ridgeinfo {

Dataset Dataset::from_groups(ExperimentSpec spec, std::vector<std::vector<Outcome>> groups) {
    spec.validate();
    if (groups.size() != spec.keys.size()) {
        throw InputError("group count does not match key count");
    }
    Dataset out;
    out.spec_ = std::move(spec);
    size_t total = 0;
    for (const auto &g : groups) {
        total += g.size();
    }
    out.outcomes_.reserve(total);
    out.labels_.reserve(total);
    Outcome limit = out.spec_.outcome_count();
    for (size_t k = 0; k < groups.size(); k++) {
        if (groups[k].empty()) {
            throw InputError("key " + std::to_string(out.spec_.keys[k]) + " has no shots");
        }
        for (Outcome o : groups[k]) {
            if (o >= limit) {
                throw InputError("outcome out of range for n=" + std::to_string(out.spec_.n));
            }
            out.outcomes_.push_back(o);
            out.labels_.push_back(static_cast<uint16_t>(k));
        }
        out.offsets_.push_back(out.outcomes_.size());
    }
    return out;
}

Dataset Dataset::from_shots(ExperimentSpec spec, std::span<const Shot> shots) {
    spec.validate();
    std::vector<std::vector<Outcome>> groups(spec.keys.size());
    for (const auto &s : shots) {
        size_t k = spec.key_index(s.key);
        decode_registers(s, spec.n);
        groups[k].push_back(pack_bits(s.bits));
    }
    return from_groups(std::move(spec), std::move(groups));
}

size_t Dataset::min_group_size() const {
    size_t m = SIZE_MAX;
    for (size_t k = 0; k < num_groups(); k++) {
        m = std::min(m, group_size(k));
    }
    return num_groups() ? m : 0;
}

Shot Dataset::shot(size_t shot_index) const {
    return Shot{key_of(shot_index), unpack_bits(outcomes_[shot_index], spec_.bit_count())};
}

std::vector<Shot> Dataset::shots() const {
    std::vector<Shot> out;
    out.reserve(size());
    for (size_t i = 0; i < size(); i++) {
        out.push_back(shot(i));
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

[[noreturn]] void parse_fail(size_t line_no, const std::string &msg) {
    throw InputError("line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

Dataset read_dataset(std::istream &in, const ExperimentSpec &spec) {
    spec.validate();
    const unsigned width = spec.bit_count();
    std::vector<std::vector<Outcome>> groups(spec.keys.size());
    size_t total = 0;
    std::string line;
    size_t line_no = 0;
    bool seen_record = false;
    while (std::getline(in, line)) {
        line_no++;
        std::string_view text = trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        if (!seen_record && text == "key,bits") {
            seen_record = true;
            continue;
        }
        seen_record = true;

        size_t comma = text.find(',');
        if (comma == std::string_view::npos) {
            parse_fail(line_no, "expected `key,bitstring`");
        }
        std::string_view key_text = trim(text.substr(0, comma));
        std::string_view bit_text = trim(text.substr(comma + 1));

        uint32_t key = 0;
        auto [ptr, ec] = std::from_chars(key_text.data(), key_text.data() + key_text.size(), key);
        if (ec != std::errc() || ptr != key_text.data() + key_text.size()) {
            parse_fail(line_no, "invalid key label `" + std::string(key_text) + "`");
        }
        if (!spec.has_key(key)) {
            parse_fail(line_no, "key " + std::to_string(key) + " not in spec");
        }
        if (bit_text.size() != width) {
            parse_fail(
                line_no,
                "expected " + std::to_string(width) + " bits, got " + std::to_string(bit_text.size()));
        }
        Outcome outcome = 0;
        for (unsigned i = 0; i < width; i++) {
            char c = bit_text[i];
            if (c != '0' && c != '1') {
                parse_fail(line_no, std::string("non-binary character `") + c + "`");
            }
            outcome |= Outcome(c == '1') << i;
        }
        groups[spec.key_index(key)].push_back(outcome);
        total++;
    }
    if (total == 0) {
        throw InputError("no shots");
    }
    return Dataset::from_groups(spec, std::move(groups));
}

void write_dataset(std::ostream &out, const Dataset &dataset) {
    const unsigned width = dataset.spec().bit_count();
    std::string buf;
    buf.reserve(dataset.size() * (width + 6) + 16);
    buf += "key,bits\n";
    for (size_t i = 0; i < dataset.size(); i++) {
        buf += std::to_string(dataset.key_of(i));
        buf += ',';
        Outcome o = dataset.outcomes()[i];
        for (unsigned b = 0; b < width; b++) {
            buf += ((o >> b) & 1u) ? '1' : '0';
        }
        buf += '\n';
    }
    out << buf;
}

Dataset load_dataset(const std::string &path, const ExperimentSpec &spec) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open shot file `" + path + "`");
    }
    return read_dataset(in, spec);
}

void save_dataset(const Dataset &dataset, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write shot file `" + path + "`");
    }
    write_dataset(out, dataset);
    if (!out) {
        throw InputError("failed writing shot file `" + path + "`");
    }
}

}  // namespace ridgeinfo
