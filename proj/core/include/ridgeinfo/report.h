#ifndef RIDGEINFO_REPORT_H
#define RIDGEINFO_REPORT_H

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ridgeinfo/dataset.h"
#include "ridgeinfo/diagnostics.h"
#include "ridgeinfo/infolattice.h"
#include "ridgeinfo/keyrec.h"
#include "ridgeinfo/ridge_metrics.h"
#include "ridgeinfo/stats.h"

namespace ridgeinfo {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr double kReferenceRidgeHit = 0.1830;
inline constexpr uint64_t kDefaultSeed = 20260101;
/// Environment variable that overrides the default master seed.
inline constexpr const char *kSeedEnvVar = "RIDGEINFO_SEED";

const char *version();

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string &bytes);

struct LatticeEntry {
    BitMask mask = 0;
    unsigned order = 0;
    double g = 0;
    double f = 0;
    RegisterTag tag = RegisterTag::cross;

    bool operator==(const LatticeEntry &) const = default;
};

struct LatticeSummary {
    unsigned k_max = 0;
    std::string unit = "bits";
    std::vector<OrderMass> mass;
    std::optional<double> cps;
    std::vector<uint32_t> keys;  // keys the decomposition was computed over
    std::vector<LatticeEntry> entries;

    bool operator==(const LatticeSummary &) const = default;
};

LatticeSummary summarize_lattice(const LatticeDecomposition &d, std::vector<uint32_t> keys);

struct SimulationInfo {
    double target_p_hit = 0;
    double lambda = 0;
    double q = 0;
    uint64_t seed = 0;

    bool operator==(const SimulationInfo &) const = default;
};

struct Provenance {
    std::string input_sha256;
    uint64_t master_seed = 0;
    std::vector<std::pair<std::string, uint64_t>> stage_seeds;
    std::string tool_version;

    bool operator==(const Provenance &) const = default;
};

struct SuiteReport {
    int schema_version = kSchemaVersion;
    ExperimentSpec spec;
    std::vector<uint64_t> group_sizes;
    RidgeStats ridge;
    AccuracyResult key_accuracy;
    DictionaryRecovery dictionary;
    LatticeSummary lattice;
    PermutationResult permutation_accuracy;
    PermutationResult permutation_cps;
    std::vector<ReliabilityPoint> reliability;
    UniformityReport uniformity;
    AblationResult ablation;
    std::optional<SimulationInfo> simulation;
    Provenance provenance;

    bool operator==(const SuiteReport &) const = default;
};

struct SuiteConfig {
    ExperimentSpec spec;
    uint64_t seed = kDefaultSeed;
    size_t contrast_replicates = 2000;
    size_t accuracy_permutations = kDefaultAccuracyPermutations;
    size_t cps_permutations = kDefaultCpsPermutations;
    std::vector<uint32_t> budgets = kDefaultBudgets;
    size_t reliability_replicates = kDefaultReliabilityReplicates;
    unsigned k_max = 3;
    unsigned bins = 10;
};

/// Suite stages in execution order. Stage i draws only from
/// derive_seed(master_seed, i); `stage_seed` returns that value.
inline const std::vector<std::string> kSuiteStages{
    "metrics", "keyrec", "infolattice", "permutation_accuracy", "permutation_cps", "reliability", "diagnostics"};
uint64_t stage_seed(uint64_t master_seed, const std::string &stage);

/// Runs every stage on an in-memory dataset. Budgets larger than the
/// smallest key group are dropped. A failing stage throws an exception of
/// the original type whose message is prefixed with the stage name.
SuiteReport run_suite(const Dataset &dataset, const SuiteConfig &config, const std::string &input_sha256);

/// Reads and digests the shot file, then runs the suite.
SuiteReport run_suite_file(const std::string &shot_path, const SuiteConfig &config);

/// Calibrates lambda to the reference ridge-hit rate at q = 0, simulates the
/// default design and runs the suite on it.
SuiteReport end_to_end_demo(uint64_t seed, Dataset *simulated = nullptr);

// ---- JSON -----------------------------------------------------------------

void to_json(Json &j, const ExperimentSpec &v);
void from_json(const Json &j, ExperimentSpec &v);
void to_json(Json &j, const Interval &v);
void from_json(const Json &j, Interval &v);
void to_json(Json &j, const RidgeStats &v);
void from_json(const Json &j, RidgeStats &v);
void to_json(Json &j, const AccuracyResult &v);
void from_json(const Json &j, AccuracyResult &v);
void to_json(Json &j, const DictionaryRecovery &v);
void from_json(const Json &j, DictionaryRecovery &v);
void to_json(Json &j, const LatticeSummary &v);
void from_json(const Json &j, LatticeSummary &v);
void to_json(Json &j, const PermutationResult &v);
void from_json(const Json &j, PermutationResult &v);
void to_json(Json &j, const ReliabilityPoint &v);
void from_json(const Json &j, ReliabilityPoint &v);
void to_json(Json &j, const UniformityReport &v);
void from_json(const Json &j, UniformityReport &v);
void to_json(Json &j, const ReliabilityBin &v);
void from_json(const Json &j, ReliabilityBin &v);
void to_json(Json &j, const AblationResult &v);
void from_json(const Json &j, AblationResult &v);
void to_json(Json &j, const SuiteReport &v);
void from_json(const Json &j, SuiteReport &v);

/// Pretty-printed JSON with a trailing newline.
std::string serialize(const Json &j);
std::string serialize(const SuiteReport &report);
SuiteReport parse_suite_report(const std::string &text);

/// Writes to a sibling temporary file and renames it into place, so a
/// failed run never leaves a partial report behind.
void write_text_atomically(const std::string &path, const std::string &text);

}  // namespace ridgeinfo

#endif
