#ifndef RIDGEINFO_DIAGNOSTICS_H
#define RIDGEINFO_DIAGNOSTICS_H

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ridgeinfo/dataset.h"
#include "ridgeinfo/infolattice.h"

namespace ridgeinfo {

// ---- Uniformity -----------------------------------------------------------

struct CovariancePair {
    unsigned i = 0;  // 1-based bit positions, i < j
    unsigned j = 0;
    double cov = 0;
    RegisterTag tag = RegisterTag::cross;

    bool operator==(const CovariancePair &) const = default;
};

struct UniformityReport {
    std::vector<double> one_probability;  // pooled P(D_i = 1), i = 1..2n
    double max_marginal_deviation = 0;
    std::vector<CovariancePair> covariances;  // sorted by |cov| descending

    bool operator==(const UniformityReport &) const = default;
};

/// Pooled marginals and all pairwise covariances E[D_i D_j] - E[D_i]E[D_j].
UniformityReport uniformity(const Dataset &dataset);

// ---- Train/test split -----------------------------------------------------

struct TrainTestSplit {
    Dataset train;
    Dataset test;
};

/// Shuffles each key group with Stream(derive_seed(seed, key_index)) and
/// puts the first floor(size/2) shots in train, the rest in test.
TrainTestSplit stratified_split(const Dataset &dataset, uint64_t seed);

// ---- Ablation models ------------------------------------------------------

enum class AblationVariant { marginals_only, pairwise, full_bitstring };

const char *variant_name(AblationVariant variant);

class KeyModel {
   public:
    virtual ~KeyModel() = default;
    /// Posterior over key indices; strictly positive, sums to 1.
    virtual std::vector<double> predict(Outcome outcome) const = 0;
};

struct MaxEntConfig {
    double l2 = 1e-3;
    double learning_rate = 0.1;
    unsigned iterations = 500;
};

/// Bits D_1..D_B followed by products D_i D_j for i < j in lexicographic order.
std::vector<double> pairwise_features(Outcome outcome, unsigned num_bits);

/// Multiclass logistic objective over distinct outcomes. Parameters are laid
/// out row-major as num_keys rows of (num_features weights, bias).
struct MaxEntProblem {
    size_t num_keys = 0;
    size_t num_features = 0;
    std::vector<std::vector<double>> features;  // one row per distinct outcome
    std::vector<std::vector<double>> counts;    // counts[row][key]
    double total = 0;
    double l2 = 0;

    static MaxEntProblem from_dataset(const Dataset &train, double l2);
    size_t num_params() const {
        return num_keys * (num_features + 1);
    }
};

/// Mean negative log-likelihood plus (l2/2)*|W|^2 over weights (biases are
/// not penalized). Writes the gradient into `grad` when it is nonempty.
double maxent_objective(const MaxEntProblem &problem, std::span<const double> params, std::span<double> grad);

/// Deterministic full-batch gradient descent from zero.
std::vector<double> train_maxent(const MaxEntProblem &problem, const MaxEntConfig &config);

/// Throws InputError when train holds fewer than two keys.
std::unique_ptr<KeyModel> train_ablation_model(
    const Dataset &train, AblationVariant variant, const MaxEntConfig &config = {});

// ---- Calibration ----------------------------------------------------------

struct Prediction {
    std::vector<double> probs;
    size_t true_index = 0;
};

struct ReliabilityBin {
    double center = 0;
    double accuracy = 0;
    double confidence = 0;
    uint64_t count = 0;

    bool operator==(const ReliabilityBin &) const = default;
};

struct CalibrationSummary {
    double ece = 0;
    std::vector<ReliabilityBin> bins;
};

/// Equal-width bins on [0,1] by top-label confidence. Throws InputError on an
/// empty prediction list or zero bins.
CalibrationSummary calibration(std::span<const Prediction> predictions, unsigned bins = 10);
double ece(std::span<const Prediction> predictions, unsigned bins = 10);

struct ModelScore {
    std::string model;
    double accuracy = 0;
    double ece = 0;
    std::vector<ReliabilityBin> bins;

    bool operator==(const ModelScore &) const = default;
};

struct AblationResult {
    size_t train_size = 0;
    size_t test_size = 0;
    std::vector<ModelScore> models;

    bool operator==(const AblationResult &) const = default;
};

/// Stratified split, train all three variants, score on the test half.
AblationResult run_ablation(const Dataset &dataset, uint64_t seed, unsigned bins = 10, const MaxEntConfig &config = {});

}  // namespace ridgeinfo

#endif
