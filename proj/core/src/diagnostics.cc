#include "ridgeinfo/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ridgeinfo/errors.h"
#include "ridgeinfo/rng.h"

namespace ridgeinfo {

UniformityReport uniformity(const Dataset &dataset) {
    if (dataset.size() == 0) {
        throw InputError("uniformity needs a nonempty dataset");
    }
    const unsigned bits = dataset.spec().bit_count();
    const double total = static_cast<double>(dataset.size());
    std::vector<uint64_t> ones(bits, 0);
    std::vector<uint64_t> both(bits * bits, 0);
    for (Outcome o : dataset.outcomes()) {
        for (unsigned i = 0; i < bits; i++) {
            if ((o >> i) & 1u) {
                ones[i]++;
                for (unsigned j = i + 1; j < bits; j++) {
                    both[i * bits + j] += (o >> j) & 1u;
                }
            }
        }
    }
    UniformityReport out;
    for (unsigned i = 0; i < bits; i++) {
        double p = static_cast<double>(ones[i]) / total;
        out.one_probability.push_back(p);
        out.max_marginal_deviation = std::max(out.max_marginal_deviation, std::abs(p - 0.5));
    }
    for (unsigned i = 0; i < bits; i++) {
        for (unsigned j = i + 1; j < bits; j++) {
            double pij = static_cast<double>(both[i * bits + j]) / total;
            CovariancePair c;
            c.i = i + 1;
            c.j = j + 1;
            c.cov = pij - out.one_probability[i] * out.one_probability[j];
            c.tag = register_tag((BitMask{1} << i) | (BitMask{1} << j), dataset.spec().n);
            out.covariances.push_back(c);
        }
    }
    std::stable_sort(out.covariances.begin(), out.covariances.end(), [](const auto &a, const auto &b) {
        return std::abs(a.cov) > std::abs(b.cov);
    });
    return out;
}

TrainTestSplit stratified_split(const Dataset &dataset, uint64_t seed) {
    std::vector<std::vector<Outcome>> train(dataset.num_groups());
    std::vector<std::vector<Outcome>> test(dataset.num_groups());
    for (size_t k = 0; k < dataset.num_groups(); k++) {
        auto group = dataset.group(k);
        std::vector<Outcome> shuffled(group.begin(), group.end());
        Stream rng(derive_seed(seed, k));
        rng.shuffle(std::span<Outcome>(shuffled));
        size_t half = shuffled.size() / 2;
        train[k].assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(half));
        test[k].assign(shuffled.begin() + static_cast<std::ptrdiff_t>(half), shuffled.end());
    }
    return {Dataset::from_groups(dataset.spec(), std::move(train)),
            Dataset::from_groups(dataset.spec(), std::move(test))};
}

const char *variant_name(AblationVariant variant) {
    switch (variant) {
        case AblationVariant::marginals_only:
            return "marginals_only";
        case AblationVariant::pairwise:
            return "pairwise";
        case AblationVariant::full_bitstring:
            return "full_bitstring";
    }
    return "?";
}

namespace {

void softmax_inplace(std::vector<double> &logits) {
    double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0;
    for (double &x : logits) {
        x = std::exp(x - peak);
        sum += x;
    }
    for (double &x : logits) {
        x /= sum;
    }
}

std::vector<double> class_log_priors(const Dataset &train) {
    std::vector<double> out;
    for (size_t k = 0; k < train.num_groups(); k++) {
        out.push_back(std::log(static_cast<double>(train.group_size(k)) / static_cast<double>(train.size())));
    }
    return out;
}

// Independent Bernoulli bits per class, add-one smoothing.
class MarginalsModel : public KeyModel {
   public:
    explicit MarginalsModel(const Dataset &train)
        : bits_(train.spec().bit_count()), log_prior_(class_log_priors(train)) {
        for (size_t k = 0; k < train.num_groups(); k++) {
            std::vector<double> ones(bits_, 0.0);
            for (Outcome o : train.group(k)) {
                for (unsigned i = 0; i < bits_; i++) {
                    ones[i] += (o >> i) & 1u;
                }
            }
            double n = static_cast<double>(train.group_size(k));
            std::vector<double> log_one(bits_), log_zero(bits_);
            for (unsigned i = 0; i < bits_; i++) {
                double theta = (ones[i] + 1.0) / (n + 2.0);
                log_one[i] = std::log(theta);
                log_zero[i] = std::log1p(-theta);
            }
            log_one_.push_back(std::move(log_one));
            log_zero_.push_back(std::move(log_zero));
        }
    }

    std::vector<double> predict(Outcome outcome) const override {
        std::vector<double> logits(log_prior_);
        for (size_t k = 0; k < logits.size(); k++) {
            for (unsigned i = 0; i < bits_; i++) {
                logits[k] += ((outcome >> i) & 1u) ? log_one_[k][i] : log_zero_[k][i];
            }
        }
        softmax_inplace(logits);
        return logits;
    }

   private:
    unsigned bits_;
    std::vector<double> log_prior_;
    std::vector<std::vector<double>> log_one_;
    std::vector<std::vector<double>> log_zero_;
};

// Categorical over every outcome per class, add-one smoothing.
class FullBitstringModel : public KeyModel {
   public:
    explicit FullBitstringModel(const Dataset &train) : log_prior_(class_log_priors(train)) {
        const size_t cells = train.spec().outcome_count();
        for (size_t k = 0; k < train.num_groups(); k++) {
            std::vector<double> counts(cells, 1.0);
            for (Outcome o : train.group(k)) {
                counts[o] += 1.0;
            }
            double denom = static_cast<double>(train.group_size(k) + cells);
            for (double &c : counts) {
                c = std::log(c / denom);
            }
            log_lik_.push_back(std::move(counts));
        }
    }

    std::vector<double> predict(Outcome outcome) const override {
        std::vector<double> logits(log_prior_);
        for (size_t k = 0; k < logits.size(); k++) {
            logits[k] += log_lik_[k][outcome];
        }
        softmax_inplace(logits);
        return logits;
    }

   private:
    std::vector<double> log_prior_;
    std::vector<std::vector<double>> log_lik_;
};

class PairwiseModel : public KeyModel {
   public:
    PairwiseModel(unsigned bits, size_t keys, std::vector<double> params)
        : bits_(bits), keys_(keys), params_(std::move(params)) {
    }

    std::vector<double> predict(Outcome outcome) const override {
        auto phi = pairwise_features(outcome, bits_);
        size_t stride = phi.size() + 1;
        std::vector<double> logits(keys_);
        for (size_t k = 0; k < keys_; k++) {
            const double *w = &params_[k * stride];
            double z = w[phi.size()];
            for (size_t f = 0; f < phi.size(); f++) {
                z += w[f] * phi[f];
            }
            logits[k] = z;
        }
        softmax_inplace(logits);
        return logits;
    }

   private:
    unsigned bits_;
    size_t keys_;
    std::vector<double> params_;
};

}  // namespace

std::vector<double> pairwise_features(Outcome outcome, unsigned num_bits) {
    std::vector<double> phi;
    phi.reserve(num_bits + num_bits * (num_bits - 1) / 2);
    for (unsigned i = 0; i < num_bits; i++) {
        phi.push_back(static_cast<double>((outcome >> i) & 1u));
    }
    for (unsigned i = 0; i < num_bits; i++) {
        for (unsigned j = i + 1; j < num_bits; j++) {
            phi.push_back(static_cast<double>((outcome >> i) & (outcome >> j) & 1u));
        }
    }
    return phi;
}

MaxEntProblem MaxEntProblem::from_dataset(const Dataset &train, double l2) {
    const unsigned bits = train.spec().bit_count();
    std::map<Outcome, std::vector<double>> rows;
    for (size_t i = 0; i < train.size(); i++) {
        auto &row = rows[train.outcomes()[i]];
        if (row.empty()) {
            row.assign(train.num_groups(), 0.0);
        }
        row[train.labels()[i]] += 1.0;
    }
    MaxEntProblem p;
    p.num_keys = train.num_groups();
    p.num_features = bits + bits * (bits - 1) / 2;
    p.total = static_cast<double>(train.size());
    p.l2 = l2;
    for (auto &[outcome, counts] : rows) {
        p.features.push_back(pairwise_features(outcome, bits));
        p.counts.push_back(std::move(counts));
    }
    return p;
}

double maxent_objective(const MaxEntProblem &problem, std::span<const double> params, std::span<double> grad) {
    const size_t keys = problem.num_keys;
    const size_t feats = problem.num_features;
    const size_t stride = feats + 1;
    if (params.size() != problem.num_params() || (!grad.empty() && grad.size() != params.size())) {
        throw InputError("parameter vector has the wrong size");
    }
    if (!grad.empty()) {
        std::fill(grad.begin(), grad.end(), 0.0);
    }
    double nll = 0;
    std::vector<double> logits(keys);
    for (size_t r = 0; r < problem.features.size(); r++) {
        const auto &phi = problem.features[r];
        const auto &counts = problem.counts[r];
        double row_total = 0;
        for (size_t k = 0; k < keys; k++) {
            const double *w = &params[k * stride];
            double z = w[feats];
            for (size_t f = 0; f < feats; f++) {
                z += w[f] * phi[f];
            }
            logits[k] = z;
            row_total += counts[k];
        }
        double peak = *std::max_element(logits.begin(), logits.end());
        double sum = 0;
        for (double z : logits) {
            sum += std::exp(z - peak);
        }
        double log_norm = peak + std::log(sum);
        for (size_t k = 0; k < keys; k++) {
            nll -= counts[k] * (logits[k] - log_norm);
        }
        if (!grad.empty()) {
            for (size_t k = 0; k < keys; k++) {
                // d/dz_k of sum_y -c_y log p_y = row_total * p_k - c_k
                double dz = (row_total * std::exp(logits[k] - log_norm) - counts[k]) / problem.total;
                double *g = &grad[k * stride];
                for (size_t f = 0; f < feats; f++) {
                    g[f] += dz * phi[f];
                }
                g[feats] += dz;
            }
        }
    }
    double penalty = 0;
    for (size_t k = 0; k < keys; k++) {
        for (size_t f = 0; f < feats; f++) {
            double w = params[k * stride + f];
            penalty += w * w;
            if (!grad.empty()) {
                grad[k * stride + f] += problem.l2 * w;
            }
        }
    }
    return nll / problem.total + 0.5 * problem.l2 * penalty;
}

std::vector<double> train_maxent(const MaxEntProblem &problem, const MaxEntConfig &config) {
    std::vector<double> params(problem.num_params(), 0.0);
    std::vector<double> grad(params.size());
    for (unsigned it = 0; it < config.iterations; it++) {
        maxent_objective(problem, params, grad);
        for (size_t i = 0; i < params.size(); i++) {
            params[i] -= config.learning_rate * grad[i];
        }
    }
    return params;
}

std::unique_ptr<KeyModel> train_ablation_model(const Dataset &train, AblationVariant variant, const MaxEntConfig &config) {
    if (train.num_groups() < 2) {
        throw InputError("ablation models need at least two keys in the training set");
    }
    switch (variant) {
        case AblationVariant::marginals_only:
            return std::make_unique<MarginalsModel>(train);
        case AblationVariant::full_bitstring:
            return std::make_unique<FullBitstringModel>(train);
        case AblationVariant::pairwise: {
            auto problem = MaxEntProblem::from_dataset(train, config.l2);
            return std::make_unique<PairwiseModel>(
                train.spec().bit_count(), train.num_groups(), train_maxent(problem, config));
        }
    }
    throw InputError("unknown ablation variant");
}

CalibrationSummary calibration(std::span<const Prediction> predictions, unsigned bins) {
    if (predictions.empty()) {
        throw InputError("calibration needs at least one prediction");
    }
    if (bins == 0) {
        throw InputError("calibration needs at least one bin");
    }
    std::vector<double> conf_sum(bins, 0.0);
    std::vector<double> correct(bins, 0.0);
    std::vector<uint64_t> count(bins, 0);
    for (const auto &p : predictions) {
        auto top = std::max_element(p.probs.begin(), p.probs.end());
        double conf = *top;
        size_t predicted = static_cast<size_t>(top - p.probs.begin());
        size_t b = std::min<size_t>(static_cast<size_t>(conf * bins), bins - 1);
        conf_sum[b] += conf;
        correct[b] += predicted == p.true_index;
        count[b]++;
    }
    CalibrationSummary out;
    const double total = static_cast<double>(predictions.size());
    for (unsigned b = 0; b < bins; b++) {
        ReliabilityBin bin;
        bin.center = (b + 0.5) / bins;
        bin.count = count[b];
        if (count[b]) {
            bin.accuracy = correct[b] / static_cast<double>(count[b]);
            bin.confidence = conf_sum[b] / static_cast<double>(count[b]);
            out.ece += static_cast<double>(count[b]) / total * std::abs(bin.accuracy - bin.confidence);
        }
        out.bins.push_back(bin);
    }
    return out;
}

double ece(std::span<const Prediction> predictions, unsigned bins) {
    return calibration(predictions, bins).ece;
}

AblationResult run_ablation(const Dataset &dataset, uint64_t seed, unsigned bins, const MaxEntConfig &config) {
    auto split = stratified_split(dataset, seed);
    AblationResult out;
    out.train_size = split.train.size();
    out.test_size = split.test.size();
    for (auto variant : {AblationVariant::marginals_only, AblationVariant::pairwise, AblationVariant::full_bitstring}) {
        auto model = train_ablation_model(split.train, variant, config);
        std::vector<Prediction> preds;
        preds.reserve(split.test.size());
        uint64_t correct = 0;
        for (size_t i = 0; i < split.test.size(); i++) {
            Prediction p{model->predict(split.test.outcomes()[i]), split.test.labels()[i]};
            auto top = std::max_element(p.probs.begin(), p.probs.end());
            correct += static_cast<size_t>(top - p.probs.begin()) == p.true_index;
            preds.push_back(std::move(p));
        }
        auto cal = calibration(preds, bins);
        out.models.push_back(ModelScore{
            variant_name(variant),
            static_cast<double>(correct) / static_cast<double>(split.test.size()),
            cal.ece,
            cal.bins});
    }
    return out;
}

}  // namespace ridgeinfo
