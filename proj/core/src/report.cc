#include "ridgeinfo/report.h"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "ridgeinfo/errors.h"
#include "ridgeinfo/rng.h"
#include "ridgeinfo/simulate.h"

#ifndef RIDGEINFO_VERSION
#define RIDGEINFO_VERSION "0.0.0"
#endif

namespace ridgeinfo {

const char *version() {
    return RIDGEINFO_VERSION;
}

std::string sha256_hex(const std::string &bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw NumericError("sha256 digest failed");
    }
    static const char *hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; i++) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

LatticeSummary summarize_lattice(const LatticeDecomposition &d, std::vector<uint32_t> keys) {
    LatticeSummary s;
    s.k_max = d.k_max;
    s.mass = d.mass;
    s.cps = d.cps;
    s.keys = std::move(keys);
    for (BitMask m : d.f.masks()) {
        s.entries.push_back(LatticeEntry{m, mask_order(m), d.g.at(m), d.f.at(m), register_tag(m, d.n)});
    }
    return s;
}

uint64_t stage_seed(uint64_t master_seed, const std::string &stage) {
    for (size_t i = 0; i < kSuiteStages.size(); i++) {
        if (kSuiteStages[i] == stage) {
            return derive_seed(master_seed, i);
        }
    }
    throw InputError("unknown suite stage `" + stage + "`");
}

namespace {

template <typename F>
auto run_stage(const std::string &stage, F &&fn) {
    try {
        return fn();
    } catch (const InputError &e) {
        throw InputError(stage + ": " + e.what());
    } catch (const NumericError &e) {
        throw NumericError(stage + ": " + e.what());
    } catch (const std::exception &e) {
        throw NumericError(stage + ": " + e.what());
    }
}

std::string read_file_bytes(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open shot file `" + path + "`");
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

SuiteReport run_suite(const Dataset &dataset, const SuiteConfig &config, const std::string &input_sha256) {
    SuiteReport r;
    r.spec = dataset.spec();
    for (size_t k = 0; k < dataset.num_groups(); k++) {
        r.group_sizes.push_back(dataset.group_size(k));
    }
    const uint64_t master = config.seed;
    auto seed_of = [&](const char *stage) {
        return stage_seed(master, stage);
    };

    r.ridge = run_stage("metrics", [&] {
        return ridge_stats(dataset, config.contrast_replicates, seed_of("metrics"));
    });
    run_stage("keyrec", [&] {
        r.key_accuracy = per_shot_accuracy(dataset, seed_of("keyrec"));
        r.dictionary = dictionary_recovery(dataset);
        return 0;
    });
    r.lattice = run_stage("infolattice", [&] {
        return summarize_lattice(decompose(dataset, config.k_max), dataset.spec().keys);
    });
    r.permutation_accuracy = run_stage("permutation_accuracy", [&] {
        return permutation_test(
            dataset, PermStatistic::accuracy, config.accuracy_permutations, seed_of("permutation_accuracy"),
            config.k_max);
    });
    r.permutation_cps = run_stage("permutation_cps", [&] {
        return permutation_test(
            dataset, PermStatistic::cps, config.cps_permutations, seed_of("permutation_cps"), std::max(3u, config.k_max));
    });
    r.reliability = run_stage("reliability", [&] {
        std::vector<uint32_t> budgets;
        for (uint32_t b : config.budgets) {
            if (b <= dataset.min_group_size()) {
                budgets.push_back(b);
            }
        }
        return reliability_sweep(dataset, budgets, config.reliability_replicates, config.k_max, seed_of("reliability"));
    });
    run_stage("diagnostics", [&] {
        r.uniformity = uniformity(dataset);
        r.ablation = run_ablation(dataset, seed_of("diagnostics"), config.bins);
        return 0;
    });

    r.provenance.input_sha256 = input_sha256;
    r.provenance.master_seed = master;
    for (const auto &stage : kSuiteStages) {
        r.provenance.stage_seeds.emplace_back(stage, stage_seed(master, stage));
    }
    r.provenance.tool_version = version();
    return r;
}

SuiteReport run_suite_file(const std::string &shot_path, const SuiteConfig &config) {
    std::string bytes = read_file_bytes(shot_path);
    std::istringstream in(bytes);
    Dataset dataset = read_dataset(in, config.spec);
    return run_suite(dataset, config, sha256_hex(bytes));
}

SuiteReport end_to_end_demo(uint64_t seed, Dataset *simulated) {
    SuiteConfig config;
    config.seed = seed;
    NoiseModel noise;
    noise.q = 0.0;
    noise.lambda = calibrate_lambda(kReferenceRidgeHit, noise, config.spec);
    const uint64_t sim_seed = derive_seed(seed, kSuiteStages.size());
    Dataset data = sample_dataset(config.spec, noise, sim_seed);
    std::ostringstream bytes;
    write_dataset(bytes, data);
    SuiteReport r = run_suite(data, config, sha256_hex(bytes.str()));
    r.simulation = SimulationInfo{kReferenceRidgeHit, noise.lambda, noise.q, sim_seed};
    if (simulated) {
        *simulated = std::move(data);
    }
    return r;
}

// ---- JSON -----------------------------------------------------------------

namespace {

RegisterTag parse_tag(const std::string &s) {
    if (s == "within-A") {
        return RegisterTag::within_a;
    }
    if (s == "within-B") {
        return RegisterTag::within_b;
    }
    if (s == "cross") {
        return RegisterTag::cross;
    }
    throw InputError("unknown register tag `" + s + "`");
}

Json optional_number(const std::optional<double> &v) {
    return v ? Json(*v) : Json(nullptr);
}

std::optional<double> read_optional(const Json &j) {
    if (j.is_null()) {
        return std::nullopt;
    }
    return j.get<double>();
}

void require_finite(const Json &j, const std::string &path) {
    if (j.is_number_float() && !std::isfinite(j.get<double>())) {
        throw NumericError("non-finite value at " + path);
    }
    if (j.is_object()) {
        for (const auto &[k, v] : j.items()) {
            require_finite(v, path + "." + k);
        }
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); i++) {
            require_finite(j[i], path + "[" + std::to_string(i) + "]");
        }
    }
}

}  // namespace

void to_json(Json &j, const ExperimentSpec &v) {
    j = Json{{"n", v.n}, {"keys", v.keys}, {"shots_per_key", v.shots_per_key}, {"bit_order", "D1..D2n, a first, little-endian"}};
}
void from_json(const Json &j, ExperimentSpec &v) {
    j.at("n").get_to(v.n);
    j.at("keys").get_to(v.keys);
    j.at("shots_per_key").get_to(v.shots_per_key);
}

void to_json(Json &j, const Interval &v) {
    j = Json::array({v.lo, v.hi});
}
void from_json(const Json &j, Interval &v) {
    v.lo = j.at(0).get<double>();
    v.hi = j.at(1).get<double>();
}

void to_json(Json &j, const RidgeStats &v) {
    Json per_key = Json::array();
    for (const auto &k : v.per_key) {
        per_key.push_back({{"key", k.key}, {"hits", k.hits}, {"count", k.count}, {"p_hit", k.p_hit}});
    }
    j = Json{
        {"pooled_hits", v.pooled_hits},
        {"total", v.total},
        {"p_hit", v.p_hit},
        {"p_hit_wilson_ci", v.wilson_ci},
        {"contrast", v.contrast},
        {"contrast_bootstrap_ci", v.contrast_ci},
        {"per_key", per_key},
    };
}
void from_json(const Json &j, RidgeStats &v) {
    j.at("pooled_hits").get_to(v.pooled_hits);
    j.at("total").get_to(v.total);
    j.at("p_hit").get_to(v.p_hit);
    j.at("p_hit_wilson_ci").get_to(v.wilson_ci);
    j.at("contrast").get_to(v.contrast);
    j.at("contrast_bootstrap_ci").get_to(v.contrast_ci);
    v.per_key.clear();
    for (const auto &k : j.at("per_key")) {
        v.per_key.push_back(KeyHits{
            k.at("key").get<uint32_t>(), k.at("hits").get<uint64_t>(), k.at("count").get<uint64_t>(),
            k.at("p_hit").get<double>()});
    }
}

void to_json(Json &j, const AccuracyResult &v) {
    j = Json{{"key_accuracy", v.accuracy}, {"key_accuracy_ci", v.ci}, {"correct", v.correct}, {"total", v.total}};
}
void from_json(const Json &j, AccuracyResult &v) {
    j.at("key_accuracy").get_to(v.accuracy);
    j.at("key_accuracy_ci").get_to(v.ci);
    j.at("correct").get_to(v.correct);
    j.at("total").get_to(v.total);
}

void to_json(Json &j, const DictionaryRecovery &v) {
    Json preds = Json::object();
    for (const auto &[truth, predicted] : v.predictions) {
        preds[std::to_string(truth)] = predicted;
    }
    j = Json{{"dictionary_predictions", preds}, {"dictionary_correct", v.correct}, {"dictionary_accuracy", v.accuracy}};
}
void from_json(const Json &j, DictionaryRecovery &v) {
    v.predictions.clear();
    for (const auto &[k, p] : j.at("dictionary_predictions").items()) {
        v.predictions.emplace_back(static_cast<uint32_t>(std::stoul(k)), p.get<uint32_t>());
    }
    j.at("dictionary_correct").get_to(v.correct);
    j.at("dictionary_accuracy").get_to(v.accuracy);
}

void to_json(Json &j, const LatticeSummary &v) {
    Json mass = Json::array();
    for (const auto &m : v.mass) {
        mass.push_back({
            {"order", m.order},
            {"M_plus", m.total},
            {"M_plus_within", m.within},
            {"M_plus_cross", m.cross},
            {"cross_fraction", m.cross_fraction},
        });
    }
    Json entries = Json::array();
    for (const auto &e : v.entries) {
        entries.push_back(
            {{"mask", e.mask}, {"order", e.order}, {"g", e.g}, {"f", e.f}, {"tag", register_tag_name(e.tag)}});
    }
    j = Json{
        {"k_max", v.k_max},
        {"unit", v.unit},
        {"keys", v.keys},
        {"cps", optional_number(v.cps)},
        {"positive_mass", mass},
        {"f_table", entries},
    };
}
void from_json(const Json &j, LatticeSummary &v) {
    j.at("k_max").get_to(v.k_max);
    j.at("unit").get_to(v.unit);
    j.at("keys").get_to(v.keys);
    v.cps = read_optional(j.at("cps"));
    v.mass.clear();
    for (const auto &m : j.at("positive_mass")) {
        v.mass.push_back(OrderMass{
            m.at("order").get<unsigned>(), m.at("M_plus").get<double>(), m.at("M_plus_within").get<double>(),
            m.at("M_plus_cross").get<double>(), m.at("cross_fraction").get<double>()});
    }
    v.entries.clear();
    for (const auto &e : j.at("f_table")) {
        v.entries.push_back(LatticeEntry{
            e.at("mask").get<BitMask>(), e.at("order").get<unsigned>(), e.at("g").get<double>(),
            e.at("f").get<double>(), parse_tag(e.at("tag").get<std::string>())});
    }
}

void to_json(Json &j, const PermutationResult &v) {
    j = Json{
        {"statistic", v.statistic},
        {"observed", v.observed},
        {"n_perm", v.n_perm},
        {"p_value", v.p_value},
        {"null_values", v.null_values},
    };
}
void from_json(const Json &j, PermutationResult &v) {
    j.at("statistic").get_to(v.statistic);
    j.at("observed").get_to(v.observed);
    j.at("n_perm").get_to(v.n_perm);
    j.at("p_value").get_to(v.p_value);
    j.at("null_values").get_to(v.null_values);
}

void to_json(Json &j, const ReliabilityPoint &v) {
    Json orders = Json::array();
    for (const auto &o : v.orders) {
        orders.push_back({{"order", o.order}, {"mean", o.mean}, {"sd", o.sd}, {"cv", optional_number(o.cv)}});
    }
    j = Json{{"shots_per_key", v.shots_per_key}, {"orders", orders}, {"k_star", v.k_star}};
}
void from_json(const Json &j, ReliabilityPoint &v) {
    j.at("shots_per_key").get_to(v.shots_per_key);
    j.at("k_star").get_to(v.k_star);
    v.orders.clear();
    for (const auto &o : j.at("orders")) {
        v.orders.push_back(OrderReliability{
            o.at("order").get<unsigned>(), o.at("mean").get<double>(), o.at("sd").get<double>(),
            read_optional(o.at("cv"))});
    }
}

void to_json(Json &j, const UniformityReport &v) {
    Json cov = Json::array();
    for (const auto &c : v.covariances) {
        cov.push_back({{"i", c.i}, {"j", c.j}, {"cov", c.cov}, {"tag", register_tag_name(c.tag)}});
    }
    j = Json{
        {"one_probability", v.one_probability},
        {"max_marginal_deviation", v.max_marginal_deviation},
        {"covariances", cov},
    };
}
void from_json(const Json &j, UniformityReport &v) {
    j.at("one_probability").get_to(v.one_probability);
    j.at("max_marginal_deviation").get_to(v.max_marginal_deviation);
    v.covariances.clear();
    for (const auto &c : j.at("covariances")) {
        v.covariances.push_back(CovariancePair{
            c.at("i").get<unsigned>(), c.at("j").get<unsigned>(), c.at("cov").get<double>(),
            parse_tag(c.at("tag").get<std::string>())});
    }
}

void to_json(Json &j, const ReliabilityBin &v) {
    j = Json{{"center", v.center}, {"accuracy", v.accuracy}, {"confidence", v.confidence}, {"count", v.count}};
}
void from_json(const Json &j, ReliabilityBin &v) {
    j.at("center").get_to(v.center);
    j.at("accuracy").get_to(v.accuracy);
    j.at("confidence").get_to(v.confidence);
    j.at("count").get_to(v.count);
}

void to_json(Json &j, const AblationResult &v) {
    Json models = Json::array();
    for (const auto &m : v.models) {
        models.push_back({{"model", m.model}, {"test_accuracy", m.accuracy}, {"test_ece", m.ece}, {"reliability_bins", m.bins}});
    }
    j = Json{{"train_size", v.train_size}, {"test_size", v.test_size}, {"models", models}};
}
void from_json(const Json &j, AblationResult &v) {
    j.at("train_size").get_to(v.train_size);
    j.at("test_size").get_to(v.test_size);
    v.models.clear();
    for (const auto &m : j.at("models")) {
        v.models.push_back(ModelScore{
            m.at("model").get<std::string>(), m.at("test_accuracy").get<double>(), m.at("test_ece").get<double>(),
            m.at("reliability_bins").get<std::vector<ReliabilityBin>>()});
    }
}

void to_json(Json &j, const SuiteReport &v) {
    Json stage_seeds = Json::object();
    for (const auto &[stage, seed] : v.provenance.stage_seeds) {
        stage_seeds[stage] = seed;
    }
    Json simulation = nullptr;
    if (v.simulation) {
        simulation = Json{
            {"target_p_hit", v.simulation->target_p_hit},
            {"lambda", v.simulation->lambda},
            {"q", v.simulation->q},
            {"seed", v.simulation->seed},
        };
    }
    j = Json{
        {"schema_version", v.schema_version},
        {"spec", v.spec},
        {"group_sizes", v.group_sizes},
        {"ridge", v.ridge},
        {"key_recovery", Json{{"per_shot", v.key_accuracy}, {"dictionary", v.dictionary}}},
        {"lattice", v.lattice},
        {"permutation", Json{{"accuracy", v.permutation_accuracy}, {"cps", v.permutation_cps}}},
        {"reliability", v.reliability},
        {"uniformity", v.uniformity},
        {"ablation", v.ablation},
        {"simulation", simulation},
        {"provenance",
         Json{
             {"input_sha256", v.provenance.input_sha256},
             {"master_seed", v.provenance.master_seed},
             {"stage_seeds", stage_seeds},
             {"tool_version", v.provenance.tool_version},
         }},
    };
}
void from_json(const Json &j, SuiteReport &v) {
    j.at("schema_version").get_to(v.schema_version);
    if (v.schema_version != kSchemaVersion) {
        throw InputError("unsupported report schema_version " + std::to_string(v.schema_version));
    }
    j.at("spec").get_to(v.spec);
    j.at("group_sizes").get_to(v.group_sizes);
    j.at("ridge").get_to(v.ridge);
    j.at("key_recovery").at("per_shot").get_to(v.key_accuracy);
    j.at("key_recovery").at("dictionary").get_to(v.dictionary);
    j.at("lattice").get_to(v.lattice);
    j.at("permutation").at("accuracy").get_to(v.permutation_accuracy);
    j.at("permutation").at("cps").get_to(v.permutation_cps);
    j.at("reliability").get_to(v.reliability);
    j.at("uniformity").get_to(v.uniformity);
    j.at("ablation").get_to(v.ablation);
    const auto &sim = j.at("simulation");
    if (sim.is_null()) {
        v.simulation.reset();
    } else {
        v.simulation = SimulationInfo{
            sim.at("target_p_hit").get<double>(), sim.at("lambda").get<double>(), sim.at("q").get<double>(),
            sim.at("seed").get<uint64_t>()};
    }
    const auto &prov = j.at("provenance");
    prov.at("input_sha256").get_to(v.provenance.input_sha256);
    prov.at("master_seed").get_to(v.provenance.master_seed);
    prov.at("tool_version").get_to(v.provenance.tool_version);
    v.provenance.stage_seeds.clear();
    for (const auto &[stage, seed] : prov.at("stage_seeds").items()) {
        v.provenance.stage_seeds.emplace_back(stage, seed.get<uint64_t>());
    }
}

std::string serialize(const Json &j) {
    require_finite(j, "$");
    return j.dump(2) + "\n";
}

std::string serialize(const SuiteReport &report) {
    return serialize(Json(report));
}

SuiteReport parse_suite_report(const std::string &text) {
    try {
        return Json::parse(text).get<SuiteReport>();
    } catch (const nlohmann::json::exception &e) {
        throw InputError(std::string("malformed report: ") + e.what());
    }
}

void write_text_atomically(const std::string &path, const std::string &text) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw InputError("cannot write `" + tmp.string() + "`");
        }
        out << text;
        out.flush();
        if (!out) {
            fs::remove(tmp);
            throw InputError("failed writing `" + tmp.string() + "`");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw InputError("cannot move report into `" + path + "`: " + ec.message());
    }
}

}  // namespace ridgeinfo
