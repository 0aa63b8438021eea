// Command line front end. Exit codes: 0 success, 2 input error, 3 numeric
// error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ridgeinfo/dataset.h"
#include "ridgeinfo/diagnostics.h"
#include "ridgeinfo/errors.h"
#include "ridgeinfo/infolattice.h"
#include "ridgeinfo/keyrec.h"
#include "ridgeinfo/parallel.h"
#include "ridgeinfo/report.h"
#include "ridgeinfo/ridge_metrics.h"
#include "ridgeinfo/simulate.h"
#include "ridgeinfo/stats.h"

using namespace ridgeinfo;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
    unsigned n = 4;
    std::vector<uint32_t> keys{1, 3, 5, 7, 2, 4, 8, 12};
    uint64_t seed = kDefaultSeed;
    unsigned threads = 1;
    std::string in;
    std::string report;

    ExperimentSpec spec() const {
        ExperimentSpec s;
        s.n = n;
        s.keys = keys;
        s.validate();
        return s;
    }
};

void add_spec_options(CLI::App *cmd, CommonOptions &opt) {
    cmd->add_option("--n", opt.n, "Register width in bits")->capture_default_str();
    cmd->add_option("--keys", opt.keys, "Comma separated key list")->delimiter(',')->capture_default_str();
}

void add_seed_option(CLI::App *cmd, CommonOptions &opt) {
    cmd->add_option("--seed", opt.seed, "Seed (default from " + std::string(kSeedEnvVar) + ")")
        ->envname(kSeedEnvVar)
        ->capture_default_str();
}

void add_io_options(CLI::App *cmd, CommonOptions &opt) {
    cmd->add_option("--in", opt.in, "Shot file")->required();
    cmd->add_option("--report", opt.report, "Report path (stdout if omitted)");
}

std::string read_bytes(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open shot file `" + path + "`");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct LoadedInput {
    Dataset dataset;
    std::string sha256;
};

LoadedInput load_input(const CommonOptions &opt) {
    std::string bytes = read_bytes(opt.in);
    std::istringstream in(bytes);
    return {read_dataset(in, opt.spec()), sha256_hex(bytes)};
}

Json report_header(const char *command, const LoadedInput &input) {
    return Json{
        {"schema_version", kSchemaVersion},
        {"command", command},
        {"spec", input.dataset.spec()},
        {"input_sha256", input.sha256},
        {"tool_version", version()},
    };
}

void emit(const CommonOptions &opt, const Json &report) {
    std::string text = serialize(report);
    if (opt.report.empty()) {
        std::cout << text;
    } else {
        write_text_atomically(opt.report, text);
    }
}

void write_heatmaps(const Dataset &dataset, const std::string &dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (uint32_t key : dataset.spec().keys) {
        Heatmap map = heatmap(dataset, key);
        std::string stem = (fs::path(dir) / ("key_" + std::to_string(key))).string();
        write_text_atomically(stem + ".csv", heatmap_csv(map));
        write_text_atomically(stem + ".pgm", heatmap_pgm(map));
        write_text_atomically(stem + "_overlay.csv", heatmap_overlay_text(map));
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Modular ridge shot simulator and information-lattice analysis"};
    app.set_config("--config", "", "TOML/INI config file; flags take precedence");
    app.require_subcommand(1);
    unsigned threads = 1;
    app.add_option("--threads", threads, "Worker threads (0 = all cores); results do not depend on it")
        ->capture_default_str();

    CommonOptions opt;

    // simulate
    auto *simulate = app.add_subcommand("simulate", "Sample a key-labelled shot file");
    NoiseModel noise;
    uint32_t shots_per_key = 1024;
    double calibrate_target = 0;
    std::string out_path;
    add_spec_options(simulate, opt);
    add_seed_option(simulate, opt);
    simulate->add_option("--shots-per-key", shots_per_key)->capture_default_str();
    auto *lambda_opt = simulate->add_option("--lambda", noise.lambda, "Ridge mixture weight")->capture_default_str();
    simulate->add_option("--q", noise.q, "Independent bit-flip probability")->capture_default_str();
    simulate->add_option("--bias", noise.bias, "Per-bit one-probability offsets")->delimiter(',');
    simulate->add_option("--calibrate-p-hit", calibrate_target, "Solve lambda for this ridge-hit rate")
        ->excludes(lambda_opt);
    simulate->add_option("--out", out_path, "Output shot file")->required();

    // metrics
    auto *metrics = app.add_subcommand("metrics", "Ridge hit, contrast and key recovery");
    size_t contrast_replicates = 2000;
    std::string heatmap_dir;
    uint64_t tie_seed = 0;
    add_spec_options(metrics, opt);
    add_seed_option(metrics, opt);
    add_io_options(metrics, opt);
    metrics->add_option("--replicates", contrast_replicates, "Bootstrap replicates")->capture_default_str();
    auto *tie_opt = metrics->add_option("--tie-seed", tie_seed, "Classifier tie-break seed (default: --seed)");
    metrics->add_option("--heatmaps", heatmap_dir, "Directory for per-key count grids");

    // mobius
    auto *mobius = app.add_subcommand("mobius", "Möbius decomposition of I(K; D_S)");
    unsigned k_max = 3;
    std::vector<uint32_t> slice;
    add_spec_options(mobius, opt);
    add_io_options(mobius, opt);
    mobius->add_option("--kmax", k_max, "Truncation order")->capture_default_str();
    mobius->add_option("--keys-slice", slice, "Restrict to these keys")->delimiter(',');

    // permtest
    auto *permtest = app.add_subcommand("permtest", "Label-shuffle permutation test");
    std::string statistic = "accuracy";
    size_t n_perm = 0;
    add_spec_options(permtest, opt);
    add_seed_option(permtest, opt);
    add_io_options(permtest, opt);
    permtest->add_option("--statistic", statistic, "accuracy or cps")->capture_default_str();
    permtest->add_option("--n-perm", n_perm, "Permutations (default 500 accuracy / 200 cps)");
    permtest->add_option("--kmax", k_max, "Truncation order for cps")->capture_default_str();

    // reliability
    auto *reliability = app.add_subcommand("reliability", "Bootstrap reliability frontier over shot budgets");
    std::vector<uint32_t> budgets = kDefaultBudgets;
    size_t replicates = kDefaultReliabilityReplicates;
    add_spec_options(reliability, opt);
    add_seed_option(reliability, opt);
    add_io_options(reliability, opt);
    reliability->add_option("--budgets", budgets, "Shots per key budgets")->delimiter(',')->capture_default_str();
    reliability->add_option("--replicates", replicates, "Bootstrap replicates per budget")->capture_default_str();
    reliability->add_option("--kmax", k_max, "Truncation order")->capture_default_str();

    // uniformity
    auto *uniform_cmd = app.add_subcommand("uniformity", "Pooled marginals and pairwise covariances");
    add_spec_options(uniform_cmd, opt);
    add_seed_option(uniform_cmd, opt);
    add_io_options(uniform_cmd, opt);

    // ablation
    auto *ablation = app.add_subcommand("ablation", "Marginal / pairwise / full-bitstring classifiers with ECE");
    unsigned bins = 10;
    add_spec_options(ablation, opt);
    add_seed_option(ablation, opt);
    add_io_options(ablation, opt);
    ablation->add_option("--bins", bins, "Calibration bins")->capture_default_str();

    // suite
    auto *suite = app.add_subcommand("suite", "Run every analysis stage and write one report");
    SuiteConfig suite_config;
    add_spec_options(suite, opt);
    add_seed_option(suite, opt);
    add_io_options(suite, opt);
    suite->add_option("--kmax", suite_config.k_max)->capture_default_str();
    suite->add_option("--bins", suite_config.bins)->capture_default_str();
    suite->add_option("--budgets", suite_config.budgets)->delimiter(',')->capture_default_str();
    suite->add_option("--replicates", suite_config.reliability_replicates)->capture_default_str();
    suite->add_option("--contrast-replicates", suite_config.contrast_replicates)->capture_default_str();
    suite->add_option("--accuracy-perms", suite_config.accuracy_permutations)->capture_default_str();
    suite->add_option("--cps-perms", suite_config.cps_permutations)->capture_default_str();

    // demo
    auto *demo = app.add_subcommand("demo", "Calibrate, simulate the default design and run the suite");
    std::string demo_shots;
    add_seed_option(demo, opt);
    demo->add_option("--report", opt.report, "Report path (stdout if omitted)");
    demo->add_option("--shots-out", demo_shots, "Also save the simulated shot file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        set_max_threads(threads);

        if (*simulate) {
            ExperimentSpec spec = opt.spec();
            spec.shots_per_key = shots_per_key;
            spec.validate();
            if (calibrate_target > 0) {
                noise.lambda = calibrate_lambda(calibrate_target, noise, spec);
            }
            Dataset data = sample_dataset(spec, noise, opt.seed);
            std::ostringstream text;
            write_dataset(text, data);
            write_text_atomically(out_path, text.str());
            Json summary{
                {"command", "simulate"},
                {"spec", spec},
                {"lambda", noise.lambda},
                {"q", noise.q},
                {"bias", noise.bias},
                {"seed", opt.seed},
                {"shots", data.size()},
                {"out", out_path},
            };
            std::cout << serialize(summary);
        } else if (*metrics) {
            auto input = load_input(opt);
            uint64_t ties = tie_opt->count() ? tie_seed : opt.seed;
            auto stats = ridge_stats(input.dataset, contrast_replicates, opt.seed);
            auto acc = per_shot_accuracy(input.dataset, ties);
            auto dict = dictionary_recovery(input.dataset);
            Json report = report_header("metrics", input);
            report["seed"] = opt.seed;
            report["tie_seed"] = ties;
            report["ridge"] = stats;
            Json keyrec = acc;
            Json dict_json = dict;
            for (auto &[k, v] : dict_json.items()) {
                keyrec[k] = v;
            }
            report["key_recovery"] = keyrec;
            if (!heatmap_dir.empty()) {
                write_heatmaps(input.dataset, heatmap_dir);
                report["heatmaps"] = heatmap_dir;
            }
            emit(opt, report);
        } else if (*mobius) {
            auto input = load_input(opt);
            Dataset data = slice.empty() ? input.dataset : key_slice(input.dataset, slice);
            auto d = decompose(data, k_max);
            Json report = report_header("mobius", input);
            report["lattice"] = summarize_lattice(d, data.spec().keys);
            emit(opt, report);
        } else if (*permtest) {
            auto input = load_input(opt);
            PermStatistic stat = parse_statistic(statistic);
            if (n_perm == 0) {
                n_perm = stat == PermStatistic::accuracy ? kDefaultAccuracyPermutations : kDefaultCpsPermutations;
            }
            Json report = report_header("permtest", input);
            report["seed"] = opt.seed;
            report["permutation"] = permutation_test(input.dataset, stat, n_perm, opt.seed, k_max);
            emit(opt, report);
        } else if (*reliability) {
            auto input = load_input(opt);
            Json report = report_header("reliability", input);
            report["seed"] = opt.seed;
            report["replicates"] = replicates;
            report["k_max"] = k_max;
            report["reliability"] = reliability_sweep(input.dataset, budgets, replicates, k_max, opt.seed);
            emit(opt, report);
        } else if (*uniform_cmd) {
            auto input = load_input(opt);
            Json report = report_header("uniformity", input);
            report["uniformity"] = uniformity(input.dataset);
            emit(opt, report);
        } else if (*ablation) {
            auto input = load_input(opt);
            Json report = report_header("ablation", input);
            report["seed"] = opt.seed;
            report["bins"] = bins;
            report["ablation"] = run_ablation(input.dataset, opt.seed, bins);
            emit(opt, report);
        } else if (*suite) {
            suite_config.spec = opt.spec();
            suite_config.seed = opt.seed;
            emit(opt, Json(run_suite_file(opt.in, suite_config)));
        } else if (*demo) {
            Dataset simulated;
            SuiteReport report = end_to_end_demo(opt.seed, &simulated);
            if (!demo_shots.empty()) {
                save_dataset(simulated, demo_shots);
            }
            emit(opt, Json(report));
        }
    } catch (const InputError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericError &e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception &e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
