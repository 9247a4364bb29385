// Command-line front end: run one experiment, sweep a parameter axis, or
// run the closed-form statistics validation for a configured scenario.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otafl/analysis.hpp"
#include "otafl/runner.hpp"

namespace {

otafl::ExperimentConfig load_with_overrides(const std::string& path,
                                            std::optional<std::uint64_t> seed) {
    otafl::ExperimentConfig cfg = otafl::load_config(path);
    if (seed) cfg.seed = *seed;
    return cfg;
}

int cmd_validate_stats(const otafl::ExperimentConfig& cfg, const std::string& out_dir) {
    const otafl::SeedTree tree(cfg.seed);
    const otafl::ChannelProfile profile = cfg.profile();
    constexpr std::size_t kTrials = 10000;
    bool all_passed = true;

    otafl::RngStream rng = tree.stream("validate-interference");
    const auto kappa = otafl::interference_statistics(cfg.workers, cfg.antennas,
                                                      profile, kTrials, rng);
    std::cout << kappa.to_json() << "\n";
    all_passed &= kappa.passed;

    std::vector<std::string> reports{kappa.to_json()};
    if (cfg.scenario.has_dac() || cfg.scenario.has_adc()) {
        const int bits = cfg.scenario.has_dac() ? cfg.scenario.dac_bits
                                                : cfg.scenario.adc_bits;
        const double eta = otafl::design_gaussian_quantizer(bits).eta;
        otafl::RngStream drng = tree.stream("validate-distortion");
        const auto d = otafl::distortion_statistics(cfg.workers, cfg.antennas, eta,
                                                    profile, kTrials, drng);
        std::cout << d.cross.to_json() << "\n" << d.self.to_json() << "\n";
        reports.push_back(d.cross.to_json());
        reports.push_back(d.self.to_json());
        all_passed &= d.cross.passed && d.self.passed;
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream out(out_dir + "/stat_reports.json", std::ios::trunc);
        out << "[";
        for (std::size_t i = 0; i < reports.size(); ++i) {
            out << (i ? "," : "") << "\n  " << reports[i];
        }
        out << "\n]\n";
    }
    return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated learning over a quantized OFDM multiple-access channel"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    bool deterministic = true;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out-dir", out_dir, "output directory");
        sub->add_option("--seed", seed, "override the config's master seed");
        sub->add_flag("--deterministic", deterministic,
                      "fixed reduction order (always on; flag kept for scripts)");
    };

    auto* run = app.add_subcommand("run", "run one experiment and write CSV + metadata");
    add_common(run);

    auto* sweep = app.add_subcommand("sweep", "run one experiment per axis value");
    add_common(sweep);
    std::string axis;
    std::string values_arg;
    sweep->add_option("--axis", axis, "K | dac_bits | adc_bits | noise_variance | scenario")
        ->required();
    sweep->add_option("--values", values_arg, "comma-separated axis values")->required();

    auto* validate = app.add_subcommand(
        "validate-stats", "Monte Carlo check of the interference/distortion statistics");
    add_common(validate);

    CLI11_PARSE(app, argc, argv);

    try {
        const otafl::ExperimentConfig cfg = load_with_overrides(config_path, seed);
        if (run->parsed()) {
            const auto records = otafl::run_experiment(cfg, out_dir);
            std::cout << otafl::records_to_csv(cfg, records);
            return 0;
        }
        if (sweep->parsed()) {
            std::vector<std::string> values;
            std::string token;
            for (char c : values_arg) {
                if (c == ',') {
                    if (!token.empty()) values.push_back(token);
                    token.clear();
                } else {
                    token += c;
                }
            }
            if (!token.empty()) values.push_back(token);
            const auto points = otafl::run_sweep(cfg, axis, values, out_dir);
            for (const auto& p : points) {
                const double final_acc =
                    p.records.empty() ? 0.0 : p.records.back().test_accuracy;
                std::printf("%s=%s final_accuracy=%.4f\n", axis.c_str(),
                            p.axis_value.c_str(), final_acc);
            }
            return 0;
        }
        return cmd_validate_stats(cfg, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
