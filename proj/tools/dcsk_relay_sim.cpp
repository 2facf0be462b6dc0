#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dcsk_relay/experiment/config.hpp"
#include "dcsk_relay/experiment/experiment.hpp"

namespace ex = dcsk_relay::experiment;

int main(int argc, char** argv) {
    CLI::App app{"Buffer-aided SWIPT DCSK relay: simulation and theory sweeps"};
    std::string config_path, preset, out_dir;
    std::uint64_t seed = 0, slots = 0;
    std::size_t workers = 0;
    bool list = false, quiet = false;
    app.add_option("--config", config_path, "key = value experiment file")->check(CLI::ExistingFile);
    app.add_option("--preset", preset, "figure preset (fig4 ... fig11)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "base seed");
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--slots", slots, "slots per trial")->check(CLI::PositiveNumber);
    app.add_flag("--list-presets", list, "print the preset names and exit");
    app.add_flag("-q,--quiet", quiet, "suppress progress output");
    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const auto& n : ex::preset_names()) std::cout << n << '\n';
        return 0;
    }
    if (config_path.empty() == preset.empty()) {
        std::cerr << "error: give exactly one of --config or --preset\n";
        return 2;
    }

    std::string text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read " << config_path << '\n';
            return 3;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    } else {
        text = "preset = " + preset + "\n";
    }
    // command-line overrides go last so they win
    if (app.count("--out")) text += "output_dir = " + out_dir + "\n";
    if (app.count("--seed")) text += "seed = " + std::to_string(seed) + "\n";
    if (app.count("--workers")) text += "workers = " + std::to_string(workers) + "\n";
    if (app.count("--slots")) text += "slots = " + std::to_string(slots) + "\n";

    ex::ExperimentConfig cfg;
    try {
        cfg = ex::validate_config(text);
    } catch (const ex::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';

    ex::ExperimentResult res;
    try {
        res = ex::run_experiment(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    if (!quiet) {
        std::cout << res.csv_path.string() << '\n' << res.manifest_path.string() << '\n';
        std::printf("%zu points, %zu failed, %.1f s\n", res.points.size(), res.failed(), res.wall_seconds);
    }
    return 0;
}
