#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crossnet/runner.hpp"

using namespace crossnet;

int main(int argc, char** argv) {
    CLI::App app{"Feature-cross learning toolkit: cross-network training, gradient checks, "
                 "symbolic polynomial verification, and spectrum analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t repeats = 0;
    std::vector<std::string> overrides;
    bool have_seed = false, have_out = false, have_repeats = false;

    app.add_option("--config", config_path, "experiment config file (key = value lines)");
    app.add_option("--out", out_dir, "output directory")->each([&](const std::string&) { have_out = true; });
    app.add_option("--seed", seed, "seed override")->each([&](const std::string&) { have_seed = true; });
    app.add_option("--repeats", repeats, "number of repeated runs (seed, seed+1, ...)")
        ->each([&](const std::string&) { have_repeats = true; });
    app.add_option("--set", overrides, "extra 'key = value' config overrides")->take_all();

    const std::pair<const char*, ExperimentKind> kinds[] = {
        {"synth-fit", ExperimentKind::synth_fit}, {"train", ExperimentKind::train},
        {"gradcheck", ExperimentKind::gradcheck}, {"oracle", ExperimentKind::oracle},
        {"analyze", ExperimentKind::analyze},
    };
    const char* descriptions[] = {
        "fit a built-in synthetic polynomial target",
        "train on a CSV dataset with embedded categorical features",
        "finite-difference checks for every layer kind and architecture",
        "symbolic polynomial verification of the cross network",
        "singular-value spectrum and block-norm report for a checkpoint",
    };
    for (std::size_t i = 0; i < 5; ++i) app.add_subcommand(kinds[i].first, descriptions[i])->fallthrough();

    CLI11_PARSE(app, argc, argv);

    ExperimentConfig config;
    try {
        if (!config_path.empty()) config = load_config_file(config_path);
        for (std::size_t i = 0; i < 5; ++i)
            if (app.get_subcommand(kinds[i].first)->parsed()) config.experiment = kinds[i].second;
        for (const auto& line : overrides) apply_config_line(config, line);
        if (have_seed) config.seed = seed;
        if (have_out) config.out_dir = out_dir;
        if (have_repeats) config.repeats = repeats;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigInvalid;
    }

    const ExperimentResult result = run_experiment(config, std::cout);
    return result.exit_code;
}
