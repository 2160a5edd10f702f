// Command-line entry point: kldwave <command> [--config PATH] [--out DIR]
// [--seed N] [--set key=value]... [--parallel N]

#include "experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace kldwave::cli;
    CLI::App app{"Waveform design for covariance-based detection"};
    app.set_version_flag("--version", KLDWAVE_VERSION);
    app.require_subcommand(1);

    Invocation inv;
    std::string out;
    std::uint64_t seed = 0;
    int parallel = 1;
    const char* help[] = {
        "Optimize one waveform with fp, mm or amm",
        "Time the solvers over a grid of problem sizes",
        "Sweep the sensing/communication trade-off",
        "Compare optimized and orthogonal waveforms for multi-device detection",
        "Validate a scenario file and run the built-in checks",
    };
    std::size_t k = 0;
    for (std::string_view name : kCommands) {
        CLI::App* sub = app.add_subcommand(std::string(name), help[k++]);
        sub->add_option("--config", inv.config_path, "JSON config or run manifest")->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output directory");
        sub->add_option("--seed", seed, "Base seed");
        sub->add_option("--set", inv.sets, "Override a config key (dotted path), repeatable");
        sub->add_option("--parallel", parallel, "Worker threads for Monte Carlo trials and checks")
            ->check(CLI::PositiveNumber);
        sub->callback([&inv, name] { inv.command = std::string(name); });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    for (CLI::App* sub : app.get_subcommands()) {
        if (sub->count("--out")) inv.out = out;
        if (sub->count("--seed")) inv.seed = seed;
        if (sub->count("--parallel")) inv.parallel = parallel;
    }
    return run(inv, std::cout, std::cerr);
}
