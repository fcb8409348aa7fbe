// fas-thz: outage-probability experiments for fluid-antenna THz links.
//
//   fas-thz <subcommand> --config <path> [--out <path>] [--seed N] [--trials N] [--workers N]

#include <fasthz/cli.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    using fasthz::cli::Subcommand;

    CLI::App app{"Outage probability of fluid-antenna THz links"};
    app.set_version_flag("--version", fasthz::cli::tool_version);
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed, trials;
    std::optional<unsigned> workers;

    const std::pair<Subcommand, const char*> commands[] = {
        {Subcommand::op_curve, "Outage probability along the configured sweep axis"},
        {Subcommand::rate_sweep, "Outage probability against target rate (sweep.axis = rate_gbps)"},
        {Subcommand::mc_validate, "Analytic and Monte Carlo side by side with an agreement flag"},
        {Subcommand::corr, "Port correlation for a grid of port counts and sizes"},
        {Subcommand::link_budget, "Received power, average SNR and threshold breakdown"},
    };
    for (const auto& [cmd, help] : commands) {
        auto* sub = app.add_subcommand(fasthz::cli::to_string(cmd), help);
        sub->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "CSV output path (default: config output_path, else stdout)");
        sub->add_option("--seed", seed, "Monte Carlo seed");
        sub->add_option("--trials", trials, "Monte Carlo trials per point");
        sub->add_option("--workers", workers, "worker threads (does not change results)");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    fasthz::cli::Overrides o{out, seed, trials, workers};
    return fasthz::cli::run(fasthz::cli::parse_subcommand(name), config_path, o);
}
