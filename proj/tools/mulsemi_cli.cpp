#include "mulsemi/app.hpp"
#include "mulsemi/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace mulsemi;

int write_output(const std::string& text, const std::optional<std::string>& path, bool quiet) {
    if (path) {
        std::ofstream out(*path, std::ios::binary);
        if (!out || !(out << text)) {
            std::cerr << "error: cannot write '" << *path << "'\n";
            return app::kFailure;
        }
        if (!quiet) std::cerr << "wrote " << *path << '\n';
        return app::kOk;
    }
    std::cout << text;
    return app::kOk;
}

template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const app::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return app::kConfigError;
    } catch (const Error& e) {
        std::cerr << "numerical error in module '" << e.module() << "', operation '" << e.operation()
                  << "': " << e.what() << '\n';
        return app::kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return app::kFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Stability analysis of multiplication semigroups on discretized Bochner spaces"};
    cli.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_path;
    std::optional<std::string> csv_path;
    std::optional<std::uint64_t> seed;
    std::string parameter;
    unsigned threads = 1;
    bool quiet = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "configuration file (JSON)")->required();
        sub->add_option("--seed", seed, "override the configured random seed");
        sub->add_option("--threads", threads, "worker threads for per-cell work")->check(CLI::PositiveNumber);
        sub->add_flag("--quiet", quiet, "suppress progress messages");
    };

    CLI::App* analyze = cli.add_subcommand("analyze", "classify uniform, strong and almost weak stability");
    common(analyze);
    analyze->add_option("--out", out_path, "write the JSON report here instead of stdout");

    CLI::App* sweep = cli.add_subcommand("sweep", "sweep truncation size, refinement level or delta");
    common(sweep);
    sweep->add_option("--csv", csv_path, "write CSV here instead of stdout");
    sweep->add_option("--param", parameter, "N, level or delta (default: sweep.parameter)");

    CLI::App* traj = cli.add_subcommand("trajectory", "export ||e^{tA}|| and probe norms over time");
    common(traj);
    traj->add_option("--csv", csv_path, "write CSV here instead of stdout");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? app::kOk : app::kConfigError;
    }
    set_thread_count(threads);

    return guarded([&] {
        const app::Config config = app::Config::load(config_path, app::Overrides{seed});
        if (analyze->parsed()) {
            const auto path = out_path ? out_path : config.json_path();
            return write_output(app::run_analyze(config), path, quiet);
        }
        const auto path = csv_path ? csv_path : config.csv_path();
        if (sweep->parsed()) return write_output(app::run_sweep(config, parameter), path, quiet);
        return write_output(app::run_trajectory(config), path, quiet);
    });
}
