#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bridgelab/expcli/experiments.hpp"

namespace be = bridgelab::expcli;

namespace {

std::filesystem::path output_root(const std::optional<std::string>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("BRIDGELAB_OUT_DIR"); env && *env) return env;
    return "bridgelab-out";
}

int run(const std::string& file, std::optional<std::uint64_t> seed, std::optional<std::size_t> n_paths,
        std::optional<unsigned> threads, const std::optional<std::string>& out) {
    std::ifstream in(file);
    if (!in) {
        std::cerr << "bridgelab: cannot open config " << file << "\n";
        return 2;
    }
    be::experiment_config cfg;
    try {
        cfg = be::parse_config(in);
        if (seed) cfg.seed = *seed;
        if (n_paths) cfg.n_paths = *n_paths;
        if (threads) cfg.threads = *threads;
        be::validate_config(cfg);
    } catch (const bridgelab::config_error& e) {
        std::cerr << "bridgelab: invalid config " << file << ":" << e.what() << "\n";
        return 2;
    }
    const auto outcome = be::run_experiment(cfg, output_root(out));
    for (const auto& t : outcome.summary["tests"])
        std::cout << (t["passed"].get<bool>() ? "PASS  " : "FAIL  ") << t["name"].get<std::string>() << "\n";
    std::cout << "summary: " << (outcome.dir / "summary.json").string() << "\n";
    return outcome.all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo lab for Markovian bridges"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run the experiment described by a config file");
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_paths;
    std::optional<unsigned> threads;
    std::optional<std::string> out;
    run_cmd->add_option("config", config_file, "INI config file")->required();
    run_cmd->add_option("--seed", seed, "override the master seed");
    run_cmd->add_option("--n-paths", n_paths, "override the number of paths");
    run_cmd->add_option("--threads", threads, "worker threads (0: all cores)");
    run_cmd->add_option("--out", out, "output directory (default: $BRIDGELAB_OUT_DIR or ./bridgelab-out)");

    auto* list_cmd = app.add_subcommand("list", "list experiments, anchors and defaults");
    bool as_json = false;
    list_cmd->add_flag("--json", as_json, "machine-readable output");

    auto* schema_cmd = app.add_subcommand("schema", "print the CSV columns of an experiment");
    std::string schema_name;
    schema_cmd->add_option("experiment", schema_name, "experiment name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return run(config_file, seed, n_paths, threads, out);
        if (*list_cmd) {
            if (as_json) std::cout << be::registry_json().dump(2) << "\n";
            else std::cout << be::registry_table();
            return 0;
        }
        if (*schema_cmd) {
            const auto* info = be::find_experiment(schema_name);
            if (!info) {
                std::cerr << "bridgelab: unknown experiment '" << schema_name << "'\n";
                return 2;
            }
            std::cout << be::schema_json(*info).dump(2) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "bridgelab: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
