#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bridgelab/expcli/experiments.hpp"

using namespace bridgelab;
using namespace bridgelab::expcli;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> problems_of(const std::string& text) {
    try {
        validate_config(parse_config_text(text));
    } catch (const config_error& e) {
        return e.problems;
    }
    return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& what) {
    return std::any_of(problems.begin(), problems.end(), [&](const std::string& p) { return p.find(what) != std::string::npos; });
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("bridgelab-test-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config_text(R"(
experiment = verify-gc-moments
seed = 42
n_paths = 1000
grid_steps = 64
jump_cutoff = 1e-7
threads = 3

[params]
c_values = 0.5, 1
)");
    CHECK(cfg.experiment == "verify-gc-moments");
    CHECK(cfg.seed == 42);
    CHECK(cfg.n_paths == 1000);
    CHECK(cfg.grid_steps == 64);
    CHECK(cfg.jump_cutoff == 1e-7);
    CHECK(cfg.threads == 3);
    CHECK(cfg.params.at("c_values") == "0.5, 1");
    const auto v = validate_config(cfg);
    CHECK(v.info->name == "verify-gc-moments");
    CHECK(v.params.reals("c_values") == std::vector<double>{0.5, 1.0});
    CHECK(v.params.reals("q_values") == std::vector<double>{1.0, 2.0});

    const auto d = parse_config_text("experiment = probe-resolvent\n");
    CHECK(d.seed == 1);
    CHECK(d.n_paths == 100000);
    CHECK(d.grid_steps == 16384);
    CHECK(d.threads == 0);
}

TEST_CASE("every config problem is reported at once") {
    const auto p = problems_of(R"(
experiment = verify-gc-moments
seed = -3
n_paths = many
colour = blue
)");
    CHECK(p.size() == 3);
    CHECK(mentions(p, "seed"));
    CHECK(mentions(p, "n_paths"));
    CHECK(mentions(p, "colour"));

    const auto q = problems_of(R"(
experiment = verify-gc-moments
n_paths = 1
grid_steps = 7
jump_cutoff = 0.5
[params]
q_values = 1, x
bogus = 1
)");
    CHECK(mentions(q, "n_paths"));
    CHECK(mentions(q, "grid_steps"));
    CHECK(mentions(q, "jump_cutoff"));
    CHECK(mentions(q, "q_values"));
    CHECK(mentions(q, "bogus"));

    CHECK(mentions(problems_of("seed = 1\n"), "experiment: missing"));
    CHECK(mentions(problems_of("experiment = nope\n"), "unknown name"));
    CHECK(mentions(problems_of("experiment = verify-gc-moments\n[extra]\na = 1\n"), "unknown section"));
    CHECK(mentions(problems_of("experiment = verify-gc-moments\njump_cutoff = 0\n"), "jump_cutoff"));
    CHECK_THROWS_AS(parse_config_text("experiment = a\n[params\n"), config_error);
}

TEST_CASE("experiment-specific validation") {
    CHECK(mentions(problems_of("experiment = verify-gc-moments\n[params]\nq_values = 0, 1\n"), "q_values"));
    CHECK(mentions(problems_of("experiment = verify-gc-moments\n[params]\nasymptotic_q = 50\n"), "asymptotic_q"));
    CHECK(mentions(problems_of("experiment = verify-arcsine\n[params]\nalphas = 0.5, 1\n"), "alphas"));
    CHECK(mentions(problems_of("experiment = verify-arcsine\n[params]\nb = 0\n"), "b"));
    CHECK(mentions(problems_of("experiment = verify-window-convergence\n[params]\ndeltas = 0.1, 0.2\n"), "deltas"));
    CHECK(mentions(problems_of("experiment = probe-resolvent\n[params]\ncases = 3:0\n"), "cases"));
    CHECK(problems_of("experiment = verify-densities\n").empty());
}

TEST_CASE("registry") {
    const auto& r = experiment_registry();
    REQUIRE(r.size() == 8);
    for (const auto& e : r) {
        CHECK(find_experiment(e.name) == &e);
        CHECK(!e.anchor.empty());
        CHECK(!e.csv.empty());
        for (const auto& s : e.csv) CHECK(!s.columns.empty());
        // every experiment has a runner and validates with its defaults
        CHECK(std::count_if(experiments::runners().begin(), experiments::runners().end(),
                            [&](const auto& x) { return x.name == e.name; }) == 1);
        CHECK_NOTHROW(validate_config(parse_config_text("experiment = " + e.name + "\n")));
    }
    CHECK(find_experiment("nope") == nullptr);
    CHECK(registry_json().size() == 8);
    CHECK(registry_table().find("verify-arcsine") != std::string::npos);
}

TEST_CASE("shipped configs are valid and the schema file is current") {
    const fs::path root = BRIDGELAB_SOURCE_DIR;
    std::size_t n = 0;
    for (const auto& e : experiment_registry()) {
        std::ifstream in(root / "configs" / (e.name + ".ini"));
        REQUIRE(in);
        const auto cfg = parse_config(in);
        CHECK(cfg.experiment == e.name);
        CHECK_NOTHROW(validate_config(cfg));
        ++n;
    }
    CHECK(n == 8);
    const auto on_disk = json::parse(slurp(root / "schemas" / "csv_schema.json"));
    CHECK(on_disk == all_schemas_json());
}

TEST_CASE("real formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 12345678.9}) CHECK(std::stod(format_real(v)) == v);
    CHECK(format_real(std::nan("")) == "nan");
    CHECK(real_json(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("small runs are reproducible across thread counts") {
    struct small {
        std::string name;
        std::size_t n;
        std::size_t steps;
    };
    for (const auto& s : {small{"verify-brownian-bridge", 200, 64}, small{"verify-gc-moments", 200, 64},
                          small{"verify-arcsine", 200, 64}, small{"verify-subordinator", 200, 64},
                          small{"verify-bessel-bridge", 200, 64}, small{"verify-window-convergence", 200, 8},
                          small{"probe-resolvent", 2, 4}, small{"verify-densities", 200, 64}}) {
        CAPTURE(s.name);
        std::vector<json> summaries;
        std::vector<fs::path> dirs;
        for (unsigned threads : {1u, 1u, 8u}) {
            auto cfg = parse_config_text("experiment = " + s.name + "\nseed = 5\n");
            cfg.n_paths = s.n;
            cfg.grid_steps = s.steps;
            cfg.threads = threads;
            const auto dir = scratch_dir(s.name + "-" + std::to_string(summaries.size()));
            const auto out = run_experiment(cfg, dir);
            CHECK(fs::exists(out.dir / "summary.json"));
            auto j = json::parse(slurp(out.dir / "summary.json"));
            CHECK(j["run_info"]["threads"] == threads);
            CHECK(j.contains("tests"));
            CHECK(j["all_passed"].is_boolean());
            for (const auto& f : j["csv_files"]) CHECK(fs::exists(out.dir / f.get<std::string>()));
            j.erase("run_info");
            summaries.push_back(j);
            dirs.push_back(out.dir);
        }
        CHECK(summaries[0] == summaries[1]);
        CHECK(summaries[0] == summaries[2]);
        for (const auto& f : summaries[0]["csv_files"]) {
            const auto name = f.get<std::string>();
            const auto a = slurp(dirs[0] / name);
            CHECK(a == slurp(dirs[1] / name));
            CHECK(a == slurp(dirs[2] / name));
            // header matches the published schema
            const auto* info = find_experiment(s.name);
            const auto it = std::find_if(info->csv.begin(), info->csv.end(), [&](const auto& c) { return c.file == name; });
            REQUIRE(it != info->csv.end());
            std::string header;
            for (std::size_t i = 0; i < it->columns.size(); ++i) header += (i ? "," : "") + it->columns[i];
            CHECK(a.substr(0, a.find('\n')) == header);
        }
        for (const auto& d : dirs) fs::remove_all(d.parent_path());
    }
}
