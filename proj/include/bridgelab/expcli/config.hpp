#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "../errors.hpp"

namespace bridgelab::expcli {

// One experiment run. `params` carries the experiment-specific keys of the
// [params] section as text; experiments parse what they need.
struct experiment_config {
    std::string experiment;
    std::uint64_t seed = 1;
    std::size_t n_paths = 100000;
    std::size_t grid_steps = 1 << 14;
    double jump_cutoff = 1e-6;
    unsigned threads = 0;  // 0: all hardware threads
    std::map<std::string, std::string> params;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

template <class T>
std::optional<T> parse_number(const std::string& text) {
    std::istringstream in(trim(text));
    T v{};
    in >> v;
    if (in.fail() || !in.eof()) return std::nullopt;
    return v;
}

// Unsigned parse that refuses a leading minus sign.
inline std::optional<std::uint64_t> parse_unsigned(const std::string& text) {
    const auto t = trim(text);
    if (t.empty() || t[0] == '-' || t[0] == '+') return std::nullopt;
    return parse_number<std::uint64_t>(t);
}

}  // namespace detail

// Comma separated list of reals, e.g. "0, 1".
inline std::optional<std::vector<double>> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto v = detail::parse_number<double>(item);
        if (!v) return std::nullopt;
        out.push_back(*v);
    }
    if (out.empty()) return std::nullopt;
    return out;
}

// Reads the top-level keys and the [params] section. Unknown top-level keys
// and malformed numbers are collected and reported together.
inline experiment_config parse_config(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw config_error({std::string("unreadable config: ") + e.message() + " (line " + std::to_string(e.line()) + ")"});
    }
    experiment_config cfg;
    std::vector<std::string> problems;
    for (const auto& [key, node] : tree) {
        if (key == "params") {
            for (const auto& [pk, pv] : node) cfg.params[pk] = detail::trim(pv.data());
            continue;
        }
        if (!node.empty()) {
            problems.push_back("unknown section [" + key + "]");
            continue;
        }
        const std::string value = detail::trim(node.data());
        if (key == "experiment") {
            cfg.experiment = value;
        } else if (key == "seed") {
            if (auto v = detail::parse_unsigned(value)) cfg.seed = *v;
            else problems.push_back("seed: not a non-negative 64-bit integer: '" + value + "'");
        } else if (key == "n_paths") {
            if (auto v = detail::parse_unsigned(value)) cfg.n_paths = *v;
            else problems.push_back("n_paths: not a non-negative integer: '" + value + "'");
        } else if (key == "grid_steps") {
            if (auto v = detail::parse_unsigned(value)) cfg.grid_steps = *v;
            else problems.push_back("grid_steps: not a non-negative integer: '" + value + "'");
        } else if (key == "jump_cutoff") {
            if (auto v = detail::parse_number<double>(value)) cfg.jump_cutoff = *v;
            else problems.push_back("jump_cutoff: not a number: '" + value + "'");
        } else if (key == "threads") {
            if (auto v = detail::parse_unsigned(value)) cfg.threads = static_cast<unsigned>(*v);
            else problems.push_back("threads: not a non-negative integer: '" + value + "'");
        } else {
            problems.push_back("unknown key '" + key + "'");
        }
    }
    if (!problems.empty()) throw config_error(problems);
    return cfg;
}

inline experiment_config parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace bridgelab::expcli
