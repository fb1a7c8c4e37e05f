#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "report.hpp"

namespace bridgelab::expcli {

enum class param_kind { real, real_list, integer, case_list };

struct param_spec {
    std::string key;
    std::string default_value;
    param_kind kind;
    std::string help;
};

struct csv_schema {
    std::string file;
    std::vector<std::string> columns;
};

struct experiment_info {
    std::string name;
    std::string anchor;   // the result of the theory being checked
    std::string summary;
    std::vector<param_spec> params;
    std::vector<csv_schema> csv;
};

inline const std::vector<experiment_info>& experiment_registry() {
    static const std::vector<experiment_info> table = {
        {"verify-brownian-bridge",
         "pathwise self-similar bridge through the last passage time g_c",
         "Brownian bridges built from g_c against the exact linear construction (KS at s = 1/4, 1/2, 3/4)",
         {{"c_values", "0, 1", param_kind::real_list, "curve levels c; the bridge ends at c"}},
         {{"bridge_marginals.csv",
           {"c", "path_index", "g_c", "pathwise_s025", "pathwise_s050", "pathwise_s075", "exact_s025", "exact_s050",
            "exact_s075"}}}},
        {"verify-gc-moments",
         "Hermite moment formula for E[(1 - g_c)^q]",
         "Monte Carlo moments of 1 - g_c for Brownian motion against Gamma(2q)/(2q H_2q(c) H_2q(-c))",
         {{"c_values", "0, 1", param_kind::real_list, "curve levels c"},
          {"q_values", "1, 2", param_kind::real_list, "moment orders q > 0"},
          {"asymptotic_q", "400", param_kind::real, "largest q for the large-q ratio check (>= 100)"}},
         {{"gc_samples.csv", {"c", "path_index", "g_c_grid", "g_c_refined"}}}},
        {"verify-arcsine",
         "arcsine law of g_0 and generalized arcsine law of the pre-passage value",
         "Brownian g_0 against (2/pi) arcsin sqrt(x); subordinator g/b against Beta(alpha, 1 - alpha)",
         {{"alphas", "0.3, 0.5, 0.7", param_kind::real_list, "subordinator indices in (0, 1)"},
          {"b", "1", param_kind::real, "passage level b > 0"},
          {"relative_cutoff", "1e-5", param_kind::real, "small-jump cutoff relative to the current scale"}},
         {{"arcsine_samples.csv", {"family", "alpha", "path_index", "value"}}}},
        {"verify-subordinator",
         "stable subordinator conditioned to die at b (h-transform with the potential density)",
         "death time, scaling, (L, g) joint law and bridge marginals of the conditioned subordinator",
         {{"alpha", "0.5", param_kind::real, "subordinator index in (0, 1)"},
          {"b", "1", param_kind::real, "death level b > 0"},
          {"scale_b", "2", param_kind::real, "second level for the scaling comparison"},
          {"relative_cutoff", "1e-5", param_kind::real, "small-jump cutoff relative to the current scale"}},
         {{"subordinator_samples.csv", {"b", "path_index", "L", "g", "zeta", "y_half"}}}},
        {"verify-bessel-bridge",
         "Bessel bridge from 0 by time inversion",
         "marginals of u X_{1/u - 1/t} against the normalized product of Bessel transition densities",
         {{"delta", "3", param_kind::real, "dimension delta > 0"},
          {"y", "1", param_kind::real, "end point y > 0"},
          {"t", "1", param_kind::real, "bridge length t > 0"}},
         {{"bessel_bridge.csv", {"path_index", "u025", "u050", "u075"}}}},
        {"verify-window-convergence",
         "bridge as the limit of conditioning on a shrinking window around the end point",
         "Brownian paths conditioned on |X_t - y| < delta: conditional mean, acceptance rate, binned law of X_s",
         {{"x", "0", param_kind::real, "start point"},
          {"y", "1", param_kind::real, "end point"},
          {"t", "1", param_kind::real, "length t > 0"},
          {"s", "0.5", param_kind::real, "observation time in (0, t)"},
          {"deltas", "0.2, 0.1, 0.05", param_kind::real_list, "window half-widths"},
          {"rn_delta", "0.02", param_kind::real, "window for the binned law check"},
          {"window_steps", "2", param_kind::integer, "grid steps on [0, t]; s must be a grid time"},
          {"max_trials", "1000000000", param_kind::integer, "trial budget per window"}},
         {{"window_samples.csv", {"delta", "sample_index", "x_s", "x_t"}}}},
        {"probe-resolvent",
         "small-time exponents of the stable Ornstein-Uhlenbeck density on the diagonal",
         "least-squares slope of log q_t(x, x) against log t",
         {{"cases", "2:0, 1:0, 0.5:0, 1:0.5, 0.5:1", param_kind::case_list, "alpha:x pairs"},
          {"t_max", "1e-2", param_kind::real, "largest probe time (<= 0.1)"},
          {"t_min", "1e-6", param_kind::real, "smallest probe time"},
          {"points", "16", param_kind::integer, "number of geometric probe times (>= 8)"}},
         {{"resolvent_probe.csv", {"alpha", "x", "t", "q_t"}}}},
        {"verify-densities",
         "transition densities, Chapman-Kolmogorov and the subordinator Laplace transform",
         "normalizations, Chapman-Kolmogorov residuals, stable scaling, death-time density, E exp(-X_1)",
         {},
         {{"density_checks.csv", {"check", "label", "value", "target", "abs_error"}},
          {"laplace_samples.csv", {"path_index", "x1"}}}},
    };
    return table;
}

inline const experiment_info* find_experiment(const std::string& name) {
    for (const auto& e : experiment_registry())
        if (e.name == name) return &e;
    return nullptr;
}

inline json schema_json(const experiment_info& e) {
    json files = json::object();
    for (const auto& s : e.csv) files[s.file] = s.columns;
    return files;
}

// The whole CSV schema table, as shipped in schemas/csv_schema.json.
inline json all_schemas_json() {
    json out = json::object();
    for (const auto& e : experiment_registry()) out[e.name] = schema_json(e);
    return out;
}

inline json registry_json() {
    json out = json::array();
    for (const auto& e : experiment_registry()) {
        json params = json::object();
        for (const auto& p : e.params) params[p.key] = p.default_value;
        out.push_back(json{{"name", e.name}, {"anchor", e.anchor}, {"summary", e.summary}, {"defaults", params}});
    }
    return out;
}

inline std::string registry_table() {
    std::ostringstream out;
    for (const auto& e : experiment_registry()) {
        out << e.name << "\n    anchor:   " << e.anchor << "\n    checks:   " << e.summary << "\n";
        if (e.params.empty()) {
            out << "    defaults: (none)\n";
        } else {
            out << "    defaults:";
            for (const auto& p : e.params) out << " " << p.key << "=" << p.default_value << ";";
            out << "\n";
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Parameter access
// ---------------------------------------------------------------------------

// "alpha:x" pairs separated by commas.
inline std::optional<std::vector<std::pair<double, double>>> parse_case_list(const std::string& text) {
    std::vector<std::pair<double, double>> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) return std::nullopt;
        auto a = detail::parse_number<double>(item.substr(0, colon));
        auto x = detail::parse_number<double>(item.substr(colon + 1));
        if (!a || !x) return std::nullopt;
        out.emplace_back(*a, *x);
    }
    if (out.empty()) return std::nullopt;
    return out;
}

class param_values {
public:
    param_values() = default;
    explicit param_values(std::map<std::string, std::string> values) : values_(std::move(values)) {}

    const std::string& text(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw std::logic_error("missing parameter " + key);
        return it->second;
    }
    double real(const std::string& key) const { return *detail::parse_number<double>(text(key)); }
    std::vector<double> reals(const std::string& key) const { return *parse_real_list(text(key)); }
    std::uint64_t integer(const std::string& key) const { return *detail::parse_unsigned(text(key)); }
    std::vector<std::pair<double, double>> cases(const std::string& key) const { return *parse_case_list(text(key)); }
    const std::map<std::string, std::string>& all() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Defaults overlaid with the configured values; type errors and unknown keys
// are appended to `problems`.
inline param_values effective_params(const experiment_info& info, const experiment_config& cfg,
                                     std::vector<std::string>& problems) {
    std::map<std::string, std::string> values;
    for (const auto& p : info.params) values[p.key] = p.default_value;
    for (const auto& [k, v] : cfg.params) {
        auto it = std::find_if(info.params.begin(), info.params.end(), [&](const param_spec& p) { return p.key == k; });
        if (it == info.params.end()) {
            problems.push_back("params." + k + ": unknown parameter for " + info.name);
            continue;
        }
        bool ok = true;
        switch (it->kind) {
            case param_kind::real: {
                auto r = detail::parse_number<double>(v);
                ok = r && std::isfinite(*r);
                break;
            }
            case param_kind::real_list: {
                auto r = parse_real_list(v);
                ok = r && std::all_of(r->begin(), r->end(), [](double d) { return std::isfinite(d); });
                break;
            }
            case param_kind::integer: ok = detail::parse_unsigned(v).has_value(); break;
            case param_kind::case_list: ok = parse_case_list(v).has_value(); break;
        }
        if (!ok) {
            problems.push_back("params." + k + ": cannot parse '" + v + "'");
            continue;
        }
        values[k] = v;
    }
    return param_values(std::move(values));
}

}  // namespace bridgelab::expcli
