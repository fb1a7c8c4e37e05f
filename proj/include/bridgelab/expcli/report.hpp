#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "../stats.hpp"

namespace bridgelab::expcli {

using json = nlohmann::ordered_json;

// Shortest round-trip decimal form, independent of locale.
inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Non-finite reals have no JSON literal; they are written as strings.
inline json real_json(double v) {
    if (std::isfinite(v)) return v;
    return format_real(v);
}

inline json to_json(const stats::stat_report& r) {
    return json{{"name", r.test_name},
                {"kind", "statistic"},
                {"statistic", real_json(r.statistic)},
                {"threshold", real_json(r.threshold)},
                {"sample_sizes", r.sample_sizes},
                {"passed", r.passed},
                {"reference", r.reference}};
}

inline json to_json(const stats::moment_report& m, const std::string& name, const std::string& reference) {
    return json{{"name", name},
                {"kind", "moment"},
                {"q", real_json(m.q)},
                {"empirical", real_json(m.empirical)},
                {"std_error", real_json(m.std_error)},
                {"predicted", real_json(m.predicted)},
                {"allowance", real_json(m.allowance)},
                {"tolerance", real_json(m.tolerance())},
                {"deviation", real_json(std::abs(m.empirical - m.predicted))},
                {"passed", m.passed()},
                {"reference", reference}};
}

// Collected test outcomes of one experiment run.
class report {
public:
    void add(const stats::stat_report& r) { push(to_json(r), r.passed); }

    void add(const stats::moment_report& m, const std::string& name, const std::string& reference) {
        push(to_json(m, name, reference), m.passed());
    }

    // A deterministic check: passes when value <= threshold.
    void add_check(const std::string& name, double value, double threshold, const std::string& reference) {
        const bool ok = value <= threshold;
        push(json{{"name", name},
                  {"kind", "check"},
                  {"value", real_json(value)},
                  {"threshold", real_json(threshold)},
                  {"passed", ok},
                  {"reference", reference}},
             ok);
    }

    // A yes/no property.
    void add_property(const std::string& name, bool holds, const std::string& reference, json detail = json::object()) {
        json j{{"name", name}, {"kind", "property"}, {"passed", holds}, {"reference", reference}};
        if (!detail.empty()) j["detail"] = std::move(detail);
        push(std::move(j), holds);
    }

    void diagnostic(const std::string& key, json value) { diagnostics_[key] = std::move(value); }

    const json& tests() const { return tests_; }
    const json& diagnostics() const { return diagnostics_; }
    bool all_passed() const { return all_passed_; }

private:
    void push(json j, bool ok) {
        tests_.push_back(std::move(j));
        all_passed_ = all_passed_ && ok;
    }
    json tests_ = json::array();
    json diagnostics_ = json::object();
    bool all_passed_ = true;
};

// CSV file with a fixed header; cells are reals or short text.
class csv_writer {
public:
    csv_writer(const std::filesystem::path& file, const std::vector<std::string>& columns)
        : out_(file, std::ios::binary), width_(columns.size()) {
        if (!out_) throw std::runtime_error("cannot open " + file.string() + " for writing");
        write_row(columns);
    }

    void row(const std::vector<double>& cells) {
        std::vector<std::string> text;
        text.reserve(cells.size());
        for (double v : cells) text.push_back(format_real(v));
        write_row(text);
    }

    void row(const std::vector<std::string>& cells) { write_row(cells); }

private:
    void write_row(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw std::logic_error("csv_writer: row width does not match the header");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    std::ofstream out_;
    std::size_t width_;
};

}  // namespace bridgelab::expcli
