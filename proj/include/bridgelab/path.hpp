#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "errors.hpp"

namespace bridgelab {

// Uniform time grid on [0, horizon].
struct grid_spec {
    double horizon = 1.0;
    std::size_t steps = 1 << 14;

    void validate() const {
        if (!(horizon > 0.0)) throw domain_error("grid_spec: horizon must be > 0");
        if (steps < 2) throw domain_error("grid_spec: steps must be >= 2");
    }
    double dt() const { return horizon / static_cast<double>(steps); }
    double time(std::size_t i) const {
        return i == steps ? horizon : horizon * static_cast<double>(i) / static_cast<double>(steps);
    }
};

// A jump at `time` from the left limit `pre` to the value `post`.
struct jump_record {
    double time;
    double pre;
    double post;
};

// One realized trajectory. Between consecutive times the path is linear;
// at a time carrying a jump record, `values` holds the post-jump (cadlag)
// value and the path approaches `pre` from the left.
struct sample_path {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<jump_record> jumps;

    std::size_t size() const { return times.size(); }
    double start_value() const { return values.front(); }
    double end_time() const { return times.back(); }
    double end_value() const { return values.back(); }

    // Left limit at times[i]: the pre-jump value if a jump is recorded there.
    double left_limit_at_index(std::size_t i) const {
        if (!jumps.empty()) {
            auto it = std::lower_bound(jumps.begin(), jumps.end(), times[i],
                                       [](const jump_record& j, double t) { return j.time < t; });
            if (it != jumps.end() && it->time == times[i]) return it->pre;
        }
        return values[i];
    }

    // Cadlag evaluation with linear interpolation between recorded times.
    double value_at(double t) const {
        if (times.empty()) throw std::logic_error("sample_path: empty path");
        if (t <= times.front()) return values.front();
        if (t >= times.back()) return values.back();
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const auto i = static_cast<std::size_t>(it - times.begin()) - 1;
        if (times[i] == t) return values[i];
        const double right = left_limit_at_index(i + 1);
        const double w = (t - times[i]) / (times[i + 1] - times[i]);
        return values[i] + w * (right - values[i]);
    }

    // Checks the structural invariants; throws std::logic_error on violation.
    void check() const {
        if (times.size() != values.size()) throw std::logic_error("sample_path: length mismatch");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1])) throw std::logic_error("sample_path: times not increasing");
    }

    bool non_decreasing() const {
        for (std::size_t i = 1; i < values.size(); ++i) {
            if (left_limit_at_index(i) < values[i - 1]) return false;
            if (values[i] < left_limit_at_index(i)) return false;
        }
        return true;
    }

    bool non_negative() const {
        return std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
    }
};

// Path on a uniform grid with the given values.
inline sample_path make_grid_path(const grid_spec& grid, std::vector<double> values) {
    sample_path p;
    p.times.resize(grid.steps + 1);
    for (std::size_t i = 0; i <= grid.steps; ++i) p.times[i] = grid.time(i);
    p.values = std::move(values);
    return p;
}

}  // namespace bridgelab
