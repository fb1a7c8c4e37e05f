#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "path.hpp"
#include "process.hpp"
#include "random.hpp"
#include "specfun.hpp"

namespace bridgelab::pathsim {

// ---------------------------------------------------------------------------
// Continuous families on a grid
// ---------------------------------------------------------------------------

// Brownian motion with E X_t^2 = t (characteristic exponent u^2/2).
inline sample_path sim_brownian(const grid_spec& grid, double x0, const seed_stream& seed) {
    grid.validate();
    auto eng = make_engine(seed);
    const double sd = std::sqrt(grid.dt());
    std::vector<double> values(grid.steps + 1);
    values[0] = x0;
    for (std::size_t i = 1; i <= grid.steps; ++i) values[i] = values[i - 1] + sd * variates::normal(eng);
    return make_grid_path(grid, std::move(values));
}

inline bool is_integer_dimension(double delta) { return delta >= 1.0 && delta == std::floor(delta) && delta <= 64.0; }

// Bessel process of dimension delta observed at the given increasing times,
// starting from x0 at times[0]. Integer dimensions use the norm of a
// delta-dimensional Brownian motion; other dimensions use exact squared
// Bessel transitions. Both are exact at the observation times.
inline std::vector<double> sim_bessel_at(double delta, std::span<const double> times, double x0,
                                         const seed_stream& seed) {
    if (!(delta > 0.0)) throw domain_error("sim_bessel: requires delta > 0");
    if (!(x0 >= 0.0)) throw domain_error("sim_bessel: requires x0 >= 0");
    auto eng = make_engine(seed);
    std::vector<double> values(times.size());
    if (values.empty()) return values;
    values[0] = x0;
    if (is_integer_dimension(delta)) {
        std::vector<double> coords(static_cast<std::size_t>(delta), 0.0);
        coords[0] = x0;
        for (std::size_t i = 1; i < times.size(); ++i) {
            const double sd = std::sqrt(times[i] - times[i - 1]);
            double sq = 0.0;
            for (auto& c : coords) {
                c += sd * variates::normal(eng);
                sq += c * c;
            }
            values[i] = std::sqrt(sq);
        }
    } else {
        double z = x0 * x0;
        for (std::size_t i = 1; i < times.size(); ++i) {
            z = variates::squared_bessel_step(delta, z, times[i] - times[i - 1], eng);
            values[i] = std::sqrt(z);
        }
    }
    return values;
}

inline sample_path sim_bessel(double delta, const grid_spec& grid, double x0, const seed_stream& seed) {
    grid.validate();
    sample_path p = make_grid_path(grid, {});
    p.values = sim_bessel_at(delta, p.times, x0, seed);
    return p;
}

// Symmetric alpha-stable Levy process, E exp(iu X_t) = exp(-t |u|^alpha),
// recorded at the grid (marginal increments only; no jump records).
inline sample_path sim_stable(double alpha, const grid_spec& grid, double x0, const seed_stream& seed) {
    grid.validate();
    if (!(alpha > 0.0 && alpha <= 2.0)) throw domain_error("sim_stable: requires alpha in (0, 2]");
    auto eng = make_engine(seed);
    const double scale = std::pow(grid.dt(), 1.0 / alpha);
    std::vector<double> values(grid.steps + 1);
    values[0] = x0;
    for (std::size_t i = 1; i <= grid.steps; ++i)
        values[i] = values[i - 1] + scale * variates::symmetric_stable(alpha, eng);
    return make_grid_path(grid, std::move(values));
}

// ---------------------------------------------------------------------------
// Stable subordinator: Levy density alpha / (Gamma(1-alpha) x^(1+alpha)),
// Laplace exponent q^alpha.
// ---------------------------------------------------------------------------

struct truncated_subordinator {
    double jump_rate;  // intensity of jumps larger than the cutoff
    double drift;      // mean contribution per unit time of jumps below the cutoff

    static truncated_subordinator at(double alpha, double cutoff) {
        const double g = std::tgamma(1.0 - alpha);
        return {std::pow(cutoff, -alpha) / g, alpha * std::pow(cutoff, 1.0 - alpha) / ((1.0 - alpha) * g)};
    }
};

// Jumps above `jump_cutoff` are simulated exactly as a Poisson point process;
// jumps below it are replaced by their mean drift. The drift is compared to the
// unit scale of X_1 (E X_1 itself is infinite) and cutoffs whose drift exceeds
// 10% of it are refused.
inline sample_path sim_stable_subordinator(double alpha, double horizon, double jump_cutoff,
                                           const seed_stream& seed) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("sim_stable_subordinator: requires alpha in (0, 1)");
    if (!(horizon > 0.0)) throw domain_error("sim_stable_subordinator: requires horizon > 0");
    if (!(jump_cutoff > 0.0)) throw domain_error("sim_stable_subordinator: requires jump_cutoff > 0");
    const auto law = truncated_subordinator::at(alpha, jump_cutoff);
    if (law.drift > 0.1)
        throw cutoff_too_large("sim_stable_subordinator: small-jump drift " + std::to_string(law.drift) +
                               " exceeds 10% of the unit scale");
    auto eng = make_engine(seed);
    sample_path p;
    p.times.push_back(0.0);
    p.values.push_back(0.0);
    double t = 0.0;
    double x = 0.0;
    for (;;) {
        const double gap = variates::exponential(eng) / law.jump_rate;
        if (t + gap >= horizon) break;
        t += gap;
        x += law.drift * gap;
        const double pre = x;
        x += jump_cutoff * std::pow(variates::open_uniform(eng), -1.0 / alpha);
        p.times.push_back(t);
        p.values.push_back(x);
        p.jumps.push_back({t, pre, x});
    }
    p.times.push_back(horizon);
    p.values.push_back(x + law.drift * (horizon - t));
    return p;
}

struct first_passage_options {
    // Jumps below relative_cutoff * min(level - x, origin_factor * x) are
    // replaced by their drift.
    double relative_cutoff = 1e-5;
    double origin_factor = 100.0;
    // The path on [0, t0] is a single exact stable increment, t0 = start_time * level^alpha.
    double start_time = 1e-7;
    double max_time = 1e12;
};

// Subordinator from 0 run until it first jumps over `level`.
// The jump cutoff follows two scales: the distance r still to go and the
// current value x. Each is refreshed when r halves or x doubles, so the
// approximation error is the same at every scale near both ends. The first
// stretch [0, t0] is one exact positive-stable increment (drawn as a jump from
// 0). The path ends at the passage jump.
inline sample_path sim_subordinator_first_passage(double alpha, double level, const seed_stream& seed,
                                                  const first_passage_options& opt = {}) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("sim_subordinator_first_passage: requires alpha in (0, 1)");
    if (!(level > 0.0)) throw domain_error("sim_subordinator_first_passage: requires level > 0");
    if (!(opt.relative_cutoff > 0.0 && opt.relative_cutoff < 0.5))
        throw domain_error("sim_subordinator_first_passage: requires relative_cutoff in (0, 0.5)");
    if (!(opt.origin_factor > 0.0) || !(opt.start_time > 0.0))
        throw domain_error("sim_subordinator_first_passage: origin_factor and start_time must be > 0");
    auto eng = make_engine(seed);
    sample_path p;
    p.times.push_back(0.0);
    p.values.push_back(0.0);

    double t = opt.start_time * std::pow(level, alpha);
    double x = std::pow(t, 1.0 / alpha) * variates::positive_stable(alpha, eng);
    p.times.push_back(t);
    p.values.push_back(x);
    p.jumps.push_back({t, 0.0, x});
    if (x >= level) return p;

    double scale_r = 0.0;  // distance to go at the last refresh
    double scale_x = 0.0;  // value at the last refresh
    truncated_subordinator law{};
    double cutoff = 0.0;
    bool refresh = true;
    for (std::size_t iter = 0; iter < 100'000'000; ++iter) {
        const double remaining = level - x;
        if (remaining <= 1e-14 * level) {
            // Numerically at the level without a passage jump: treat as creeping.
            p.times.push_back(t);
            p.values.push_back(level);
            return p;
        }
        if (refresh || remaining <= 0.5 * scale_r || x >= 2.0 * scale_x) {
            refresh = false;
            scale_r = remaining;
            scale_x = x;
            cutoff = opt.relative_cutoff * std::min(scale_r, opt.origin_factor * scale_x);
            law = truncated_subordinator::at(alpha, cutoff);
            if (t > p.times.back()) {
                p.times.push_back(t);
                p.values.push_back(x);
            }
        }
        const double target = std::min(level - 0.5 * scale_r, 2.0 * scale_x);
        const double to_refresh = (target - x) / law.drift;
        const double gap = variates::exponential(eng) / law.jump_rate;
        if (gap >= to_refresh) {
            t += to_refresh;
            x = target;
            refresh = true;
            continue;
        }
        t += gap;
        if (t > opt.max_time) throw horizon_too_short("sim_subordinator_first_passage: level not reached by max_time");
        x += law.drift * gap;
        const double pre = x;
        x += cutoff * std::pow(variates::open_uniform(eng), -1.0 / alpha);
        p.times.push_back(t);
        p.values.push_back(x);
        p.jumps.push_back({t, pre, x});
        if (x >= level) return p;
    }
    throw horizon_too_short("sim_subordinator_first_passage: iteration budget exhausted");
}

// Dispatch on the family; subordinators are simulated with an absolute
// cutoff over the grid horizon.
inline sample_path simulate(const process_spec& family, const grid_spec& grid, double x0,
                            const seed_stream& seed, double jump_cutoff = 1e-6) {
    family.validate();
    switch (family.family) {
        case process_family::brownian: return sim_brownian(grid, x0, seed);
        case process_family::bessel: return sim_bessel(family.parameter, grid, x0, seed);
        case process_family::stable: return sim_stable(family.parameter, grid, x0, seed);
        case process_family::stable_subordinator: {
            auto p = sim_stable_subordinator(family.parameter, grid.horizon, jump_cutoff, seed);
            for (auto& v : p.values) v += x0;
            for (auto& j : p.jumps) {
                j.pre += x0;
                j.post += x0;
            }
            return p;
        }
    }
    throw domain_error("simulate: unknown family");
}

// ---------------------------------------------------------------------------
// Random times
// ---------------------------------------------------------------------------

namespace detail {

// Last time in [0, min(1, end)] at which the continuous parts of the path meet
// c t^(1/gamma). `left` supplies the left limit at each index; a sign change
// across a jump is not a touch.
template <class LeftLimit>
double last_passage_scan(std::span<const double> times, std::span<const double> values, LeftLimit left,
                         double c, double gamma, double until = 1.0) {
    const double inv_gamma = 1.0 / gamma;
    auto curve = [&](double t) {
        if (c == 0.0) return 0.0;
        return c * (gamma == 2.0 ? std::sqrt(t) : std::pow(t, inv_gamma));
    };
    std::size_t n = times.size();
    while (n > 1 && times[n - 1] > until) --n;
    if (n == 0) return 0.0;
    // Segment straddling `until`, truncated there.
    double end_t = times[n - 1];
    double end_v = (n - 1 == 0) ? values[0] : left(n - 1);
    if (end_t < until && n < times.size()) {
        const double w = (until - times[n - 1]) / (times[n] - times[n - 1]);
        end_v = values[n - 1] + w * (left(n) - values[n - 1]);
        end_t = until;
        const double d = end_v - curve(end_t);
        if (d == 0.0) return end_t;
        const double a = values[n - 1] - curve(times[n - 1]);
        if (a * d < 0.0) return times[n - 1] + (end_t - times[n - 1]) * a / (a - d);
    } else if (end_v - curve(end_t) == 0.0) {
        return end_t;
    }
    double curve_right = curve(times[n - 1]);
    for (std::size_t i = n - 1; i-- > 0;) {
        const double curve_left = curve(times[i]);
        const double a = values[i] - curve_left;
        const double b = left(i + 1) - curve_right;
        curve_right = curve_left;
        if (b == 0.0) return times[i + 1];
        if (a * b < 0.0) return times[i] + (times[i + 1] - times[i]) * a / (a - b);
        if (a == 0.0) return times[i];
    }
    return 0.0;
}

}  // namespace detail

// g_c: the last time t <= 1 at which X_{t-} = c t^(1/gamma), located by sign
// changes between consecutive path points with a linearly interpolated
// crossing time; 0 when there is none.
inline double last_passage_curve(const sample_path& path, double c, double gamma) {
    if (!(gamma > 0.0)) throw domain_error("last_passage_curve: requires gamma > 0");
    if (path.times.empty()) throw domain_error("last_passage_curve: empty path");
    if (path.jumps.empty()) {
        return detail::last_passage_scan(path.times, path.values, [&](std::size_t i) { return path.values[i]; },
                                         c, gamma);
    }
    return detail::last_passage_scan(path.times, path.values,
                                     [&](std::size_t i) { return path.left_limit_at_index(i); }, c, gamma);
}

struct passage_below {
    double L;  // sup{t : X_t < b}
    double g;  // X_{L-}
};

// For a non-decreasing path: the time and pre-jump value of the jump that
// carries the path from below b to b or above.
inline passage_below last_passage_below(const sample_path& path, double b) {
    if (!(b > 0.0)) throw domain_error("last_passage_below: requires b > 0");
    if (path.times.empty() || !(path.end_value() >= b))
        throw horizon_too_short("last_passage_below: path never reaches b = " + std::to_string(b));
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double pre = path.left_limit_at_index(i);
        if (pre >= b) {
            // Continuous passage (creeping) inside the segment ending at i.
            const double w = (b - path.values[i - 1]) / (pre - path.values[i - 1]);
            return {path.times[i - 1] + w * (path.times[i] - path.times[i - 1]), b};
        }
        if (path.values[i] >= b) return {path.times[i], pre};
    }
    throw horizon_too_short("last_passage_below: path never reaches b");
}

// ---------------------------------------------------------------------------
// Brownian last passage with local refinement near the origin
// ---------------------------------------------------------------------------

namespace detail {

// Last zero of a Brownian bridge from a to b over a span h, as a distance back
// from the right end, or -1 if there is none. Reversed and time-changed by
// u = h s / (h - s), the bridge becomes Brownian motion with drift |a| / h
// started at distance |b| from the level; given that it gets there the
// passage time is inverse Gaussian.
inline double bridge_last_zero(double a, double b, double h, engine& eng) {
    if (b == 0.0) return 0.0;
    if (a * b > 0.0) {
        // uniforms come in steps of 2^-64, so below e^-45 none falls under the touch probability
        const double x = 2.0 * a * b / h;
        if (x > 45.0) return -1.0;
        if (variates::open_uniform(eng) >= std::exp(-x)) return -1.0;
    }
    const double m = std::abs(b), d = std::abs(a) / h;
    double u;
    if (d > 0.0) {
        u = variates::inverse_gaussian(m / d, m * m, eng);
    } else {
        const double z = variates::normal(eng);
        u = m * m / (z * z);
    }
    return h * u / (h + u);
}

// Last meeting of the interpolating bridge with c sqrt(t), taken as straight
// between recorded points.
struct hidden_crossing {
    double c;
    engine& eng;

    double curve(double t) const { return c == 0.0 ? 0.0 : c * std::sqrt(t); }

    double last_touch(double t0, double v0, double t1, double v1) {
        const double r = bridge_last_zero(v0 - curve(t0), v1 - curve(t1), t1 - t0, eng);
        return r < 0.0 ? -1.0 : t1 - r;
    }
};

}  // namespace detail

// g_c for a Brownian path recorded at `times`, with touches between recorded
// points drawn from the bridge between them. Intervals are visited from the
// right; the first one that touches holds the last passage.
inline double bridge_corrected_passage(std::span<const double> times, std::span<const double> values, double c,
                                       double until, engine& eng) {
    std::size_t n = times.size();
    while (n > 1 && times[n - 1] > until) --n;
    if (times.empty()) return 0.0;
    detail::hidden_crossing hc{c, eng};
    // the piece straddling `until`, cut at a bridge sample
    if (n < times.size() && times[n - 1] < until) {
        const double t0 = times[n - 1], t1 = times[n];
        const double w = (until - t0) / (t1 - t0);
        const double vu = values[n - 1] + w * (values[n] - values[n - 1]) +
                          std::sqrt((until - t0) * (t1 - until) / (t1 - t0)) * variates::normal(eng);
        const double r = hc.last_touch(t0, values[n - 1], until, vu);
        if (r >= 0.0) return r;
    }
    double b = values[n - 1] - hc.curve(times[n - 1]);
    for (std::size_t i = n - 1; i-- > 0;) {
        const double a = values[i] - hc.curve(times[i]);
        const double r = detail::bridge_last_zero(a, b, times[i + 1] - times[i], eng);
        if (r >= 0.0) return times[i + 1] - r;
        b = a;
    }
    return 0.0;
}

struct refined_passage {
    sample_path path;
    double g = 0.0;
    int refinements = 0;
};

// Brownian path from 0 on [0, grid.horizon] together with g_c for the curve
// c sqrt(t). While fewer than `min_points` steps of the finest spacing lie in
// [0, g_c], the first `min_points` intervals are split at Brownian-bridge
// midpoints, which is exact in law. Small g_c is thus resolved as well as
// typical g_c. The returned g_c also accounts for touches between points.
inline refined_passage brownian_last_passage(const grid_spec& grid, double c, const seed_stream& seed,
                                             std::size_t min_points = 256, int max_refinements = 512) {
    grid.validate();
    if (grid.steps % 2 != 0) throw domain_error("brownian_last_passage: steps must be even");
    auto eng = make_engine(seed);
    const std::size_t n = grid.steps;
    std::vector<double> times(n + 1), values(n + 1);
    const double sd = std::sqrt(grid.dt());
    for (std::size_t i = 0; i <= n; ++i) times[i] = grid.time(i);
    values[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) values[i] = values[i - 1] + sd * variates::normal(eng);

    const double until = std::min(1.0, grid.horizon);
    const std::size_t resolved = std::min(min_points, n / 4);
    auto scan = [&](const std::vector<double>& t, const std::vector<double>& v, double to) {
        return detail::last_passage_scan(t, v, [&](std::size_t i) { return v[i]; }, c, 2.0, to);
    };
    double g = scan(times, values, until);

    // tails: pieces cut off the right end, innermost last
    std::vector<std::vector<double>> tail_times, tail_values;
    refined_passage out;
    while (g < static_cast<double>(resolved) * (times[1] - times[0]) && out.refinements < max_refinements) {
        // [0, times[k]] holds g_c (if any) and is refined; the rest becomes a tail
        const std::size_t k = resolved;
        tail_times.emplace_back(times.begin() + static_cast<std::ptrdiff_t>(k) + 1, times.end());
        tail_values.emplace_back(values.begin() + static_cast<std::ptrdiff_t>(k) + 1, values.end());
        std::vector<double> fine_t(2 * k + 1), fine_v(2 * k + 1);
        for (std::size_t j = 0; j < k; ++j) {
            const double h = times[j + 1] - times[j];
            fine_t[2 * j] = times[j];
            fine_v[2 * j] = values[j];
            fine_t[2 * j + 1] = times[j] + 0.5 * h;
            fine_v[2 * j + 1] = 0.5 * (values[j] + values[j + 1]) + 0.5 * std::sqrt(h) * variates::normal(eng);
        }
        fine_t[2 * k] = times[k];
        fine_v[2 * k] = values[k];
        times.swap(fine_t);
        values.swap(fine_v);
        g = scan(times, values, std::min(times.back(), until));
        ++out.refinements;
    }

    out.path.times = std::move(times);
    out.path.values = std::move(values);
    for (std::size_t k = tail_times.size(); k-- > 0;) {
        out.path.times.insert(out.path.times.end(), tail_times[k].begin(), tail_times[k].end());
        out.path.values.insert(out.path.values.end(), tail_values[k].begin(), tail_values[k].end());
    }
    out.g = bridge_corrected_passage(out.path.times, out.path.values, c, until, eng);
    return out;
}

}  // namespace bridgelab::pathsim
