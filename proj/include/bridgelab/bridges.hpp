#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "path.hpp"
#include "pathsim.hpp"
#include "process.hpp"
#include "random.hpp"

namespace bridgelab::bridges {

// Target bridge law: from x to y over [0, t].
struct bridge_spec {
    double x = 0.0;
    double y = 0.0;
    double t = 1.0;

    void validate() const {
        if (!(t > 0.0)) throw domain_error("bridge_spec: requires t > 0");
        if (!std::isfinite(x) || !std::isfinite(y)) throw domain_error("bridge_spec: endpoints must be finite");
    }
};

// Path on [0, death_time); the last recorded point is the left limit at death.
struct killed_path {
    sample_path path;
    double death_time = 0.0;
};

inline void require_horizon(const grid_spec& grid, double t, const char* who) {
    grid.validate();
    if (std::abs(grid.horizon - t) > 1e-12 * std::max(1.0, t))
        throw domain_error(std::string(who) + ": grid horizon must equal the bridge length");
}

// ---------------------------------------------------------------------------
// Exact Brownian bridge
// ---------------------------------------------------------------------------

// x + B_s - (s/t) B_t + (y - x) s/t for a Brownian path B started at 0.
inline sample_path brownian_bridge_from(const bridge_spec& spec, const sample_path& b) {
    spec.validate();
    sample_path out;
    out.times = b.times;
    out.values.resize(b.size());
    const double bt = b.end_value();
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double r = b.times[i] / spec.t;
        out.values[i] = spec.x + (b.values[i] - b.values[0]) - r * (bt - b.values[0]) + (spec.y - spec.x) * r;
    }
    out.values.front() = spec.x;
    out.values.back() = spec.y;
    return out;
}

inline sample_path brownian_bridge_exact(const bridge_spec& spec, const grid_spec& grid, const seed_stream& seed) {
    require_horizon(grid, spec.t, "brownian_bridge_exact");
    return brownian_bridge_from(spec, pathsim::sim_brownian(grid, 0.0, seed));
}

// ---------------------------------------------------------------------------
// Bridges from last passage times of self-similar processes
// ---------------------------------------------------------------------------

// A path of X from 0 on [0, 1] with g_c > 0, and the number of draws that
// were discarded because g_c = 0.
struct passage_draw {
    sample_path path;
    double g = 0.0;
    std::size_t rejections = 0;
};

inline constexpr std::size_t max_consecutive_rejections = 100;

inline void check_positive_passage(const process_spec& family, double c) {
    family.validate();
    if (family.family == process_family::stable_subordinator)
        throw hypothesis_violation("pathwise bridge: a stable subordinator never meets the curve continuously");
    if (family.family == process_family::stable && family.parameter < 1.0 && c == 0.0)
        throw hypothesis_violation("pathwise bridge: g_0 = 0 almost surely for stable alpha < 1");
    if (family.family == process_family::stable && family.parameter == 1.0)
        throw hypothesis_violation("pathwise bridge: g_c > 0 is not guaranteed for stable alpha = 1");
}

// `refine`: for Brownian motion, resolve small g_c by bridge refinement near
// the origin (exact in law) instead of reading it off the plain grid.
inline passage_draw draw_last_passage(const process_spec& family, double c, std::size_t steps,
                                      const seed_stream& seed, bool refine = true) {
    check_positive_passage(family, c);
    const grid_spec grid{1.0, steps};
    const double gamma = family.index();
    passage_draw out;
    for (std::size_t k = 0;; ++k) {
        const seed_stream s = k == 0 ? seed : seed.child(k);
        if (family.family == process_family::brownian && refine) {
            auto r = pathsim::brownian_last_passage(grid, c, s);
            out.path = std::move(r.path);
            out.g = r.g;
        } else {
            out.path = pathsim::simulate(family, grid, 0.0, s);
            out.g = pathsim::last_passage_curve(out.path, c, gamma);
        }
        if (out.g > 0.0) return out;
        ++out.rejections;
        if (out.rejections >= max_consecutive_rejections)
            throw hypothesis_violation("pathwise bridge: g_c = 0 on " + std::to_string(out.rejections) +
                                       " consecutive paths");
    }
}

// Y_s = g^(-1/gamma) X_{s g} at the given s in [0, 1], with Y_1 = c.
inline double rescaled_value(const passage_draw& d, double gamma, double c, double s) {
    if (s >= 1.0) return c;
    return std::pow(d.g, -1.0 / gamma) * d.path.value_at(s * d.g);
}

// The process X on [0, 1] rescaled through its last passage time g_c at the
// curve c t^(1/gamma); a bridge from 0 to c of length 1.
inline sample_path pathwise_selfsim_bridge(const process_spec& family, double c, const grid_spec& grid,
                                           const seed_stream& seed, std::size_t* rejections = nullptr,
                                           bool refine = true) {
    require_horizon(grid, 1.0, "pathwise_selfsim_bridge");
    const auto d = draw_last_passage(family, c, grid.steps, seed, refine);
    if (rejections) *rejections += d.rejections;
    const double gamma = family.index();
    sample_path out = make_grid_path(grid, std::vector<double>(grid.steps + 1));
    for (std::size_t i = 0; i <= grid.steps; ++i) out.values[i] = rescaled_value(d, gamma, c, out.times[i]);
    out.values.front() = 0.0;
    out.values.back() = c;
    return out;
}

// Bridge from 0 to x of length t = grid.horizon: s -> t^(1/gamma) Y_{s/t}
// where Y is the length-one bridge to c = x t^(-1/gamma).
inline sample_path rescaled_bridge(const process_spec& family, double x, const grid_spec& grid,
                                   const seed_stream& seed, std::size_t* rejections = nullptr, bool refine = true) {
    grid.validate();
    const double t = grid.horizon;
    const double gamma = family.index();
    const double c = x * std::pow(t, -1.0 / gamma);
    const auto d = draw_last_passage(family, c, grid.steps, seed, refine);
    if (rejections) *rejections += d.rejections;
    const double scale = std::pow(t, 1.0 / gamma);
    sample_path out = make_grid_path(grid, std::vector<double>(grid.steps + 1));
    for (std::size_t i = 0; i <= grid.steps; ++i) out.values[i] = scale * rescaled_value(d, gamma, c, out.times[i] / t);
    out.values.front() = 0.0;
    out.values.back() = x;
    return out;
}

// Marginals of many pathwise bridges at fixed times, without keeping paths.
struct bridge_marginals {
    std::vector<std::vector<double>> values;  // values[k][i]: path i at s_points[k]
    std::vector<double> passage_times;        // g_c of the accepted path i
    std::size_t rejections = 0;
    std::size_t accepted = 0;

    double rejection_rate() const {
        const auto total = static_cast<double>(rejections + accepted);
        return total > 0.0 ? static_cast<double>(rejections) / total : 0.0;
    }
};

inline constexpr double max_rejection_rate = 0.01;

// Bridge of length t = horizon from 0 to x (x = c when t = 1), evaluated at
// s_points in [0, t]. Path i uses seed.child(i).
inline bridge_marginals pathwise_bridge_marginals(const process_spec& family, double x, double horizon,
                                                  std::size_t steps, const std::vector<double>& s_points,
                                                  std::size_t n, const seed_stream& seed, unsigned threads = 1,
                                                  bool refine = true) {
    if (!(horizon > 0.0)) throw domain_error("pathwise_bridge_marginals: requires horizon > 0");
    const double gamma = family.index();
    const double c = x * std::pow(horizon, -1.0 / gamma);
    const double scale = std::pow(horizon, 1.0 / gamma);
    bridge_marginals out;
    out.values.assign(s_points.size(), std::vector<double>(n));
    out.passage_times.resize(n);
    std::vector<std::size_t> rejected(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const auto d = draw_last_passage(family, c, steps, seed.child(i), refine);
        rejected[i] = d.rejections;
        out.passage_times[i] = d.g;
        for (std::size_t k = 0; k < s_points.size(); ++k)
            out.values[k][i] = s_points[k] >= horizon ? x : scale * rescaled_value(d, gamma, c, s_points[k] / horizon);
    });
    for (auto r : rejected) out.rejections += r;
    out.accepted = n;
    if (out.rejection_rate() > max_rejection_rate)
        throw hypothesis_violation("pathwise bridge: g_c = 0 on " + std::to_string(out.rejections) + " of " +
                                   std::to_string(out.rejections + n) + " paths");
    return out;
}

// ---------------------------------------------------------------------------
// Bessel bridge from 0 to y by time inversion
// ---------------------------------------------------------------------------

// u X_{1/u - 1/t} for a Bessel(delta) process X started at y/t, on the grid
// u_k = k t / n. The inverted clock is sampled exactly at the required times,
// so the u-grid is uniform and no interpolation enters.
inline sample_path bessel_bridge_timeinversion(double delta, double y, double t, const grid_spec& grid,
                                               const seed_stream& seed) {
    if (!(delta > 0.0)) throw domain_error("bessel_bridge_timeinversion: requires delta > 0");
    if (!(y > 0.0)) throw domain_error("bessel_bridge_timeinversion: requires y > 0");
    require_horizon(grid, t, "bessel_bridge_timeinversion");
    const std::size_t n = grid.steps;
    sample_path out = make_grid_path(grid, std::vector<double>(n + 1));
    // clock[j] = 1/u_{n-j} - 1/t, increasing in j, clock[0] = 0.
    std::vector<double> clock(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double u = out.times[n - j];
        clock[j] = j == 0 ? 0.0 : 1.0 / u - 1.0 / t;
    }
    const auto x = pathsim::sim_bessel_at(delta, clock, y / t, seed);
    for (std::size_t j = 1; j < n; ++j) out.values[n - j] = out.times[n - j] * x[j];
    out.values[0] = 0.0;
    out.values[n] = y;
    return out;
}

// ---------------------------------------------------------------------------
// Stable subordinator conditioned to die at b
// ---------------------------------------------------------------------------

// From a subordinator path with passage data (L, g) at b: Y_t = (b/g) X_{t (g/b)^a}
// for t < zeta = L (b/g)^a, ending at the left limit Y_{zeta-} = b.
inline killed_path condition_on_passage(double alpha, double b, const sample_path& x) {
    const auto [L, g] = pathsim::last_passage_below(x, b);
    const double ratio = b / g;
    const double time_scale = std::pow(ratio, alpha);
    killed_path out;
    out.death_time = L * time_scale;
    for (std::size_t i = 0; i < x.size() && x.times[i] < L; ++i) {
        out.path.times.push_back(x.times[i] * time_scale);
        out.path.values.push_back(x.values[i] * ratio);
    }
    for (const auto& j : x.jumps) {
        if (j.time >= L) break;
        out.path.jumps.push_back({j.time * time_scale, j.pre * ratio, j.post * ratio});
    }
    if (out.path.times.empty() || out.path.times.back() < out.death_time) {
        out.path.times.push_back(out.death_time);
        out.path.values.push_back(b);
    } else {
        out.path.values.back() = b;
    }
    return out;
}

// Small jumps are handled as in sim_subordinator_first_passage.
inline killed_path conditioned_subordinator(double alpha, double b, const seed_stream& seed,
                                            const pathsim::first_passage_options& opt = {}) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("conditioned_subordinator: requires alpha in (0, 1)");
    if (!(b > 0.0)) throw domain_error("conditioned_subordinator: requires b > 0");
    const auto x = pathsim::sim_subordinator_first_passage(alpha, b, seed, opt);
    return condition_on_passage(alpha, b, x);
}

// ---------------------------------------------------------------------------
// Conditioning on a thin window around the endpoint
// ---------------------------------------------------------------------------

template <class T>
struct window_result {
    std::vector<T> accepted;
    std::size_t trials = 0;

    double acceptance_rate() const {
        return trials ? static_cast<double>(accepted.size()) / static_cast<double>(trials) : 0.0;
    }
};

// Rejection sampling of P_x(. | |X_t - y| < delta). Trial i uses seed.child(i);
// trials are run in blocks and accepted in trial order, so the output does not
// depend on the thread count. `extract` maps an accepted path to what is kept.
template <std::invocable<const sample_path&> Extract>
auto window_conditioned_sampler(const process_spec& family, const bridge_spec& spec, double delta,
                                std::size_t n_accept, const grid_spec& grid, const seed_stream& seed,
                                Extract extract, std::size_t max_trials = 100'000'000, unsigned threads = 1) {
    using T = std::decay_t<decltype(extract(std::declval<const sample_path&>()))>;
    spec.validate();
    family.validate();
    require_horizon(grid, spec.t, "window_conditioned_sampler");
    if (!(delta > 0.0)) throw domain_error("window_conditioned_sampler: requires delta > 0");
    if (n_accept == 0) throw domain_error("window_conditioned_sampler: n_accept must be positive");
    window_result<T> out;
    out.accepted.reserve(n_accept);
    const std::size_t block = 1 << 14;
    std::vector<char> hit(block);
    std::vector<T> kept(block);
    while (out.accepted.size() < n_accept) {
        if (out.trials >= max_trials)
            throw budget_exceeded("window_conditioned_sampler: " + std::to_string(out.accepted.size()) + " of " +
                                      std::to_string(n_accept) + " accepted after " + std::to_string(out.trials) +
                                      " trials (acceptance rate " + std::to_string(out.acceptance_rate()) + ")",
                                  out.acceptance_rate());
        const std::size_t first = out.trials;
        const std::size_t m = std::min(block, max_trials - first);
        parallel_for(m, threads, [&](std::size_t i) {
            const auto path = pathsim::simulate(family, grid, spec.x, seed.child(first + i));
            hit[i] = std::abs(path.end_value() - spec.y) < delta;
            if (hit[i]) kept[i] = extract(path);
        });
        for (std::size_t i = 0; i < m; ++i) {
            ++out.trials;
            if (hit[i]) {
                out.accepted.push_back(std::move(kept[i]));
                if (out.accepted.size() == n_accept) break;
            }
        }
    }
    return out;
}

inline window_result<sample_path> window_conditioned_sampler(const process_spec& family, const bridge_spec& spec,
                                                             double delta, std::size_t n_accept,
                                                             const grid_spec& grid, const seed_stream& seed,
                                                             std::size_t max_trials = 100'000'000) {
    return window_conditioned_sampler(family, spec, delta, n_accept, grid, seed,
                                      [](const sample_path& p) { return p; }, max_trials);
}

}  // namespace bridgelab::bridges
