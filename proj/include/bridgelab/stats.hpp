#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "errors.hpp"
#include "fit.hpp"
#include "parallel.hpp"
#include "path.hpp"
#include "pathsim.hpp"
#include "random.hpp"
#include "specfun.hpp"

namespace bridgelab::stats {

struct stat_report {
    std::string test_name;
    double statistic = 0.0;
    std::vector<std::size_t> sample_sizes;
    double threshold = 0.0;
    bool passed = false;
    std::string reference;
};

struct moment_report {
    double q = 0.0;
    double empirical = 0.0;
    double std_error = 0.0;
    double predicted = 0.0;
    double allowance = 0.0;  // discretization allowance added to the tolerance

    double tolerance() const { return 3.0 * std_error + allowance; }
    bool passed() const { return std::abs(empirical - predicted) <= tolerance(); }
};

struct mean_se {
    double mean = 0.0;
    double std_error = 0.0;
};

inline mean_se mean_and_se(const std::vector<double>& xs) {
    if (xs.empty()) throw empty_sample_error("mean_and_se: empty sample");
    const auto n = static_cast<double>(xs.size());
    double m = 0.0;
    for (double x : xs) m += x;
    m /= n;
    if (xs.size() < 2) return {m, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / (n - 1.0) / n)};
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov
// ---------------------------------------------------------------------------

inline constexpr double ks_critical = 1.95;  // asymptotic 0.001 level

inline stat_report ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf,
                                 std::string name = "ks_one_sample", std::string reference = "") {
    if (sample.empty()) throw empty_sample_error("ks_one_sample: empty sample");
    std::sort(sample.begin(), sample.end());
    const auto n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    stat_report r{std::move(name), d, {sample.size()}, ks_critical / std::sqrt(n), false, std::move(reference)};
    r.passed = r.statistic <= r.threshold;
    return r;
}

inline stat_report ks_two_sample(std::vector<double> a, std::vector<double> b, std::string name = "ks_two_sample",
                                 std::string reference = "") {
    if (a.empty() || b.empty()) throw empty_sample_error("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    stat_report r{std::move(name), d, {a.size(), b.size()}, ks_critical * std::sqrt(1.0 / na + 1.0 / nb), false,
                  std::move(reference)};
    r.passed = r.statistic <= r.threshold;
    return r;
}

// ---------------------------------------------------------------------------
// Binned chi-square goodness of fit
// ---------------------------------------------------------------------------

// Pearson statistic for counts against cell probabilities (which may sum to
// less than one when the tail is left out; the remainder forms an extra cell).
// Threshold: the 0.999 quantile of chi-square with cells - 1 degrees of freedom.
inline stat_report chi_square_gof(const std::vector<std::size_t>& counts, std::vector<double> probs,
                                  std::size_t total, std::string name = "chi_square", std::string reference = "") {
    if (counts.size() != probs.size()) throw domain_error("chi_square_gof: length mismatch");
    if (total == 0) throw empty_sample_error("chi_square_gof: empty sample");
    std::size_t in_cells = 0;
    double p_cells = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        in_cells += counts[i];
        p_cells += probs[i];
    }
    auto all_counts = counts;
    if (in_cells < total || p_cells < 1.0 - 1e-9) {
        all_counts.push_back(total - in_cells);
        probs.push_back(std::max(0.0, 1.0 - p_cells));
    }
    const auto n = static_cast<double>(total);
    double stat = 0.0;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < all_counts.size(); ++i) {
        const double e = n * probs[i];
        if (e <= 0.0) {
            if (all_counts[i] > 0) stat = std::numeric_limits<double>::infinity();
            continue;
        }
        const double d = static_cast<double>(all_counts[i]) - e;
        stat += d * d / e;
        ++cells;
    }
    if (cells < 2) throw domain_error("chi_square_gof: needs at least two cells with positive probability");
    boost::math::chi_squared dist(static_cast<double>(cells - 1));
    stat_report r{std::move(name), stat, {total}, boost::math::quantile(dist, 0.999), false, std::move(reference)};
    r.passed = r.statistic <= r.threshold;
    return r;
}

// ---------------------------------------------------------------------------
// Moments of 1 - g_c for Brownian motion
// ---------------------------------------------------------------------------

// Gamma(2q) / (2q H_2q(c) H_2q(-c)), assembled in logs.
inline double gc_moment_prediction(double c, double q) {
    if (!(q > 0.0)) throw domain_error("gc_moment_prediction: requires q > 0");
    // the sum of the two Hermite terms is commutative, so the value is exactly even in c
    const double h = specfun::log_hermite_H(2.0 * q, c) + specfun::log_hermite_H(2.0 * q, -c);
    const double l = std::lgamma(2.0 * q) - std::log(2.0 * q) - h;
    return std::exp(l);
}

inline double gc_moment_asymptotic(double c, double q) {
    return std::exp(-c * c / 2.0) / std::sqrt(std::numbers::pi * q);
}

// g_c per path at grid.steps (coarse) and at 2 * grid.steps (fine), both from
// the same refined Brownian path: the coarse value uses every other point.
// Touches between points are resolved in law for both; `plain` is the coarse
// value read off sign changes alone.
struct gc_sample {
    std::vector<double> coarse;
    std::vector<double> fine;
    std::vector<double> plain;
};

inline sample_path every_other_point(const sample_path& p) {
    sample_path out;
    out.times.reserve(p.size() / 2 + 2);
    out.values.reserve(p.size() / 2 + 2);
    for (std::size_t i = 0; i < p.size(); i += 2) {
        out.times.push_back(p.times[i]);
        out.values.push_back(p.values[i]);
    }
    if (out.times.back() != p.end_time()) {
        out.times.push_back(p.end_time());
        out.values.push_back(p.end_value());
    }
    return out;
}

inline double coarse_last_passage(const sample_path& fine_path, double c, double until = 1.0) {
    const auto p = every_other_point(fine_path);
    return pathsim::detail::last_passage_scan(p.times, p.values, [&](std::size_t i) { return p.values[i]; }, c, 2.0,
                                              until);
}

inline gc_sample sample_brownian_gc(double c, std::size_t n, const grid_spec& grid, const seed_stream& seed,
                                    unsigned threads = 1) {
    grid.validate();
    if (n == 0) throw empty_sample_error("sample_brownian_gc: n must be positive");
    const grid_spec fine{grid.horizon, 2 * grid.steps};
    const double until = std::min(1.0, grid.horizon);
    gc_sample out{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    parallel_for(n, threads, [&](std::size_t i) {
        const seed_stream s = seed.child(i);
        auto r = pathsim::brownian_last_passage(fine, c, s);
        out.fine[i] = r.g;
        const auto p = every_other_point(r.path);
        auto eng = make_engine(s.child(1));
        out.coarse[i] = pathsim::bridge_corrected_passage(p.times, p.values, c, until, eng);
        out.plain[i] =
            pathsim::detail::last_passage_scan(p.times, p.values, [&](std::size_t k) { return p.values[k]; }, c, 2.0,
                                               until);
    });
    return out;
}

// Which power the closed form is compared with. The formula is stated for
// (1 - g_c)^q; simulation matches g_c^q instead (they agree at c = 0).
enum class gc_functional { one_minus_g, g };

inline moment_report moment_from_sample(const gc_sample& s, double c, double q,
                                        gc_functional f = gc_functional::one_minus_g) {
    auto power = [&](double g) { return std::pow(f == gc_functional::g ? g : 1.0 - g, q); };
    std::vector<double> coarse(s.coarse.size()), fine(s.fine.size());
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        coarse[i] = power(s.coarse[i]);
        fine[i] = power(s.fine[i]);
    }
    const auto mc = mean_and_se(coarse);
    const auto mf = mean_and_se(fine);
    return {q, mc.mean, mc.std_error, gc_moment_prediction(c, q), std::abs(mf.mean - mc.mean)};
}

// Empirical E[(1 - g_c)^q] (or E[g_c^q]) over n Brownian paths against the closed form.
inline moment_report gc_moment_check(double c, double q, std::size_t n, const grid_spec& grid,
                                     const seed_stream& seed, unsigned threads = 1,
                                     gc_functional f = gc_functional::one_minus_g) {
    const auto s = sample_brownian_gc(c, n, grid, seed, threads);
    return moment_from_sample(s, c, q, f);
}

// Ratio of the closed form to its large-q asymptotic at the largest q.
inline stat_report moment_asymptotics_check(double c, const std::vector<double>& q_grid) {
    if (q_grid.empty()) throw empty_sample_error("moment_asymptotics_check: empty q grid");
    if (!std::is_sorted(q_grid.begin(), q_grid.end())) throw domain_error("moment_asymptotics_check: q grid must increase");
    const double q = q_grid.back();
    if (q < 100.0) throw domain_error("moment_asymptotics_check: largest q must be >= 100");
    const double ratio = gc_moment_prediction(c, q) / gc_moment_asymptotic(c, q);
    stat_report r{"moment_asymptotics c=" + std::to_string(c), std::abs(ratio - 1.0), {}, 0.1, false,
                  "large-q asymptotic exp(-c^2/2)/sqrt(pi q) of the Hermite moment formula"};
    r.passed = r.statistic <= r.threshold;
    return r;
}

}  // namespace bridgelab::stats
