#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "../bridges.hpp"
#include "../kernels.hpp"
#include "../parallel.hpp"
#include "../pathsim.hpp"
#include "../quadrature.hpp"
#include "../specfun.hpp"
#include "../stats.hpp"
#include "config.hpp"
#include "registry.hpp"
#include "report.hpp"

namespace bridgelab::expcli {

inline std::string num(double v) { return format_real(v); }

// State shared by one experiment run.
struct run_context {
    const experiment_info& info;
    experiment_config cfg;
    param_values params;
    std::filesystem::path dir;
    report rep;
    std::vector<std::string> csv_files;

    seed_stream stream(std::uint64_t k) const { return {cfg.seed, k}; }
    unsigned threads() const { return cfg.threads; }
    grid_spec grid() const { return {1.0, cfg.grid_steps}; }

    csv_writer csv(const std::string& file) {
        for (const auto& s : info.csv) {
            if (s.file == file) {
                csv_files.push_back(file);
                return csv_writer(dir / file, s.columns);
            }
        }
        throw std::logic_error("no CSV schema for " + file);
    }
};

// Piecewise linear CDF through tabulated points.
class tabulated_cdf {
public:
    tabulated_cdf(std::vector<double> xs, std::vector<double> fs) : xs_(std::move(xs)), fs_(std::move(fs)) {}

    double operator()(double x) const {
        if (x <= xs_.front()) return fs_.front();
        if (x >= xs_.back()) return fs_.back();
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const auto i = static_cast<std::size_t>(it - xs_.begin()) - 1;
        const double w = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
        return fs_[i] + w * (fs_[i + 1] - fs_[i]);
    }

private:
    std::vector<double> xs_, fs_;
};

// CDF of an unnormalized density on [knots.front(), knots.back()], integrated
// cell by cell and normalized by the total.
template <class Density>
tabulated_cdf cdf_from_density(Density f, std::vector<double> knots) {
    std::vector<double> cum(knots.size(), 0.0);
    const quadrature_config qc{2000, 1e-300, 1e-10};
    for (std::size_t i = 1; i < knots.size(); ++i) cum[i] = cum[i - 1] + integrate(f, knots[i - 1], knots[i], qc).value;
    const double total = cum.back();
    if (!(total > 0.0)) throw domain_error("cdf_from_density: zero mass");
    for (auto& c : cum) c /= total;
    return tabulated_cdf(std::move(knots), std::move(cum));
}

inline std::vector<double> uniform_knots(double a, double b, std::size_t cells) {
    std::vector<double> k(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) k[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
    k.back() = b;
    return k;
}

namespace experiments {

// ---------------------------------------------------------------------------
// verify-brownian-bridge
// ---------------------------------------------------------------------------

inline void validate_brownian_bridge(const param_values&, const experiment_config&, std::vector<std::string>&) {}

inline void run_brownian_bridge(run_context& ctx) {
    const auto cs = ctx.params.reals("c_values");
    const std::vector<double> s_points{0.25, 0.5, 0.75};
    const std::vector<std::string> s_tags{"0.25", "0.5", "0.75"};
    const std::size_t n = ctx.cfg.n_paths;
    const auto grid = ctx.grid();
    auto out = ctx.csv("bridge_marginals.csv");
    json rejections = json::object();
    for (std::size_t k = 0; k < cs.size(); ++k) {
        const double c = cs[k];
        const auto pw = bridges::pathwise_bridge_marginals(process_spec::brownian(), c, 1.0, grid.steps, s_points, n,
                                                           ctx.stream(2 * k), ctx.threads());
        std::vector<std::vector<double>> ex(s_points.size(), std::vector<double>(n));
        const seed_stream exact_seed = ctx.stream(2 * k + 1);
        parallel_for(n, ctx.threads(), [&](std::size_t i) {
            const auto b = bridges::brownian_bridge_exact({0.0, c, 1.0}, grid, exact_seed.child(i));
            for (std::size_t j = 0; j < s_points.size(); ++j) ex[j][i] = b.value_at(s_points[j]);
        });
        for (std::size_t j = 0; j < s_points.size(); ++j) {
            ctx.rep.add(stats::ks_two_sample(pw.values[j], ex[j], "bridge_law c=" + num(c) + " s=" + s_tags[j],
                                             "pathwise bridge through g_c against the exact Brownian bridge"));
        }
        const double mid_mean = c / 2.0;
        ctx.rep.add(stats::ks_one_sample(
            ex[1], [&](double v) { return specfun::normal_cdf((v - mid_mean) / 0.5); },
            "exact_bridge_midpoint c=" + num(c), "exact bridge at s = 1/2 is N(c/2, 1/4)"));
        ctx.rep.add_check("rejection_rate c=" + num(c), pw.rejection_rate(), 0.001,
                          "frequency of g_c = 0 among drawn paths");
        rejections[num(c)] = pw.rejections;
        for (std::size_t i = 0; i < n; ++i) {
            out.row(std::vector<double>{c, static_cast<double>(i), pw.passage_times[i], pw.values[0][i],
                                        pw.values[1][i], pw.values[2][i], ex[0][i], ex[1][i], ex[2][i]});
        }
    }
    ctx.rep.diagnostic("rejections", rejections);
}

// ---------------------------------------------------------------------------
// verify-gc-moments
// ---------------------------------------------------------------------------

inline void validate_gc_moments(const param_values& p, const experiment_config&, std::vector<std::string>& problems) {
    for (double q : p.reals("q_values"))
        if (!(q > 0.0)) problems.push_back("params.q_values: moment orders must be > 0");
    if (!(p.real("asymptotic_q") >= 100.0)) problems.push_back("params.asymptotic_q: must be >= 100");
}

inline void run_gc_moments(run_context& ctx) {
    const auto cs = ctx.params.reals("c_values");
    const auto qs = ctx.params.reals("q_values");
    const double qa = ctx.params.real("asymptotic_q");
    auto out = ctx.csv("gc_samples.csv");
    json predictions = json::array();
    for (std::size_t k = 0; k < cs.size(); ++k) {
        const double c = cs[k];
        const auto s = stats::sample_brownian_gc(c, ctx.cfg.n_paths, ctx.grid(), ctx.stream(k), ctx.threads());
        for (double q : qs) {
            const std::string tag = "c=" + num(c) + " q=" + num(q);
            const auto stated = stats::moment_from_sample(s, c, q, stats::gc_functional::one_minus_g);
            ctx.rep.add(stated, "moment_one_minus_g " + tag, "Hermite moment formula as stated for E[(1 - g_c)^q]");
            const auto direct = stats::moment_from_sample(s, c, q, stats::gc_functional::g);
            ctx.rep.add(direct, "moment_g " + tag, "Hermite moment formula compared with E[g_c^q]");
            const double pc = stats::gc_moment_prediction(c, q);
            const double pm = stats::gc_moment_prediction(-c, q);
            ctx.rep.add_check("moment_symmetry " + tag, std::abs(pc - pm), 0.0,
                              "closed form is even in c");
            predictions.push_back(json{{"c", c}, {"q", q}, {"predicted", pc}});
        }
        ctx.rep.add(stats::moment_asymptotics_check(c, {qa}));
        for (std::size_t i = 0; i < s.coarse.size(); ++i)
            out.row(std::vector<double>{c, static_cast<double>(i), s.coarse[i], s.fine[i]});
    }
    ctx.rep.diagnostic("predictions", predictions);
}

// ---------------------------------------------------------------------------
// verify-arcsine
// ---------------------------------------------------------------------------

inline void validate_arcsine(const param_values& p, const experiment_config&, std::vector<std::string>& problems) {
    for (double a : p.reals("alphas"))
        if (!(a > 0.0 && a < 1.0)) problems.push_back("params.alphas: every alpha must lie in (0, 1)");
    if (!(p.real("b") > 0.0)) problems.push_back("params.b: must be > 0");
    const double rc = p.real("relative_cutoff");
    if (!(rc > 0.0 && rc <= 0.1)) problems.push_back("params.relative_cutoff: must lie in (0, 0.1]");
}

inline void run_arcsine(run_context& ctx) {
    const auto alphas = ctx.params.reals("alphas");
    const double b = ctx.params.real("b");
    pathsim::first_passage_options opt;
    opt.relative_cutoff = ctx.params.real("relative_cutoff");
    const std::size_t n = ctx.cfg.n_paths;
    auto out = ctx.csv("arcsine_samples.csv");

    const auto s = stats::sample_brownian_gc(0.0, n, ctx.grid(), ctx.stream(0), ctx.threads());
    const auto grid_ks = stats::ks_one_sample(s.coarse, specfun::arcsine_cdf, "arcsine_brownian_g0",
                                              "Levy arcsine law of g_0");
    const auto fine_ks = stats::ks_one_sample(s.fine, specfun::arcsine_cdf, "arcsine_brownian_g0_refined",
                                              "Levy arcsine law of g_0, grid refined once");
    ctx.rep.add(grid_ks);
    ctx.rep.add(fine_ks);
    const auto plain_ks = stats::ks_one_sample(s.plain, specfun::arcsine_cdf);
    ctx.rep.diagnostic("brownian_ks_grid_vs_refined", json{{"grid", grid_ks.statistic},
                                                           {"grid_uncorrected", plain_ks.statistic},
                                                           {"refined", fine_ks.statistic},
                                                           {"decreased", fine_ks.statistic <= grid_ks.statistic}});
    for (std::size_t i = 0; i < n; ++i) out.row(std::vector<std::string>{"brownian", "2", std::to_string(i), num(s.coarse[i])});

    for (std::size_t k = 0; k < alphas.size(); ++k) {
        const double a = alphas[k];
        std::vector<double> x(n);
        const seed_stream seed = ctx.stream(1 + k);
        parallel_for(n, ctx.threads(), [&](std::size_t i) {
            const auto path = pathsim::sim_subordinator_first_passage(a, b, seed.child(i), opt);
            x[i] = pathsim::last_passage_below(path, b).g / b;
        });
        ctx.rep.add(stats::ks_one_sample(
            x, [&](double v) { return specfun::beta_arcsine_cdf(a, std::clamp(v, 0.0, 1.0)); },
            "generalized_arcsine alpha=" + num(a), "pre-passage value g/b against the generalized arcsine law"));
        for (std::size_t i = 0; i < n; ++i)
            out.row(std::vector<std::string>{"subordinator", num(a), std::to_string(i), num(x[i])});
    }
}

// ---------------------------------------------------------------------------
// verify-subordinator
// ---------------------------------------------------------------------------

inline void validate_subordinator(const param_values& p, const experiment_config&, std::vector<std::string>& problems) {
    const double a = p.real("alpha");
    if (!(a > 0.0 && a < 1.0)) problems.push_back("params.alpha: must lie in (0, 1)");
    if (!(p.real("b") > 0.0)) problems.push_back("params.b: must be > 0");
    if (!(p.real("scale_b") > 0.0)) problems.push_back("params.scale_b: must be > 0");
    const double rc = p.real("relative_cutoff");
    if (!(rc > 0.0 && rc <= 0.1)) problems.push_back("params.relative_cutoff: must lie in (0, 0.1]");
}

struct conditioned_sample {
    std::vector<double> L, g, zeta, y_half;
    bool endpoints_ok = true;
};

inline conditioned_sample sample_conditioned(double alpha, double b, std::size_t n, const seed_stream& seed,
                                             const pathsim::first_passage_options& opt, unsigned threads) {
    conditioned_sample s{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
                         std::vector<double>(n)};
    std::vector<char> ok(n, 1);
    parallel_for(n, threads, [&](std::size_t i) {
        const auto x = pathsim::sim_subordinator_first_passage(alpha, b, seed.child(i), opt);
        const auto lg = pathsim::last_passage_below(x, b);
        const auto kp = bridges::condition_on_passage(alpha, b, x);
        s.L[i] = lg.L;
        s.g[i] = lg.g;
        s.zeta[i] = kp.death_time;
        s.y_half[i] = kp.path.value_at(kp.death_time / 2.0);
        ok[i] = kp.path.end_value() == b && kp.path.end_time() == kp.death_time && kp.path.start_value() == 0.0 &&
                kp.path.non_decreasing();
    });
    s.endpoints_ok = std::all_of(ok.begin(), ok.end(), [](char v) { return v != 0; });
    return s;
}

// CDF of zeta / b^alpha: Gamma(alpha) int_0^tau f_s(1) ds.
inline std::function<double(double)> death_time_cdf(double alpha) {
    if (alpha == 0.5) return [](double t) { return t <= 0.0 ? 0.0 : -std::expm1(-t * t / 4.0); };
    std::vector<double> knots{0.0};
    for (int i = 0; i <= 800; ++i) knots.push_back(std::pow(10.0, -4.0 + 8.0 * i / 800.0));
    auto f = [alpha](double s) {
        return s <= 0.0 ? 0.0 : specfun::stable_density(alpha, specfun::stable_kind::one_sided, s, 1.0);
    };
    auto table = std::make_shared<tabulated_cdf>(cdf_from_density(f, knots));
    return [table](double t) { return (*table)(t); };
}

// P(L/b^a in [s1, s2), g/b in [x1, x2)) at alpha = 1/2, with g/b = sin^2 theta.
inline double half_joint_cell(double s1, double s2, double x1, double x2) {
    auto tail = [](double s, double th) {
        if (std::isinf(s)) return 0.0;
        const double sn = std::sin(th);
        return sn == 0.0 ? 0.0 : std::exp(-s * s / (4.0 * sn * sn));
    };
    auto f = [&](double th) { return tail(s1, th) - tail(s2, th); };
    const double t1 = std::asin(std::sqrt(x1));
    const double t2 = std::asin(std::sqrt(x2));
    return 2.0 / std::numbers::pi * integrate(f, t1, t2, {2000, 1e-14, 1e-12}).value;
}

inline void run_subordinator(run_context& ctx) {
    const double alpha = ctx.params.real("alpha");
    const double b = ctx.params.real("b");
    const double b2 = ctx.params.real("scale_b");
    pathsim::first_passage_options opt;
    opt.relative_cutoff = ctx.params.real("relative_cutoff");
    const std::size_t n = ctx.cfg.n_paths;
    const auto s = sample_conditioned(alpha, b, n, ctx.stream(0), opt, ctx.threads());
    const auto s2 = sample_conditioned(alpha, b2, n, ctx.stream(1), opt, ctx.threads());
    const double tscale = std::pow(b, alpha);

    ctx.rep.add_property("conditioned_endpoints", s.endpoints_ok && s2.endpoints_ok,
                         "conditioned path starts at 0, is non-decreasing and ends at Y_{zeta-} = b");

    std::vector<double> tau(n);
    for (std::size_t i = 0; i < n; ++i) tau[i] = s.zeta[i] / tscale;
    const auto zcdf = death_time_cdf(alpha);
    ctx.rep.add(stats::ks_one_sample(tau, zcdf, "death_time alpha=" + num(alpha),
                                     "death time of the subordinator conditioned to die at b"));

    const double ratio = std::pow(b2 / b, alpha);
    std::vector<double> z2(n), l2(n), g2(n), l1(n), g1(n);
    for (std::size_t i = 0; i < n; ++i) {
        z2[i] = s2.zeta[i] / ratio;
        l2[i] = s2.L[i] / std::pow(b2, alpha);
        g2[i] = s2.g[i] / b2;
        l1[i] = s.L[i] / tscale;
        g1[i] = s.g[i] / b;
    }
    ctx.rep.add(stats::ks_two_sample(s.zeta, z2, "death_time_scaling b=" + num(b) + " vs " + num(b2),
                                     "zeta at level b' has the law of (b'/b)^alpha zeta at level b"));
    ctx.rep.add(stats::ks_two_sample(g1, g2, "passage_value_scaling",
                                     "g/b has the same law at both levels"));

    if (alpha == 0.5) {
        const std::vector<double> xe{0.0, 0.25, 0.5, 0.75, 1.0};
        const std::vector<double> le{0.0, 0.5, 1.0, 2.0, std::numeric_limits<double>::infinity()};
        std::vector<double> probs;
        std::vector<std::size_t> counts;
        for (std::size_t a = 0; a + 1 < le.size(); ++a) {
            for (std::size_t c = 0; c + 1 < xe.size(); ++c) {
                probs.push_back(half_joint_cell(le[a], le[a + 1], xe[c], xe[c + 1]));
                counts.push_back(0);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto a = static_cast<std::size_t>(std::upper_bound(le.begin(), le.end(), l1[i]) - le.begin()) - 1;
            auto c = static_cast<std::size_t>(std::upper_bound(xe.begin(), xe.end(), g1[i]) - xe.begin()) - 1;
            c = std::min<std::size_t>(c, 3);
            ++counts[std::min<std::size_t>(a, 3) * 4 + c];
        }
        ctx.rep.add(stats::chi_square_gof(counts, probs, n, "passage_joint_law",
                                          "joint law of the passage time and pre-passage value"));
    } else {
        ctx.rep.diagnostic("passage_joint_law", "closed form only at alpha = 0.5; not run");
    }

    // Bridge property: given zeta = tau b^alpha, Y_{zeta/2} / b has density
    // proportional to f_{tau/2}(z) f_{tau/2}(1 - z).
    const double lo = 1.9, hi = 2.1;
    std::vector<tabulated_cdf> tables;
    std::vector<double> nodes;
    for (int j = 0; j <= 4; ++j) {
        const double tn = lo + (hi - lo) * j / 4.0;
        nodes.push_back(tn);
        auto f = [&](double z) {
            if (z <= 0.0 || z >= 1.0) return 0.0;
            return specfun::stable_density(alpha, specfun::stable_kind::one_sided, tn / 2.0, z) *
                   specfun::stable_density(alpha, specfun::stable_kind::one_sided, tn / 2.0, 1.0 - z);
        };
        tables.push_back(cdf_from_density(f, uniform_knots(0.0, 1.0, 400)));
    }
    std::vector<std::size_t> counts(10, 0);
    std::size_t in_bin = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (tau[i] < lo || tau[i] >= hi) continue;
        const double pos = (tau[i] - lo) / (hi - lo) * 4.0;
        const auto j = std::min<std::size_t>(static_cast<std::size_t>(pos), 3);
        const double w = pos - static_cast<double>(j);
        const double z = s.y_half[i] / b;
        const double u = (1.0 - w) * tables[j](z) + w * tables[j + 1](z);
        ++counts[std::min<std::size_t>(static_cast<std::size_t>(u * 10.0), 9)];
        ++in_bin;
    }
    if (in_bin >= 100) {
        ctx.rep.add(stats::chi_square_gof(counts, std::vector<double>(10, 0.1), in_bin,
                                          "bridge_midpoint zeta/b^alpha in [1.9, 2.1)",
                                          "given zeta the conditioned subordinator is a bridge from 0 to b"));
    } else {
        ctx.rep.add_property("bridge_midpoint zeta/b^alpha in [1.9, 2.1)", false,
                             "too few paths in the zeta bin", json{{"in_bin", in_bin}});
    }

    auto out = ctx.csv("subordinator_samples.csv");
    for (const auto& [level, smp] : {std::pair{b, &s}, std::pair{b2, &s2}})
        for (std::size_t i = 0; i < n; ++i)
            out.row(std::vector<double>{level, static_cast<double>(i), smp->L[i], smp->g[i], smp->zeta[i],
                                        smp->y_half[i]});
}

// ---------------------------------------------------------------------------
// verify-bessel-bridge
// ---------------------------------------------------------------------------

inline void validate_bessel_bridge(const param_values& p, const experiment_config&, std::vector<std::string>& problems) {
    if (!(p.real("delta") > 0.0)) problems.push_back("params.delta: must be > 0");
    if (!(p.real("y") > 0.0)) problems.push_back("params.y: must be > 0");
    if (!(p.real("t") > 0.0)) problems.push_back("params.t: must be > 0");
}

inline void run_bessel_bridge(run_context& ctx) {
    const double delta = ctx.params.real("delta");
    const double y = ctx.params.real("y");
    const double t = ctx.params.real("t");
    const std::size_t n = ctx.cfg.n_paths;
    // Transitions are exact, so the coarsest grid holding u = t/4, t/2, 3t/4 suffices.
    const grid_spec grid{t, 4};
    std::vector<std::vector<double>> v(3, std::vector<double>(n));
    std::vector<char> ok(n);
    const seed_stream seed = ctx.stream(0);
    parallel_for(n, ctx.threads(), [&](std::size_t i) {
        const auto p = bridges::bessel_bridge_timeinversion(delta, y, t, grid, seed.child(i));
        for (int k = 0; k < 3; ++k) v[k][i] = p.values[k + 1];
        ok[i] = p.start_value() == 0.0 && p.end_value() == y && p.non_negative();
    });
    ctx.rep.add_property("bessel_bridge_endpoints", std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; }),
                         "bridge starts at 0, ends at y and stays non-negative");
    const std::vector<std::string> tags{"0.25", "0.5", "0.75"};
    for (int k = 0; k < 3; ++k) {
        const double u = t * (k + 1) / 4.0;
        const double mean_scale = std::sqrt(u * (t - u) / t);
        const double zmax = y * u / t + 14.0 * mean_scale + 4.0 * std::sqrt(delta * u * (t - u) / t);
        auto f = [&](double z) {
            if (z <= 0.0) return 0.0;
            return std::exp(kernels::log_bessel_p(delta, u, 0.0, z) + kernels::log_bessel_p(delta, t - u, z, y));
        };
        const auto cdf = cdf_from_density(f, uniform_knots(0.0, zmax, 2000));
        ctx.rep.add(stats::ks_one_sample(v[k], cdf, "bessel_bridge_marginal u/t=" + tags[k],
                                         "time-inverted Bessel process against p_u(0, z) p_{t-u}(z, y) / p_t(0, y)"));
    }
    auto out = ctx.csv("bessel_bridge.csv");
    for (std::size_t i = 0; i < n; ++i) out.row(std::vector<double>{static_cast<double>(i), v[0][i], v[1][i], v[2][i]});
}

// ---------------------------------------------------------------------------
// verify-window-convergence
// ---------------------------------------------------------------------------

inline std::size_t window_index(const param_values& p) {
    const double r = p.real("s") / p.real("t") * static_cast<double>(p.integer("window_steps"));
    return static_cast<std::size_t>(std::llround(r));
}

inline void validate_window(const param_values& p, const experiment_config&, std::vector<std::string>& problems) {
    const double t = p.real("t");
    const double s = p.real("s");
    if (!(t > 0.0)) {
        problems.push_back("params.t: must be > 0");
        return;
    }
    if (!(s > 0.0 && s < t)) problems.push_back("params.s: must lie in (0, t)");
    const auto deltas = p.reals("deltas");
    for (double d : deltas)
        if (!(d > 0.0)) problems.push_back("params.deltas: window half-widths must be > 0");
    if (deltas.size() < 2 || !std::is_sorted(deltas.rbegin(), deltas.rend()) ||
        std::adjacent_find(deltas.begin(), deltas.end()) != deltas.end())
        problems.push_back("params.deltas: need at least two half-widths, strictly decreasing");
    if (!(p.real("rn_delta") > 0.0)) problems.push_back("params.rn_delta: must be > 0");
    const auto steps = p.integer("window_steps");
    if (steps < 2) problems.push_back("params.window_steps: must be >= 2");
    else {
        const double r = s / t * static_cast<double>(steps);
        if (std::abs(r - std::round(r)) > 1e-9) problems.push_back("params.s: must be a grid time of window_steps");
    }
    if (p.integer("max_trials") == 0) problems.push_back("params.max_trials: must be positive");
}

inline void run_window(run_context& ctx) {
    const double x = ctx.params.real("x");
    const double y = ctx.params.real("y");
    const double t = ctx.params.real("t");
    const double s = ctx.params.real("s");
    auto deltas = ctx.params.reals("deltas");
    std::sort(deltas.begin(), deltas.end(), std::greater<>());
    const double rn_delta = ctx.params.real("rn_delta");
    const grid_spec grid{t, ctx.params.integer("window_steps")};
    const std::size_t idx = window_index(ctx.params);
    const auto max_trials = static_cast<std::size_t>(ctx.params.integer("max_trials"));
    const std::size_t n = ctx.cfg.n_paths;
    const bridges::bridge_spec spec{x, y, t};
    const double target = x + (y - x) * s / t;
    auto extract = [idx](const sample_path& p) { return std::pair{p.values[idx], p.end_value()}; };
    auto out = ctx.csv("window_samples.csv");

    auto sample = [&](double d) {
        // every window uses the same trial stream
        return bridges::window_conditioned_sampler(process_spec::brownian(), spec, d, n, grid, ctx.stream(0),
                                                   extract, max_trials, ctx.threads());
    };
    std::vector<double> devs;
    json rates = json::object();
    double smallest_rate = 0.0;
    for (double d : deltas) {
        const auto r = sample(d);
        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = r.accepted[i].first;
        const auto m = stats::mean_and_se(xs);
        ctx.rep.add(stats::moment_report{1.0, m.mean, m.std_error, target, 0.0}, "window_mean delta=" + num(d),
                    "conditional mean at s under |X_t - y| < delta against the bridge mean");
        devs.push_back(std::abs(m.mean - target));
        rates[num(d)] = r.acceptance_rate();
        smallest_rate = r.acceptance_rate();
        for (std::size_t i = 0; i < n; ++i)
            out.row(std::vector<double>{d, static_cast<double>(i), r.accepted[i].first, r.accepted[i].second});
    }
    bool monotone = true;
    for (std::size_t k = 1; k < devs.size(); ++k) monotone = monotone && devs[k] <= devs[k - 1];
    ctx.rep.add_property("window_deviation_non_increasing", monotone,
                         "absolute deviation of the conditional mean shrinks with delta", json{{"deviations", devs}});
    const double predicted_rate = 2.0 * deltas.back() * kernels::brownian_p(t, x, y);
    ctx.rep.add_check("acceptance_rate delta=" + num(deltas.back()), std::abs(smallest_rate / predicted_rate - 1.0),
                      0.1, "acceptance rate against 2 delta p_t(x, y)");
    ctx.rep.diagnostic("acceptance_rates", rates);

    // Binned law of X_s under the thinnest window: p_s(x, z) p_{t-s}(z, y) / p_t(x, y)
    // is the normal density with the bridge mean and variance s (t - s) / t.
    const auto r = sample(rn_delta);
    const boost::math::normal_distribution<double> law(target, std::sqrt(s * (t - s) / t));
    const std::size_t bins = 20;
    std::vector<double> edges;
    for (std::size_t k = 1; k < bins; ++k) edges.push_back(boost::math::quantile(law, static_cast<double>(k) / bins));
    std::vector<std::size_t> counts(bins, 0);
    for (const auto& [xs, xt] : r.accepted)
        ++counts[static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), xs) - edges.begin())];
    ctx.rep.add(stats::chi_square_gof(counts, std::vector<double>(bins, 1.0 / bins), n,
                                      "window_law delta=" + num(rn_delta),
                                      "binned law of X_s against the bridge weight p_s p_{t-s} / p_t"));
    for (std::size_t i = 0; i < n; ++i)
        out.row(std::vector<double>{rn_delta, static_cast<double>(i), r.accepted[i].first, r.accepted[i].second});
}

// ---------------------------------------------------------------------------
// probe-resolvent
// ---------------------------------------------------------------------------

inline void validate_probe(const param_values& p, const experiment_config&, std::vector<std::string>& problems) {
    for (const auto& [a, x] : p.cases("cases"))
        if (!(a > 0.0 && a <= 2.0)) problems.push_back("params.cases: alpha " + num(a) + " outside (0, 2]");
    const double hi = p.real("t_max");
    const double lo = p.real("t_min");
    if (!(hi > 0.0 && hi <= 0.1)) problems.push_back("params.t_max: must lie in (0, 0.1]");
    if (!(lo > 0.0 && lo < hi)) problems.push_back("params.t_min: must lie in (0, t_max)");
    if (p.integer("points") < 8) problems.push_back("params.points: must be >= 8");
}

inline void run_probe(run_context& ctx) {
    const double hi = ctx.params.real("t_max");
    const double lo = ctx.params.real("t_min");
    const auto m = static_cast<std::size_t>(ctx.params.integer("points"));
    std::vector<double> times(m);
    for (std::size_t i = 0; i < m; ++i)
        times[i] = hi * std::pow(lo / hi, static_cast<double>(i) / static_cast<double>(m - 1));
    auto out = ctx.csv("resolvent_probe.csv");
    json slopes = json::array();
    for (const auto& [a, x] : ctx.params.cases("cases")) {
        const auto r = kernels::resolvent_exponent_probe(a, x, times);
        const double pred = kernels::predicted_exponent(a, x);
        ctx.rep.add_check("resolvent_slope alpha=" + num(a) + " x=" + num(x), std::abs(r.slope - pred), 0.05,
                          "small-time exponent of q_t(x, x)");
        slopes.push_back(json{{"alpha", a}, {"x", x}, {"slope", r.slope}, {"predicted", pred}});
        for (std::size_t i = 0; i < m; ++i) out.row(std::vector<double>{a, x, r.times[i], r.values[i]});
    }
    ctx.rep.diagnostic("slopes", slopes);
}

// ---------------------------------------------------------------------------
// verify-densities
// ---------------------------------------------------------------------------

inline void validate_densities(const param_values&, const experiment_config&, std::vector<std::string>&) {}

inline void run_densities(run_context& ctx) {
    auto out = ctx.csv("density_checks.csv");
    const quadrature_config qc{4000, 1e-15, 1e-11};
    auto record = [&](const std::string& check, const std::string& label, double value, double target,
                      double tolerance, bool relative, const std::string& ref) {
        const double err = std::abs(value - target) / (relative ? std::abs(target) : 1.0);
        out.row(std::vector<std::string>{check, label, num(value), num(target), num(std::abs(value - target))});
        ctx.rep.add_check(check + " " + label, err, tolerance, ref);
    };
    auto real_line = [&](auto f, double centre) {
        return integrate_to_infinity([&](double z) { return f(centre + z); }, 0.0, qc).value +
               integrate_to_infinity([&](double z) { return f(centre - z); }, 0.0, qc).value;
    };

    for (auto [t, x] : {std::pair{0.1, 0.0}, std::pair{1.0, 0.5}, std::pair{2.0, -1.0}}) {
        const double v = real_line([&](double y) { return kernels::brownian_p(t, x, y); }, x);
        record("normalization", "brownian t=" + num(t) + " x=" + num(x), v, 1.0, 1e-6, false,
               "Brownian transition density integrates to 1");
    }
    for (double d : {1.5, 2.0, 3.0, 4.5}) {
        for (auto [t, x] : {std::pair{0.5, 0.0}, std::pair{1.0, 1.0}, std::pair{2.0, 0.3}}) {
            auto f = [&](double y) { return y <= 0.0 ? 0.0 : kernels::bessel_p(d, t, x, y); };
            const double v = integrate(f, 0.0, x + 1.0, qc).value + integrate_to_infinity(f, x + 1.0, qc).value;
            record("normalization", "bessel delta=" + num(d) + " t=" + num(t) + " x=" + num(x), v, 1.0, 1e-6, false,
                   "Bessel transition density integrates to 1");
        }
    }

    // Chapman-Kolmogorov on a 3 x 3 x 3 (t, s, y) grid.
    for (double t : {0.5, 1.0, 2.0}) {
        for (double frac : {0.25, 0.5, 0.75}) {
            const double s = frac * t;
            for (double y : {-1.0, 0.0, 1.5}) {
                const double x = 0.3;
                const double v = real_line(
                    [&](double z) { return kernels::brownian_p(t - s, x, z) * kernels::brownian_p(s, z, y); }, x);
                record("chapman_kolmogorov", "brownian t=" + num(t) + " s=" + num(s) + " y=" + num(y), v,
                       kernels::brownian_p(t, x, y), 1e-4, false, "Chapman-Kolmogorov for the Brownian kernel");
            }
            for (double d : {3.0, 2.5}) {
                for (double y : {0.2, 1.0, 2.0}) {
                    const double x = 0.5;
                    auto f = [&](double z) {
                        return z <= 0.0 ? 0.0 : kernels::bessel_p(d, t - s, x, z) * kernels::bessel_p(d, s, z, y);
                    };
                    const double v = integrate(f, 0.0, 3.0, qc).value + integrate_to_infinity(f, 3.0, qc).value;
                    record("chapman_kolmogorov",
                           "bessel delta=" + num(d) + " t=" + num(t) + " s=" + num(s) + " y=" + num(y), v,
                           kernels::bessel_p(d, t, x, y), 1e-4, false, "Chapman-Kolmogorov for the Bessel kernel");
                }
            }
        }
    }

    using specfun::stable_kind;
    const quadrature_config sq{4000, 1e-12, 1e-9};
    for (double a : {0.5, 1.0, 1.5}) {
        auto f = [&](double z) { return specfun::stable_density(a, stable_kind::symmetric, 1.0, z); };
        const double v = 2.0 * (integrate(f, 0.0, 2.0, sq).value + integrate_to_infinity(f, 2.0, sq).value);
        record("normalization", "stable symmetric alpha=" + num(a), v, 1.0, 1e-4, false,
               "stable density integrates to 1");
    }
    for (double a : {0.3, 0.5, 0.7}) {
        auto f = [&](double z) { return specfun::stable_density(a, stable_kind::one_sided, 1.0, z); };
        const double v = integrate(f, 0.0, 2.0, sq).value + integrate_to_infinity(f, 2.0, sq).value;
        record("normalization", "stable one-sided alpha=" + num(a), v, 1.0, 1e-4, false,
               "stable density integrates to 1");
    }
    for (auto [a, kind] : {std::pair{0.7, stable_kind::symmetric}, std::pair{1.5, stable_kind::symmetric},
                           std::pair{0.3, stable_kind::one_sided}, std::pair{0.7, stable_kind::one_sided}}) {
        const double t = 2.5, z = 1.3;
        const double lhs = specfun::stable_density(a, kind, t, z) * std::pow(t, 1.0 / a);
        const double rhs = specfun::stable_density(a, kind, 1.0, z * std::pow(t, -1.0 / a));
        record("scaling", std::string(specfun::to_string(kind)) + " alpha=" + num(a), lhs, rhs, 1e-8, true,
               "f_t(x) t^(1/alpha) = f_1(x t^(-1/alpha))");
    }
    for (double a : {0.3, 0.5, 0.7}) {
        const double b = 1.0;
        const double h0 = kernels::h_transform_h(a, b, 0.0);
        auto f = [&](double t) {
            return t <= 0.0 ? 0.0 : specfun::stable_density(a, stable_kind::one_sided, t, b) / h0;
        };
        const double v = integrate(f, 0.0, 1.0, sq).value + integrate_to_infinity(f, 1.0, sq).value;
        record("death_time_normalization", "alpha=" + num(a), v, 1.0, 1e-4, false,
               "f_t(b) / h(0) integrates to 1 in t");
    }
    {
        auto f = [](double x) {
            return x <= 0.0 ? 0.0 : std::exp(-x) * specfun::stable_density(0.5, stable_kind::one_sided, 1.0, x);
        };
        const double v = integrate(f, 0.0, 1.0, qc).value + integrate_to_infinity(f, 1.0, qc).value;
        record("laplace_transform", "alpha=0.5 quadrature", v, std::exp(-1.0), 1e-8, false,
               "E exp(-X_1) = exp(-1) for the 1/2-stable subordinator");
    }

    // Monte Carlo: X_1 of the truncated subordinator simulation.
    const std::size_t n = ctx.cfg.n_paths;
    std::vector<double> x1(n), w(n);
    const seed_stream seed = ctx.stream(0);
    const double cutoff = ctx.cfg.jump_cutoff;
    parallel_for(n, ctx.threads(), [&](std::size_t i) {
        x1[i] = pathsim::sim_stable_subordinator(0.5, 1.0, cutoff, seed.child(i)).end_value();
        w[i] = std::exp(-x1[i]);
    });
    const auto m = stats::mean_and_se(w);
    ctx.rep.add(stats::moment_report{1.0, m.mean, m.std_error, std::exp(-1.0), 0.0}, "laplace_monte_carlo alpha=0.5",
                "E exp(-X_1) = exp(-1) from simulated subordinator paths");
    ctx.rep.add(stats::ks_one_sample(
        x1, [](double v) { return specfun::half_stable_subordinator_cdf(1.0, v); }, "subordinator_x1_law alpha=0.5",
        "X_1 of the simulated 1/2-stable subordinator against erfc(1 / (2 sqrt x))"));
    auto lap = ctx.csv("laplace_samples.csv");
    for (std::size_t i = 0; i < n; ++i) lap.row(std::vector<double>{static_cast<double>(i), x1[i]});
}

struct runner {
    std::string name;
    void (*validate)(const param_values&, const experiment_config&, std::vector<std::string>&);
    void (*run)(run_context&);
};

inline const std::vector<runner>& runners() {
    static const std::vector<runner> table = {
        {"verify-brownian-bridge", validate_brownian_bridge, run_brownian_bridge},
        {"verify-gc-moments", validate_gc_moments, run_gc_moments},
        {"verify-arcsine", validate_arcsine, run_arcsine},
        {"verify-subordinator", validate_subordinator, run_subordinator},
        {"verify-bessel-bridge", validate_bessel_bridge, run_bessel_bridge},
        {"verify-window-convergence", validate_window, run_window},
        {"probe-resolvent", validate_probe, run_probe},
        {"verify-densities", validate_densities, run_densities},
    };
    return table;
}

}  // namespace experiments

// Everything wrong with a config, collected before anything runs.
struct validated_config {
    const experiment_info* info = nullptr;
    param_values params;
};

inline validated_config validate_config(const experiment_config& cfg) {
    std::vector<std::string> problems;
    validated_config out;
    if (cfg.experiment.empty()) {
        problems.push_back("experiment: missing");
    } else {
        out.info = find_experiment(cfg.experiment);
        if (!out.info) problems.push_back("experiment: unknown name '" + cfg.experiment + "'");
    }
    if (cfg.n_paths < 2) problems.push_back("n_paths: must be >= 2");
    if (cfg.grid_steps < 4 || cfg.grid_steps % 2 != 0) problems.push_back("grid_steps: must be even and >= 4");
    if (!(cfg.jump_cutoff > 0.0) || !std::isfinite(cfg.jump_cutoff)) {
        problems.push_back("jump_cutoff: must be > 0");
    } else if (pathsim::truncated_subordinator::at(0.5, cfg.jump_cutoff).drift > 0.1) {
        problems.push_back("jump_cutoff: too large, the small-jump drift exceeds 0.1");
    }
    if (out.info) {
        out.params = effective_params(*out.info, cfg, problems);
        if (problems.empty()) {
            for (const auto& r : experiments::runners())
                if (r.name == out.info->name) r.validate(out.params, cfg, problems);
        }
    }
    if (!problems.empty()) throw config_error(problems);
    return out;
}

inline json config_echo(const experiment_config& cfg, const param_values& params) {
    json p = json::object();
    for (const auto& [k, v] : params.all()) p[k] = v;
    return json{{"experiment", cfg.experiment},
                {"seed", cfg.seed},
                {"n_paths", cfg.n_paths},
                {"grid_steps", cfg.grid_steps},
                {"jump_cutoff", real_json(cfg.jump_cutoff)},
                {"params", p}};
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct run_outcome {
    json summary;
    std::filesystem::path dir;
    bool all_passed = false;
};

// Runs the configured experiment and writes <out_root>/<experiment>/summary.json
// next to its CSV files.
inline run_outcome run_experiment(experiment_config cfg, const std::filesystem::path& out_root) {
    const auto v = validate_config(cfg);
    if (cfg.threads == 0) cfg.threads = std::max(1u, std::thread::hardware_concurrency());
    const auto started = std::chrono::steady_clock::now();
    const std::string timestamp = utc_timestamp();

    run_context ctx{*v.info, cfg, v.params, out_root / cfg.experiment, {}, {}};
    std::filesystem::create_directories(ctx.dir);
    for (const auto& r : experiments::runners())
        if (r.name == cfg.experiment) r.run(ctx);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json summary{{"experiment", cfg.experiment},
                 {"anchor", v.info->anchor},
                 {"config", config_echo(cfg, v.params)},
                 {"tests", ctx.rep.tests()},
                 {"diagnostics", ctx.rep.diagnostics()},
                 {"csv_files", ctx.csv_files},
                 {"all_passed", ctx.rep.all_passed()},
                 {"run_info", {{"timestamp", timestamp}, {"wall_time_seconds", wall}, {"threads", cfg.threads}}}};
    std::ofstream f(ctx.dir / "summary.json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (ctx.dir / "summary.json").string());
    f << summary.dump(2) << '\n';
    return {std::move(summary), ctx.dir, ctx.rep.all_passed()};
}

}  // namespace bridgelab::expcli
