#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fit.hpp"
#include "specfun.hpp"

namespace bridgelab::kernels {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class kernel_family { brownian, bessel, stable_ou, stable_subordinator };

struct kernel_spec {
    kernel_family family = kernel_family::brownian;
    double parameter = 0.0;  // delta for bessel, alpha otherwise

    static kernel_spec brownian() { return {kernel_family::brownian, 0.0}; }
    static kernel_spec bessel(double delta) { return {kernel_family::bessel, delta}; }
    static kernel_spec stable_ou(double alpha) { return {kernel_family::stable_ou, alpha}; }
    static kernel_spec stable_subordinator(double alpha) { return {kernel_family::stable_subordinator, alpha}; }

    void validate() const {
        switch (family) {
            case kernel_family::brownian: return;
            case kernel_family::bessel:
                if (!(parameter > 0.0)) throw domain_error("bessel kernel requires delta > 0");
                return;
            case kernel_family::stable_ou:
                if (!(parameter > 0.0 && parameter <= 2.0)) throw domain_error("stable-ou kernel requires alpha in (0, 2]");
                return;
            case kernel_family::stable_subordinator:
                if (!(parameter > 0.0 && parameter < 1.0))
                    throw domain_error("stable-subordinator kernel requires alpha in (0, 1)");
                return;
        }
    }

    // Bessel index nu = delta/2 - 1.
    double nu() const { return parameter / 2.0 - 1.0; }
};

// ---------------------------------------------------------------------------
// Brownian motion, variance t
// ---------------------------------------------------------------------------

inline double log_brownian_p(double t, double x, double y) {
    if (!(t > 0.0)) throw domain_error("brownian_p: requires t > 0");
    const double d = y - x;
    return -0.5 * std::log(2.0 * std::numbers::pi * t) - d * d / (2.0 * t);
}

inline double brownian_p(double t, double x, double y) { return std::exp(log_brownian_p(t, x, y)); }

// ---------------------------------------------------------------------------
// Bessel process of dimension delta, density in y on [0, inf)
// ---------------------------------------------------------------------------

inline constexpr double bessel_origin_threshold = 1e-12;

inline double log_bessel_p(double delta, double t, double x, double y) {
    if (!(delta > 0.0)) throw domain_error("bessel_p: requires delta > 0");
    if (!(t > 0.0)) throw domain_error("bessel_p: requires t > 0");
    if (!(x >= 0.0) || !(y >= 0.0)) throw domain_error("bessel_p: requires x, y >= 0");
    const double nu = delta / 2.0 - 1.0;
    if (x < bessel_origin_threshold) {
        // y^(2nu+1) exp(-y^2/2t) / (2^nu t^(nu+1) Gamma(nu+1))
        const double lead = (y == 0.0) ? (2.0 * nu + 1.0 > 0.0 ? -infinity : (2.0 * nu + 1.0 == 0.0 ? 0.0 : infinity))
                                       : (2.0 * nu + 1.0) * std::log(y);
        return lead - y * y / (2.0 * t) - nu * std::numbers::ln2 - (nu + 1.0) * std::log(t) - std::lgamma(nu + 1.0);
    }
    if (y == 0.0) return -infinity;
    // (1/t) (y/x)^nu y exp(-(x^2+y^2)/2t) I_nu(xy/t); I_nu(z) e^-z keeps the
    // exponent small when xy/t is large.
    const double z = x * y / t;
    return -std::log(t) + nu * std::log(y / x) + std::log(y) - (y - x) * (y - x) / (2.0 * t) +
           (specfun::log_bessel_I(nu, z) - z);
}

inline double bessel_p(double delta, double t, double x, double y) { return std::exp(log_bessel_p(delta, t, x, y)); }

// ---------------------------------------------------------------------------
// Stable Ornstein-Uhlenbeck transform: q_t(x, y) = f_{e^t - 1}(e^{t/a} y - x) e^{t/a}
// ---------------------------------------------------------------------------

inline double ou_q(double alpha, double t, double x, double y) {
    if (!(t > 0.0)) throw domain_error("ou_q: requires t > 0");
    const double grow = std::exp(t / alpha);
    const double clock = std::expm1(t);
    return specfun::stable_density(alpha, specfun::stable_kind::symmetric, clock, grow * y - x) * grow;
}

// ---------------------------------------------------------------------------
// Stable subordinator potential and h-transform
// ---------------------------------------------------------------------------

inline double potential_u(double alpha, double a) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("potential_u: requires alpha in (0, 1)");
    if (!(a > 0.0)) return 0.0;
    return std::pow(a, alpha - 1.0) / std::tgamma(alpha);
}

// h(a) = u(b - a) for a < b, 0 for a > b. At a == b the potential density is
// unbounded and +infinity is returned.
inline double h_transform_h(double alpha, double b, double a) {
    if (!(b > 0.0)) throw domain_error("h_transform_h: requires b > 0");
    if (a == b) return infinity;
    return potential_u(alpha, b - a);
}

// ---------------------------------------------------------------------------
// Generic transition density and the bridge weight
// ---------------------------------------------------------------------------

inline double log_transition(const kernel_spec& k, double t, double x, double y) {
    k.validate();
    switch (k.family) {
        case kernel_family::brownian: return log_brownian_p(t, x, y);
        case kernel_family::bessel: return log_bessel_p(k.parameter, t, x, y);
        case kernel_family::stable_ou: return std::log(ou_q(k.parameter, t, x, y));
        case kernel_family::stable_subordinator:
            if (!(t > 0.0)) throw domain_error("transition: requires t > 0");
            return std::log(specfun::stable_density(k.parameter, specfun::stable_kind::one_sided, t, y - x));
    }
    throw domain_error("transition: unknown family");
}

inline double transition(const kernel_spec& k, double t, double x, double y) {
    return std::exp(log_transition(k, t, x, y));
}

// M^s = p_{t-s}(xs, y) / p_t(x, y), formed in log space.
inline double bridge_rn_weight(const kernel_spec& k, double s, double t, double x, double y, double xs) {
    if (!(s >= 0.0 && s < t)) throw domain_error("bridge_rn_weight: requires 0 <= s < t");
    const double den = log_transition(k, t, x, y);
    if (!(den > -infinity)) throw zero_denominator_error("bridge_rn_weight: p_t(x, y) = 0");
    if (s == 0.0) return xs == x ? 1.0 : 0.0;
    return std::exp(log_transition(k, t - s, xs, y) - den);
}

// ---------------------------------------------------------------------------
// Small-time exponent of the OU density on the diagonal
// ---------------------------------------------------------------------------

// 16 geometric points from 1e-2 down to 1e-6.
inline std::vector<double> default_probe_grid() {
    std::vector<double> g(16);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::pow(10.0, -2.0 - 4.0 * static_cast<double>(i) / 15.0);
    return g;
}

struct probe_result {
    double slope;
    std::vector<double> times;
    std::vector<double> values;
};

// Least-squares slope of log q_t(x, x) against log t.
inline probe_result resolvent_exponent_probe(double alpha, double x, const std::vector<double>& t_grid) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw domain_error("resolvent_exponent_probe: requires alpha in (0, 2]");
    if (t_grid.size() < 8) throw domain_error("resolvent_exponent_probe: needs at least 8 times");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0 && t_grid[i] <= 0.1)) throw domain_error("resolvent_exponent_probe: times must lie in (0, 0.1]");
        if (i > 0 && !(t_grid[i] < t_grid[i - 1]))
            throw domain_error("resolvent_exponent_probe: times must be strictly decreasing");
    }
    probe_result out{0.0, t_grid, {}};
    out.values.reserve(t_grid.size());
    for (double t : t_grid) {
        double q;
        try {
            q = ou_q(alpha, t, x, x);
        } catch (const std::exception& e) {
            throw fit_error(std::string("resolvent_exponent_probe: q_t evaluation failed: ") + e.what());
        }
        if (!(q > 0.0) || !std::isfinite(q)) throw fit_error("resolvent_exponent_probe: non-positive q_t");
        out.values.push_back(q);
    }
    out.slope = loglog_slope(out.times, out.values);
    return out;
}

inline double predicted_exponent(double alpha, double x) {
    if (x == 0.0) return -1.0 / alpha;
    if (alpha == 1.0) return -1.0;
    if (alpha < 1.0) return -alpha;
    return -1.0 / alpha;  // alpha > 1: the density at 0 dominates
}

}  // namespace bridgelab::kernels
