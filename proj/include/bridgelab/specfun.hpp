#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "quadrature.hpp"

namespace bridgelab::specfun {

inline constexpr double pi = std::numbers::pi;

inline double gamma_fn(double x) {
    if (!(x > 0.0)) throw domain_error("gamma_fn: requires x > 0, got " + std::to_string(x));
    return std::tgamma(x);
}

inline double log_gamma_fn(double x) {
    if (!(x > 0.0)) throw domain_error("log_gamma_fn: requires x > 0, got " + std::to_string(x));
    return std::lgamma(x);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Levy's arcsine law on [0, 1].
inline double arcsine_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return 2.0 / pi * std::asin(std::sqrt(x));
}

inline double cauchy_cdf(double x) { return 0.5 + std::atan(x) / pi; }

// CDF at time t of the one-sided 1/2-stable subordinator with Laplace exponent sqrt(q).
inline double half_stable_subordinator_cdf(double t, double x) {
    if (x <= 0.0) return 0.0;
    return std::erfc(t / (2.0 * std::sqrt(x)));
}

// ---------------------------------------------------------------------------
// Hermite functions H_q(x) = int_0^inf exp(-x z - z^2/2) z^(q-1) dz
// ---------------------------------------------------------------------------

inline quadrature_config hermite_quadrature() { return {4000, 0.0, 1e-13}; }

// log H_q(x). The integrand is handled in log space relative to its peak so
// the result stays finite for large q where H_q itself overflows.
inline double log_hermite_H(double q, double x, const quadrature_config& cfg = hermite_quadrature()) {
    if (!(q > 0.0)) throw domain_error("hermite_H: requires q > 0");
    if (!std::isfinite(x)) throw domain_error("hermite_H: requires finite x");

    if (q < 1.0) {
        // z = w^(1/q) removes the z^(q-1) singularity at the origin.
        const double s_peak = std::max(-x, 0.0);
        const double peak = s_peak * s_peak / 2.0;
        auto integrand = [&](double w) {
            const double s = std::pow(w, 1.0 / q);
            return std::exp(-x * s - s * s / 2.0 - peak);
        };
        const double w_peak = std::pow(s_peak, q);
        const double w_end = std::pow(s_peak + 40.0, q);
        double sum = 0.0;
        if (w_peak > 0.0) sum += integrate(integrand, 0.0, w_peak, cfg).value;
        sum += integrate(integrand, w_peak, w_end, cfg).value;
        return peak + std::log(sum / q);
    }

    // phi(z) = (q-1) log z - x z - z^2/2 is concave with phi'' <= -1, so the
    // integrand is below exp(-(z - z*)^2 / 2) away from the peak z*.
    const double z_peak = 0.5 * (-x + std::sqrt(x * x + 4.0 * (q - 1.0)));
    auto phi = [&](double z) {
        const double lead = (q == 1.0) ? 0.0 : (q - 1.0) * std::log(z);
        return lead - x * z - 0.5 * z * z;
    };
    const double peak = (z_peak > 0.0 || q == 1.0) ? phi(z_peak) : 0.0;
    auto integrand = [&](double z) {
        if (z <= 0.0) return q == 1.0 ? std::exp(-peak) : 0.0;
        return std::exp(phi(z) - peak);
    };
    const double lo = std::max(0.0, z_peak - 40.0);
    const double hi = z_peak + 40.0;
    double sum = 0.0;
    if (z_peak > lo) sum += integrate(integrand, lo, z_peak, cfg).value;
    sum += integrate(integrand, z_peak, hi, cfg).value;
    return peak + std::log(sum);
}

inline double hermite_H(double q, double x, const quadrature_config& cfg = hermite_quadrature()) {
    return std::exp(log_hermite_H(q, x, cfg));
}

// ---------------------------------------------------------------------------
// Modified Bessel function of the first kind
// ---------------------------------------------------------------------------

// log I_nu(x) from the power series, summed outward from the largest term so
// that no partial quantity overflows.
inline double log_bessel_I(double nu, double x) {
    if (!(nu > -1.0)) throw domain_error("bessel_I: requires nu > -1");
    if (!(x >= 0.0)) throw domain_error("bessel_I: requires x >= 0");
    if (x == 0.0) {
        if (nu == 0.0) return 0.0;
        return nu > 0.0 ? -std::numeric_limits<double>::infinity()
                        : std::numeric_limits<double>::infinity();
    }
    const double half = 0.5 * x;
    const double log_half = std::log(half);
    const double quarter_sq = half * half;
    const double k_peak = std::floor(std::max(0.0, 0.5 * (-nu + std::sqrt(nu * nu + x * x))));
    auto log_term = [&](double k) {
        return (nu + 2.0 * k) * log_half - std::lgamma(k + 1.0) - std::lgamma(k + nu + 1.0);
    };
    const double log_peak = log_term(k_peak);

    double sum = 1.0;
    double term = 1.0;
    for (double k = k_peak; k > 0.0; k -= 1.0) {
        term *= k * (k + nu) / quarter_sq;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    term = 1.0;
    for (double k = k_peak + 1.0;; k += 1.0) {
        term *= quarter_sq / (k * (k + nu));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return log_peak + std::log(sum);
}

// I_nu(x) = sum_k (x/2)^(nu+2k) / (k! Gamma(1+nu+k)), with I_0(0) = 1 and
// I_nu(0) = 0 for nu > 0.
inline double bessel_I(double nu, double x) { return std::exp(log_bessel_I(nu, x)); }

// ---------------------------------------------------------------------------
// Strictly stable densities
// ---------------------------------------------------------------------------

// symmetric: characteristic exponent |u|^alpha, alpha in (0, 2].
// one_sided: subordinator with Laplace exponent q^alpha, alpha in (0, 1).
enum class stable_kind { symmetric, one_sided };

inline const char* to_string(stable_kind k) {
    return k == stable_kind::symmetric ? "symmetric" : "one-sided";
}

namespace detail {

// (1/pi) sum_k (-1)^(k+1) Gamma(k a + 1)/k! sin(k angle) x^(-k a - 1), x > 0.
// Convergent for a < 1; asymptotic for a > 1, in which case the sum stops at
// the smallest term.
inline double stable_tail_series(double alpha, double angle, double x) {
    const double log_x = std::log(x);
    double sum = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 1000; ++k) {
        const double log_mag = std::lgamma(k * alpha + 1.0) - std::lgamma(k + 1.0) -
                               (k * alpha + 1.0) * log_x;
        const double mag = std::exp(log_mag);
        if (alpha > 1.0 && mag > previous) break;
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        const double term = sign * mag * std::sin(k * angle);
        sum += term;
        if (k > 2 && mag < 1e-17 * std::abs(sum)) break;
        previous = mag;
    }
    return sum / pi;
}

// (1/pi) int_0^U exp(-c u^a) cos(u x - s u^a) du, truncated where the envelope
// drops below e^-32.3 (about 1e-14).
inline double stable_fourier(double alpha, double c, double s, double x, const quadrature_config& cfg) {
    const double upper = std::pow(32.3 / c, 1.0 / alpha);
    auto integrand = [&](double u) {
        const double ua = std::pow(u, alpha);
        return std::exp(-c * ua) * std::cos(u * x - s * ua);
    };
    const double cycles = upper * std::abs(x) / pi;
    const auto pieces = static_cast<std::size_t>(std::min(2.0e5, std::ceil(cycles) + 8.0));
    return integrate(integrand, 0.0, upper, cfg, pieces).value / pi;
}

inline quadrature_config stable_quadrature() { return {20000, 1e-15, 1e-11}; }

inline double symmetric_stable_unit(double alpha, double x, const quadrature_config& cfg) {
    const double ax = std::abs(x);
    if (alpha == 2.0) return std::exp(-x * x / 4.0) / (2.0 * std::sqrt(pi));
    if (alpha == 1.0) return 1.0 / (pi * (1.0 + x * x));
    if (alpha < 1.0 && std::pow(ax, alpha) >= 1.5)
        return stable_tail_series(alpha, pi * alpha / 2.0, ax);
    if (alpha > 1.0 && ax >= 40.0) return stable_tail_series(alpha, pi * alpha / 2.0, ax);
    return stable_fourier(alpha, 1.0, 0.0, ax, cfg);
}

inline double one_sided_stable_unit(double alpha, double x, const quadrature_config& cfg) {
    if (x <= 0.0) return 0.0;
    if (alpha == 0.5) return std::exp(-1.0 / (4.0 * x)) / (2.0 * std::sqrt(pi) * x * std::sqrt(x));
    if (std::pow(x, alpha) >= 1.5) return stable_tail_series(alpha, pi * alpha, x);
    const double v = stable_fourier(alpha, std::cos(pi * alpha / 2.0), std::sin(pi * alpha / 2.0), x, cfg);
    // The density is positive but vanishes faster than any power at 0+;
    // quadrature noise there is clipped.
    return std::max(v, 0.0);
}

}  // namespace detail

inline void validate_stable(double alpha, stable_kind kind) {
    if (kind == stable_kind::symmetric && !(alpha > 0.0 && alpha <= 2.0))
        throw domain_error("stable_density: symmetric kind requires alpha in (0, 2]");
    if (kind == stable_kind::one_sided && !(alpha > 0.0 && alpha < 1.0))
        throw domain_error("stable_density: one-sided kind requires alpha in (0, 1)");
}

// Density f_t(x) of the stable law at time t, via f_t(x) = f_1(x t^(-1/a)) t^(-1/a).
inline double stable_density(double alpha, stable_kind kind, double t, double x,
                             const quadrature_config& cfg = detail::stable_quadrature()) {
    validate_stable(alpha, kind);
    if (!(t > 0.0)) throw domain_error("stable_density: requires t > 0");
    const double scale = std::pow(t, -1.0 / alpha);
    const double z = x * scale;
    const double unit = kind == stable_kind::symmetric ? detail::symmetric_stable_unit(alpha, z, cfg)
                                                       : detail::one_sided_stable_unit(alpha, z, cfg);
    return unit * scale;
}

// ---------------------------------------------------------------------------
// Generalized arcsine law: density u^(a-1) (1-u)^(-a) / (Gamma(a) Gamma(1-a))
// ---------------------------------------------------------------------------

inline double beta_arcsine_cdf(double alpha, double x, const quadrature_config& cfg = {}) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("beta_arcsine_cdf: requires alpha in (0, 1)");
    if (!(x >= 0.0 && x <= 1.0)) throw domain_error("beta_arcsine_cdf: requires x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    // Gamma(a) Gamma(1-a) = pi / sin(pi a)
    const double norm = std::sin(pi * alpha) / pi;
    if (x <= 0.5) {
        // u = v^(1/a) absorbs the singularity at 0.
        auto integrand = [&](double v) { return std::pow(1.0 - std::pow(v, 1.0 / alpha), -alpha); };
        return norm / alpha * integrate(integrand, 0.0, std::pow(x, alpha), cfg).value;
    }
    // 1 - u = r^(1/(1-a)) absorbs the singularity at 1.
    const double beta = 1.0 - alpha;
    auto integrand = [&](double r) { return std::pow(1.0 - std::pow(r, 1.0 / beta), alpha - 1.0); };
    return 1.0 - norm / beta * integrate(integrand, 0.0, std::pow(1.0 - x, beta), cfg).value;
}

}  // namespace bridgelab::specfun
