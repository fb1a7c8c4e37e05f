#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

#include "bridgelab/quadrature.hpp"
#include "bridgelab/specfun.hpp"

using namespace bridgelab;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("integrate handles smooth and endpoint-singular integrands") {
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, pi).value == Approx(2.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {4000, 0.0, 1e-10}).value ==
          Approx(2.0).epsilon(1e-9));
    CHECK(integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0).value == Approx(1.0).epsilon(1e-12));
    CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0).value == 0.0);
}

TEST_CASE("integrate reports failure instead of returning a bad value") {
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, {20, 0.0, 1e-12}), quadrature_error);
    CHECK_THROWS_AS(integrate([](double x) { return x; }, 1.0, 0.0), domain_error);
    CHECK_THROWS_AS(integrate([](double x) { return x; }, 0.0, 1.0, {10, 0.0, 0.0}), domain_error);
}

TEST_CASE("Hermite function at zero matches 2^(q/2-1) Gamma(q/2)") {
    for (double q = 0.25; q <= 12.0; q += 0.25) {
        const double expected = std::pow(2.0, q / 2.0 - 1.0) * std::tgamma(q / 2.0);
        CHECK(rel(specfun::hermite_H(q, 0.0), expected) <= 1e-10);
    }
}

TEST_CASE("Hermite recurrence H_{q+2} = q H_q - x H_{q+1}") {
    for (double q = 0.5; q <= 6.0; q += 0.5) {
        for (double x = -3.0; x <= 3.0; x += 0.5) {
            const double h2 = specfun::hermite_H(q + 2.0, x);
            const double rhs = q * specfun::hermite_H(q, x) - x * specfun::hermite_H(q + 1.0, x);
            CHECK(std::abs(h2 - rhs) <= 1e-8 * (1.0 + std::abs(h2)));
        }
    }
}

TEST_CASE("Hermite derivative H_q' = -H_{q+1}") {
    const double h = 1e-4;
    for (double q : {0.5, 1.0, 2.5, 4.0}) {
        for (double x : {-2.0, -0.3, 0.0, 1.0, 2.5}) {
            const double fd = (specfun::hermite_H(q, x + h) - specfun::hermite_H(q, x - h)) / (2.0 * h);
            CHECK(rel(fd, -specfun::hermite_H(q + 1.0, x)) <= 1e-6);
        }
    }
}

TEST_CASE("Hermite Wronskian grows like exp(c^2/2)") {
    for (double q : {1.0, 2.0, 4.0}) {
        const double w0 = 2.0 * specfun::hermite_H(q, 0.0) * specfun::hermite_H(q + 1.0, 0.0);
        for (double c : {0.5, 1.0, 2.0}) {
            const double w = specfun::hermite_H(q, c) * specfun::hermite_H(q + 1.0, -c) +
                             specfun::hermite_H(q, -c) * specfun::hermite_H(q + 1.0, c);
            // f'' - c f' - q f = 0 has W' = c W
            CHECK(rel(w, w0 * std::exp(c * c / 2.0)) <= 1e-8);
        }
    }
}

TEST_CASE("Hermite function for integer q matches closed forms") {
    // H_1(x) = sqrt(pi/2) e^{x^2/2} erfc(x/sqrt 2), H_2 = 1 - x H_1
    for (double x : {-2.0, 0.0, 0.7, 3.0}) {
        const double h1 = std::sqrt(pi / 2.0) * std::exp(x * x / 2.0) * std::erfc(x / std::numbers::sqrt2);
        CHECK(rel(specfun::hermite_H(1.0, x), h1) <= 1e-11);
        CHECK(rel(specfun::hermite_H(2.0, x), 1.0 - x * h1) <= 1e-9);
    }
}

TEST_CASE("Hermite large-q behaviour follows Laplace's method") {
    // sqrt(pi/q) q^{q/2} exp(-x sqrt q - q/2 + x^2/4), assembled in logs
    for (double x : {0.0, 1.0}) {
        const double q = 400.0;
        const double log_asym =
            0.5 * std::log(pi / q) + q / 2.0 * std::log(q) - x * std::sqrt(q) - q / 2.0 + x * x / 4.0;
        const double ratio = std::exp(specfun::log_hermite_H(q, x) - log_asym);
        CHECK(ratio == Approx(1.0).margin(0.02));
    }
}

TEST_CASE("log Hermite stays finite where H_q overflows") {
    const double l = specfun::log_hermite_H(2000.0, 1.0);
    CHECK(std::isfinite(l));
    CHECK(l > 700.0);
    CHECK_THROWS_AS(specfun::hermite_H(0.0, 1.0), domain_error);
    CHECK_THROWS_AS(specfun::hermite_H(1.0, std::nan("")), domain_error);
}

TEST_CASE("modified Bessel I against boost") {
    for (double nu : {-0.5, -0.25, 0.0, 0.5, 1.0, 2.75, 10.0}) {
        for (double x : {1e-3, 0.1, 1.0, 5.0, 30.0, 200.0}) {
            const double ref = boost::math::cyl_bessel_i(nu, x);
            CHECK(rel(specfun::bessel_I(nu, x), ref) <= 1e-12);
        }
    }
    CHECK(specfun::bessel_I(0.0, 0.0) == 1.0);
    CHECK(specfun::bessel_I(1.5, 0.0) == 0.0);
    // far beyond double range of I itself
    CHECK(specfun::log_bessel_I(1.0, 5000.0) == Approx(5000.0 - 0.5 * std::log(2.0 * pi * 5000.0)).epsilon(1e-6));
    CHECK_THROWS_AS(specfun::bessel_I(-1.5, 1.0), domain_error);
    CHECK_THROWS_AS(specfun::bessel_I(1.0, -1.0), domain_error);
}

TEST_CASE("stable densities reduce to the Gaussian and Cauchy laws") {
    using specfun::stable_kind;
    for (double x : {0.0, 0.3, 1.0, 4.0}) {
        // exponent |u|^2: variance 2
        CHECK(specfun::stable_density(2.0, stable_kind::symmetric, 1.0, x) ==
              Approx(std::exp(-x * x / 4.0) / std::sqrt(4.0 * pi)).epsilon(1e-14));
        CHECK(specfun::stable_density(1.0, stable_kind::symmetric, 2.0, x) ==
              Approx(2.0 / (pi * (4.0 + x * x))).epsilon(1e-14));
        // the Fourier route agrees with the closed forms
        CHECK(specfun::detail::stable_fourier(1.0, 1.0, 0.0, x, specfun::detail::stable_quadrature()) ==
              Approx(1.0 / (pi * (1.0 + x * x))).epsilon(1e-9));
        CHECK(specfun::detail::stable_fourier(2.0, 1.0, 0.0, x, specfun::detail::stable_quadrature()) ==
              Approx(std::exp(-x * x / 4.0) / std::sqrt(4.0 * pi)).margin(1e-12));
    }
}

TEST_CASE("one-sided 1/2-stable density: closed form, Fourier and tail series agree") {
    const double c = std::cos(pi / 4.0), s = std::sin(pi / 4.0);
    for (double x : {0.05, 0.2, 1.0, 3.0}) {
        const double closed = specfun::stable_density(0.5, specfun::stable_kind::one_sided, 1.0, x);
        CHECK(closed == Approx(std::exp(-1.0 / (4.0 * x)) / (2.0 * std::sqrt(pi) * std::pow(x, 1.5))).epsilon(1e-14));
        CHECK(specfun::detail::stable_fourier(0.5, c, s, x, specfun::detail::stable_quadrature()) ==
              Approx(closed).margin(1e-9));
    }
    for (double x : {3.0, 10.0, 100.0}) {
        CHECK(specfun::detail::stable_tail_series(0.5, pi * 0.5, x) ==
              Approx(specfun::stable_density(0.5, specfun::stable_kind::one_sided, 1.0, x)).epsilon(1e-12));
    }
}

TEST_CASE("stable density is continuous across the series switch") {
    using specfun::stable_kind;
    for (double a : {0.3, 0.7}) {
        const double x = std::pow(1.5, 1.0 / a);
        const double below = specfun::stable_density(a, stable_kind::one_sided, 1.0, x * (1.0 - 1e-9));
        const double fourier = specfun::detail::stable_fourier(a, std::cos(pi * a / 2.0), std::sin(pi * a / 2.0), x,
                                                               specfun::detail::stable_quadrature());
        CHECK(rel(below, fourier) <= 1e-6);
        CHECK(rel(specfun::detail::stable_tail_series(a, pi * a, x), fourier) <= 1e-6);
    }
    for (double a : {0.5, 0.7}) {
        const double x = std::pow(1.5, 1.0 / a);
        CHECK(rel(specfun::detail::stable_tail_series(a, pi * a / 2.0, x),
                  specfun::detail::stable_fourier(a, 1.0, 0.0, x, specfun::detail::stable_quadrature())) <= 1e-6);
    }
    CHECK(rel(specfun::detail::stable_tail_series(1.5, pi * 0.75, 40.0),
              specfun::detail::stable_fourier(1.5, 1.0, 0.0, 40.0, specfun::detail::stable_quadrature())) <= 1e-6);
}

TEST_CASE("stable densities integrate to one and scale") {
    using specfun::stable_kind;
    const quadrature_config q{4000, 1e-12, 1e-9};
    for (double a : {0.5, 1.2, 1.8}) {
        auto f = [&](double z) { return specfun::stable_density(a, stable_kind::symmetric, 1.0, z); };
        const double mass = 2.0 * (integrate(f, 0.0, 2.0, q).value + integrate_to_infinity(f, 2.0, q).value);
        CHECK(std::abs(mass - 1.0) <= 1e-4);
    }
    for (double a : {0.3, 0.6, 0.9}) {
        auto f = [&](double z) { return specfun::stable_density(a, stable_kind::one_sided, 1.0, z); };
        const double mass = integrate(f, 0.0, 2.0, q).value + integrate_to_infinity(f, 2.0, q).value;
        CHECK(std::abs(mass - 1.0) <= 1e-4);
        for (double t : {0.1, 3.0}) {
            const double x = 0.8;
            CHECK(rel(specfun::stable_density(a, stable_kind::one_sided, t, x) * std::pow(t, 1.0 / a),
                      specfun::stable_density(a, stable_kind::one_sided, 1.0, x * std::pow(t, -1.0 / a))) <= 1e-8);
        }
    }
    CHECK(specfun::stable_density(0.5, stable_kind::one_sided, 1.0, -1.0) == 0.0);
    CHECK_THROWS_AS(specfun::stable_density(1.0, stable_kind::one_sided, 1.0, 1.0), domain_error);
    CHECK_THROWS_AS(specfun::stable_density(2.5, stable_kind::symmetric, 1.0, 1.0), domain_error);
    CHECK_THROWS_AS(specfun::stable_density(0.5, stable_kind::symmetric, 0.0, 1.0), domain_error);
}

TEST_CASE("generalized arcsine CDF") {
    for (double x : {0.0, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0})
        CHECK(specfun::beta_arcsine_cdf(0.5, x) == Approx(specfun::arcsine_cdf(x)).margin(1e-11));
    for (double a : {0.3, 0.7}) {
        // density u^(a-1) (1-u)^(-a) sin(pi a)/pi, checked by differences
        const double u = 0.4, h = 1e-5;
        const double d = (specfun::beta_arcsine_cdf(a, u + h) - specfun::beta_arcsine_cdf(a, u - h)) / (2.0 * h);
        CHECK(d == Approx(std::pow(u, a - 1.0) * std::pow(1.0 - u, -a) * std::sin(pi * a) / pi).epsilon(1e-6));
        // the two branches meet at 1/2
        CHECK(specfun::beta_arcsine_cdf(a, 0.5) ==
              Approx(specfun::beta_arcsine_cdf(a, std::nextafter(0.5, 1.0))).margin(1e-12));
        double prev = 0.0;
        for (double x = 0.05; x < 1.0; x += 0.05) {
            const double v = specfun::beta_arcsine_cdf(a, x);
            CHECK(v > prev);
            prev = v;
        }
    }
    CHECK_THROWS_AS(specfun::beta_arcsine_cdf(1.0, 0.5), domain_error);
    CHECK_THROWS_AS(specfun::beta_arcsine_cdf(0.5, 1.5), domain_error);
}

TEST_CASE("half-stable subordinator CDF is the integral of its density") {
    for (double t : {0.5, 1.0, 2.0}) {
        for (double x : {0.1, 1.0, 10.0}) {
            auto f = [&](double z) {
                return z <= 0.0 ? 0.0 : specfun::stable_density(0.5, specfun::stable_kind::one_sided, t, z);
            };
            CHECK(specfun::half_stable_subordinator_cdf(t, x) ==
                  Approx(integrate(f, 0.0, x, {4000, 1e-15, 1e-12}).value).margin(1e-10));
        }
    }
}
