#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "bridgelab/kernels.hpp"
#include "bridgelab/pathsim.hpp"
#include "bridgelab/stats.hpp"

using namespace bridgelab;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;
const quadrature_config tight{4000, 1e-15, 1e-11};

double phi(double t, double z) { return std::exp(-z * z / (2.0 * t)) / std::sqrt(2.0 * pi * t); }

template <class F>
double over_line(F f, double centre) {
    return integrate_to_infinity([&](double z) { return f(centre + z); }, 0.0, tight).value +
           integrate_to_infinity([&](double z) { return f(centre - z); }, 0.0, tight).value;
}

template <class F>
double over_half_line(F f) {
    return integrate(f, 0.0, 2.0, tight).value + integrate_to_infinity(f, 2.0, tight).value;
}
}  // namespace

TEST_CASE("Brownian kernel") {
    CHECK(kernels::brownian_p(1.0, 0.0, 0.0) == Approx(1.0 / std::sqrt(2.0 * pi)).epsilon(1e-15));
    CHECK(kernels::brownian_p(0.5, 1.0, -0.3) == Approx(phi(0.5, 1.3)).epsilon(1e-14));
    CHECK(kernels::brownian_p(2.0, 0.4, 1.1) == kernels::brownian_p(2.0, 1.1, 0.4));
    for (auto [t, x] : {std::pair{0.01, 0.0}, std::pair{1.0, 2.0}, std::pair{7.0, -1.0}})
        CHECK(std::abs(over_line([&](double y) { return kernels::brownian_p(t, x, y); }, x) - 1.0) <= 1e-6);
    CHECK_THROWS_AS(kernels::brownian_p(0.0, 0.0, 0.0), domain_error);
}

TEST_CASE("Bessel kernel matches reflected Brownian motion and |B_3|") {
    for (double t : {0.3, 1.0, 2.0}) {
        for (double y : {0.1, 0.8, 2.5}) {
            for (double x : {0.2, 1.0}) {
                CHECK(kernels::bessel_p(1.0, t, x, y) == Approx(phi(t, y - x) + phi(t, y + x)).epsilon(1e-10));
                CHECK(kernels::bessel_p(3.0, t, x, y) == Approx(y / x * (phi(t, y - x) - phi(t, y + x))).epsilon(1e-10));
            }
            CHECK(kernels::bessel_p(3.0, t, 0.0, y) ==
                  Approx(std::sqrt(2.0 / pi) * y * y * std::pow(t, -1.5) * std::exp(-y * y / (2.0 * t))).epsilon(1e-12));
        }
    }
}

TEST_CASE("Bessel kernel is continuous at the origin switch") {
    for (double d : {0.5, 1.5, 3.0, 4.5}) {
        const double at0 = kernels::bessel_p(d, 1.0, 0.0, 0.7);
        CHECK(kernels::bessel_p(d, 1.0, 2e-12, 0.7) == Approx(at0).epsilon(1e-9));
        CHECK(kernels::bessel_p(d, 1.0, 1e-6, 0.7) == Approx(at0).epsilon(1e-9));
    }
}

TEST_CASE("Bessel kernel normalization and Chapman-Kolmogorov") {
    for (double d : {0.5, 1.5, 2.0, 3.0, 4.5}) {
        for (auto [t, x] : {std::pair{0.5, 0.0}, std::pair{1.0, 1.0}, std::pair{2.0, 0.3}}) {
            auto f = [&](double y) { return y <= 0.0 ? 0.0 : kernels::bessel_p(d, t, x, y); };
            CHECK(std::abs(over_half_line(f) - 1.0) <= 1e-6);
        }
    }
    for (double d : {2.5, 3.0}) {
        for (double t : {0.5, 1.0, 2.0}) {
            for (double s : {0.25 * t, 0.5 * t, 0.75 * t}) {
                for (double y : {0.2, 1.0, 2.0}) {
                    auto f = [&](double z) {
                        return z <= 0.0 ? 0.0 : kernels::bessel_p(d, t - s, 0.5, z) * kernels::bessel_p(d, s, z, y);
                    };
                    CHECK(std::abs(over_half_line(f) - kernels::bessel_p(d, t, 0.5, y)) <= 1e-4);
                }
            }
        }
    }
    CHECK_THROWS_AS(kernels::bessel_p(0.0, 1.0, 1.0, 1.0), domain_error);
}

TEST_CASE("Brownian Chapman-Kolmogorov") {
    for (double t : {0.5, 1.0, 2.0})
        for (double s : {0.25 * t, 0.5 * t, 0.75 * t})
            for (double y : {-1.0, 0.0, 1.5}) {
                const double v = over_line(
                    [&](double z) { return kernels::brownian_p(t - s, 0.3, z) * kernels::brownian_p(s, z, y); }, 0.3);
                CHECK(std::abs(v - kernels::brownian_p(t, 0.3, y)) <= 1e-4);
            }
}

TEST_CASE("OU transition density") {
    // alpha = 1 at x = y = 0: e^t / (pi (e^t - 1))
    for (double t : {1e-3, 0.1, 1.0})
        CHECK(kernels::ou_q(1.0, t, 0.0, 0.0) == Approx(std::exp(t) / (pi * std::expm1(t))).epsilon(1e-12));
    for (double a : {1.0, 1.5, 2.0}) {
        for (double x : {0.0, 0.8}) {
            const double t = 0.4;
            const double mass = over_line([&](double y) { return kernels::ou_q(a, t, x, y); }, x * std::exp(-t / a));
            CHECK(std::abs(mass - 1.0) <= 1e-4);
        }
    }
}

TEST_CASE("stable subordinator potential and h-transform") {
    for (double a : {0.3, 0.5, 0.8}) {
        for (double lam : {0.5, 2.0}) {
            // int e^{-lam x} u(x) dx = 1 / Phi(lam) = lam^{-a}
            auto f = [&](double x) { return x <= 0.0 ? 0.0 : std::exp(-lam * x) * kernels::potential_u(a, x); };
            CHECK(over_half_line(f) == Approx(std::pow(lam, -a)).epsilon(1e-7));
        }
        CHECK(std::isinf(kernels::h_transform_h(a, 1.0, 1.0)));
        CHECK(kernels::h_transform_h(a, 1.0, 1.5) == 0.0);
        CHECK(kernels::h_transform_h(a, 2.0, 0.5) == Approx(kernels::potential_u(a, 1.5)));
    }
    CHECK_THROWS_AS(kernels::potential_u(1.0, 1.0), domain_error);
    CHECK_THROWS_AS(kernels::h_transform_h(0.5, 0.0, 0.0), domain_error);
}

TEST_CASE("death-time density integrates to one") {
    for (double a : {0.3, 0.5, 0.7}) {
        for (double b : {1.0, 2.5}) {
            const double h0 = kernels::h_transform_h(a, b, 0.0);
            auto f = [&](double t) {
                return t <= 0.0 ? 0.0 : specfun::stable_density(a, specfun::stable_kind::one_sided, t, b) / h0;
            };
            const quadrature_config q{4000, 1e-12, 1e-9};
            const double v = integrate(f, 0.0, 1.0, q).value + integrate_to_infinity(f, 1.0, q).value;
            CHECK(std::abs(v - 1.0) <= 1e-4);
        }
    }
}

TEST_CASE("bridge weight: edge cases") {
    const auto k = kernels::kernel_spec::brownian();
    CHECK(kernels::bridge_rn_weight(k, 0.0, 1.0, 0.0, 1.0, 0.0) == 1.0);
    CHECK(kernels::bridge_rn_weight(k, 0.0, 1.0, 0.0, 1.0, 0.5) == 0.0);
    CHECK(kernels::bridge_rn_weight(k, 0.5, 1.0, 0.0, 1.0, 1.0) ==
          Approx(kernels::brownian_p(0.5, 1.0, 1.0) / kernels::brownian_p(1.0, 0.0, 1.0)));
    CHECK_THROWS_AS(kernels::bridge_rn_weight(k, 1.0, 1.0, 0.0, 1.0, 0.0), domain_error);
    CHECK_THROWS_AS(kernels::bridge_rn_weight(kernels::kernel_spec::bessel(3.0), 0.5, 1.0, 0.0, 0.0, 0.3),
                    zero_denominator_error);
}

TEST_CASE("bridge weight integrates to one against p_s") {
    for (const auto& k : {kernels::kernel_spec::brownian(), kernels::kernel_spec::bessel(3.0)}) {
        const double x = 0.4, y = 1.2, s = 0.3, t = 1.0;
        auto f = [&](double z) {
            if (k.family == kernels::kernel_family::bessel && z <= 0.0) return 0.0;
            return kernels::transition(k, s, x, z) * kernels::bridge_rn_weight(k, s, t, x, y, z);
        };
        const double v = k.family == kernels::kernel_family::brownian ? over_line(f, x) : over_half_line(f);
        CHECK(v == Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("bridge weight is a martingale under simulation") {
    const std::size_t n = 20000;
    const double s = 0.5, t = 1.0, x = 0.3, y = 1.0;
    for (int fam = 0; fam < 2; ++fam) {
        const auto k = fam == 0 ? kernels::kernel_spec::brownian() : kernels::kernel_spec::bessel(3.0);
        const auto p = fam == 0 ? process_spec::brownian() : process_spec::bessel(3.0);
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto path = pathsim::simulate(p, {s, 4}, x, {99, i});
            w[i] = kernels::bridge_rn_weight(k, s, t, x, y, path.end_value());
        }
        const auto m = stats::mean_and_se(w);
        CHECK(std::abs(m.mean - 1.0) <= 3.0 * m.std_error);
    }
}

TEST_CASE("resolvent exponent probe") {
    const auto grid = kernels::default_probe_grid();
    REQUIRE(grid.size() == 16);
    CHECK(grid.front() == Approx(1e-2));
    CHECK(grid.back() == Approx(1e-6));
    struct case_t {
        double alpha, x, slope;
    };
    for (auto c : {case_t{2.0, 0.0, -0.5}, case_t{1.0, 0.0, -1.0}, case_t{0.5, 0.0, -2.0}, case_t{1.5, 0.0, -1.0 / 1.5},
                   case_t{1.0, 0.5, -1.0}, case_t{0.5, 1.0, -0.5}}) {
        CHECK(kernels::predicted_exponent(c.alpha, c.x) == Approx(c.slope));
        const auto r = kernels::resolvent_exponent_probe(c.alpha, c.x, grid);
        CHECK(std::abs(r.slope - c.slope) <= 0.05);
    }
    CHECK_THROWS_AS(kernels::resolvent_exponent_probe(1.0, 0.0, {1e-2, 1e-3, 1e-4}), domain_error);
    std::vector<double> up(grid.rbegin(), grid.rend());
    CHECK_THROWS_AS(kernels::resolvent_exponent_probe(1.0, 0.0, up), domain_error);
    auto big = grid;
    big[0] = 0.5;
    CHECK_THROWS_AS(kernels::resolvent_exponent_probe(1.0, 0.0, big), domain_error);
    CHECK_THROWS_AS(kernels::resolvent_exponent_probe(2.5, 0.0, grid), domain_error);
}
