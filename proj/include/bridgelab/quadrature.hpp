#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "errors.hpp"

namespace bridgelab {

struct quadrature_config {
    std::size_t max_subdivisions = 2000;
    double abs_tol = 0.0;
    double rel_tol = 1e-12;

    void validate() const {
        if (max_subdivisions < 1)
            throw domain_error("quadrature_config: max_subdivisions must be >= 1");
        if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0))
            throw domain_error("quadrature_config: tolerances must be non-negative");
        if (abs_tol == 0.0 && rel_tol == 0.0)
            throw domain_error("quadrature_config: at least one tolerance must be positive");
    }
};

struct quadrature_result {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t subdivisions = 0;
};

namespace detail {

// 15-point Kronrod rule with its embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct segment {
    double a, b, value, error;
    bool operator<(const segment& o) const { return error < o.error; }
};

template <class F>
segment gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kronrod_weights[7];
    double gauss = fc * gauss_weights[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kronrod_weights[j] * sum;
        if (j % 2 == 1) gauss += gauss_weights[j / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    double err = std::abs(kronrod - gauss);
    if (!std::isfinite(kronrod)) err = std::numeric_limits<double>::infinity();
    return {a, b, kronrod, err};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration on [a, b]. The interval is first
// split into `initial_pieces` equal parts (useful for oscillatory integrands),
// then the segment with the largest error estimate is bisected until the total
// error meets max(abs_tol, rel_tol * |value|).
template <class F>
quadrature_result integrate(F&& f, double a, double b, const quadrature_config& cfg = {},
                            std::size_t initial_pieces = 1) {
    cfg.validate();
    if (!(a <= b)) throw domain_error("integrate: requires a <= b");
    if (a == b) return {};
    initial_pieces = std::max<std::size_t>(initial_pieces, 1);
    const std::size_t limit = std::max(cfg.max_subdivisions, 4 * initial_pieces);

    std::priority_queue<detail::segment> heap;
    double total = 0.0;
    double total_err = 0.0;
    const double width = (b - a) / static_cast<double>(initial_pieces);
    for (std::size_t i = 0; i < initial_pieces; ++i) {
        const double lo = a + width * static_cast<double>(i);
        const double hi = (i + 1 == initial_pieces) ? b : lo + width;
        auto s = detail::gauss_kronrod_15(f, lo, hi);
        total += s.value;
        total_err += s.error;
        heap.push(s);
    }

    auto tolerance = [&] { return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };
    while (total_err > tolerance()) {
        if (heap.size() >= limit) {
            throw quadrature_error("integrate: no convergence within " + std::to_string(limit) +
                                       " subdivisions",
                                   total, total_err);
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Segment cannot be split further in double precision.
            throw quadrature_error("integrate: segment underflow near " + std::to_string(mid),
                                   total, total_err);
        }
        auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift of the running totals.
    quadrature_result out;
    out.subdivisions = heap.size();
    while (!heap.empty()) {
        out.value += heap.top().value;
        out.abs_error += heap.top().error;
        heap.pop();
    }
    return out;
}

// Integral over [a, inf) through the map x = a + s / (1 - s).
template <class F>
quadrature_result integrate_to_infinity(F&& f, double a, const quadrature_config& cfg = {}) {
    auto mapped = [&](double s) {
        const double one_minus = 1.0 - s;
        const double x = a + s / one_minus;
        const double v = f(x);
        return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
    };
    return integrate(mapped, 0.0, 1.0, cfg);
}

}  // namespace bridgelab
