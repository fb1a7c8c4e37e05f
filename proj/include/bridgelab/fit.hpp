#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace bridgelab {

// Ordinary least-squares slope of log ys on log xs.
inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw domain_error("loglog_slope: length mismatch");
    if (xs.size() < 3) throw domain_error("loglog_slope: needs at least 3 points");
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw domain_error("loglog_slope: inputs must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw fit_error("loglog_slope: xs are all equal");
    return sxy / sxx;
}

}  // namespace bridgelab
