#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace bridgelab {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Identifies one independent random stream: a master seed shared by an
// experiment plus the index of the path (or batch) being generated.
struct seed_stream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;

    // Independent sub-stream, e.g. for the k-th retry of a rejection sampler.
    seed_stream child(std::uint64_t k) const {
        return {splitmix64(master_seed ^ splitmix64(stream_index + 0x51ed270b7a3c1f4dULL)), k};
    }

    friend bool operator==(const seed_stream&, const seed_stream&) = default;
};

// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class engine {
public:
    using result_type = std::uint64_t;

    explicit engine(std::uint64_t seed_a = 0, std::uint64_t seed_b = 0) {
        std::uint64_t x = seed_a ^ splitmix64(seed_b ^ 0x2545f4914f6cdd1dULL);
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            word = splitmix64(x);
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        const result_type out = rotl(state_[0] + state_[3], 23) + state_[0];
        const result_type t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return out;
    }

private:
    static constexpr result_type rotl(result_type x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

inline engine make_engine(const seed_stream& s) {
    return engine(splitmix64(s.master_seed), s.stream_index);
}

namespace variates {

inline double normal(engine& eng) {
    boost::random::normal_distribution<double> nd;
    return nd(eng);
}

inline double exponential(engine& eng) {
    boost::random::exponential_distribution<double> ed;
    return ed(eng);
}

// Uniform on the open interval (0, 1).
inline double open_uniform(engine& eng) {
    boost::random::uniform_01<double> u;
    double v;
    do { v = u(eng); } while (v <= 0.0);
    return v;
}

// Inverse Gaussian with the given mean and shape (Michael, Schucany and Haas).
inline double inverse_gaussian(double mean, double shape, engine& eng) {
    const double y = normal(eng);
    const double my = mean * y * y;
    const double x = mean + mean / (2.0 * shape) * (my - std::sqrt(4.0 * shape * my + my * my));
    return open_uniform(eng) * (mean + x) <= mean ? x : mean * mean / x;
}

// Chambers-Mallows-Stuck sampler for the symmetric stable law with
// E exp(iuX) = exp(-|u|^alpha).
inline double symmetric_stable(double alpha, engine& eng) {
    const double v = std::numbers::pi * (open_uniform(eng) - 0.5);
    const double w = exponential(eng);
    if (alpha == 2.0) return 2.0 * std::sin(v) * std::sqrt(w);
    if (alpha == 1.0) return std::tan(v);
    const double lead = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha);
    const double tail = std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
    return lead * tail;
}

// Kanter's sampler for the positive stable law with E exp(-qX) = exp(-q^alpha),
// alpha in (0, 1).
inline double positive_stable(double alpha, engine& eng) {
    const double u = std::numbers::pi * open_uniform(eng);
    const double w = exponential(eng);
    const double a = std::pow(std::sin(alpha * u), alpha / (1.0 - alpha)) *
                     std::sin((1.0 - alpha) * u) / std::pow(std::sin(u), 1.0 / (1.0 - alpha));
    return std::pow(a / w, (1.0 - alpha) / alpha);
}

// Exact one-step transition of the squared Bessel process of dimension delta:
// Z_h / h given Z_0 = z is noncentral chi-square(delta, z / h), sampled as a
// Poisson mixture of gamma variables.
inline double squared_bessel_step(double delta, double z, double h, engine& eng) {
    double shape = delta / 2.0;
    if (z > 0.0) {
        boost::random::poisson_distribution<long long, double> pd(z / (2.0 * h));
        shape += static_cast<double>(pd(eng));
    }
    boost::random::gamma_distribution<double> gd(shape, 1.0);
    return 2.0 * h * gd(eng);
}

}  // namespace variates
}  // namespace bridgelab
