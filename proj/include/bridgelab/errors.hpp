#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bridgelab {

// Argument outside the mathematical domain of an operation.
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Adaptive quadrature ran out of subdivisions before reaching tolerance.
struct quadrature_error : std::runtime_error {
    quadrature_error(const std::string& what, double estimate, double error_estimate)
        : std::runtime_error(what), estimate(estimate), error_estimate(error_estimate) {}
    double estimate;
    double error_estimate;
};

// Bridge weight requested where the unconditioned density vanishes.
struct zero_denominator_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A construction's positivity hypothesis failed too often on simulated data.
struct hypothesis_violation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rejection sampler exhausted its trial budget.
struct budget_exceeded : std::runtime_error {
    budget_exceeded(const std::string& what, double acceptance_rate)
        : std::runtime_error(what), acceptance_rate(acceptance_rate) {}
    double acceptance_rate;
};

// Simulated path never reached the level it was asked to pass.
struct horizon_too_short : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Simulation parameters that make an approximation unreliable.
struct cutoff_too_large : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct empty_sample_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Every problem found while validating a configuration, reported together.
struct config_error : std::runtime_error {
    explicit config_error(std::vector<std::string> problems)
        : std::runtime_error(join(problems)), problems(std::move(problems)) {}
    std::vector<std::string> problems;

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out = "invalid configuration:";
        for (const auto& p : items) out += "\n  - " + p;
        return out;
    }
};

}  // namespace bridgelab
