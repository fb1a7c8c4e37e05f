#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace bridgelab {

enum class process_family { brownian, bessel, stable, stable_subordinator };

// A self-similar process family. `parameter` is the dimension delta for
// Bessel processes and the index alpha for the stable families.
struct process_spec {
    process_family family = process_family::brownian;
    double parameter = 0.0;

    static process_spec brownian() { return {process_family::brownian, 0.0}; }
    static process_spec bessel(double delta) { return {process_family::bessel, delta}; }
    static process_spec stable(double alpha) { return {process_family::stable, alpha}; }
    static process_spec subordinator(double alpha) { return {process_family::stable_subordinator, alpha}; }

    // Self-similarity index gamma: X_{vt} has the law of v^{1/gamma} X_t.
    double index() const {
        switch (family) {
            case process_family::brownian:
            case process_family::bessel: return 2.0;
            case process_family::stable:
            case process_family::stable_subordinator: return parameter;
        }
        return 2.0;
    }

    void validate() const {
        switch (family) {
            case process_family::brownian: return;
            case process_family::bessel:
                if (!(parameter > 0.0)) throw domain_error("bessel process requires delta > 0");
                return;
            case process_family::stable:
                if (!(parameter > 0.0 && parameter <= 2.0))
                    throw domain_error("stable process requires alpha in (0, 2]");
                return;
            case process_family::stable_subordinator:
                if (!(parameter > 0.0 && parameter < 1.0))
                    throw domain_error("stable subordinator requires alpha in (0, 1)");
                return;
        }
    }

    std::string name() const {
        switch (family) {
            case process_family::brownian: return "brownian";
            case process_family::bessel: return "bessel(" + std::to_string(parameter) + ")";
            case process_family::stable: return "stable(" + std::to_string(parameter) + ")";
            case process_family::stable_subordinator: return "subordinator(" + std::to_string(parameter) + ")";
        }
        return "?";
    }
};

}  // namespace bridgelab
