#pragma once

#include <stdexcept>

namespace chg {

// Numerical policy shared by every floating-point operation in the library.
// boundary_tol applies to <Z,Z> after Z has been scaled to unit Euclidean
// norm, so the boundary test is scale-free.
struct ToleranceConfig {
    double eq_tol = 1e-9;        // scalar / entrywise equality
    double boundary_tol = 1e-8;  // |<Z,Z>| cutoff for boundary points
    double angle_tol = 1e-9;     // argument comparisons

    void validate() const {
        if (eq_tol <= 0 || boundary_tol <= 0 || angle_tol <= 0)
            throw std::invalid_argument("ToleranceConfig: tolerances must be positive");
    }
};

inline const ToleranceConfig& default_tol() {
    static const ToleranceConfig cfg{};
    return cfg;
}

} // namespace chg
