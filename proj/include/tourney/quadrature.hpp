#pragma once

#include <functional>

namespace tourney {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
    long evaluations = 0;
};

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_depth = 20;       // dyadic levels; smallest panel is (b-a)/2^20
    int max_splits = 40000;
};

/// Adaptive composite Gauss-Legendre integration on (a, b).
///
/// Panels are bisected dyadically, worst-error panel first, until the summed
/// per-panel error estimate (coarse rule vs. the two half-panels) drops below
/// the absolute or relative tolerance. All nodes are interior, so integrands
/// may be singular at the endpoints as long as they are integrable.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Same, but throws numeric_error when the tolerance is not reached.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts = {});

}  // namespace tourney
