#pragma once

#include <cstddef>
#include <functional>

namespace sdpbound {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    std::size_t intervals = 0;
};

struct QuadratureOptions {
    double abs_tolerance = 1e-10;
    // Relative floor on the tolerance; an absolute target below the round-off of
    // |integral| cannot be met in double precision.
    double rel_floor = 64 * 2.220446049250313e-16;
    std::size_t max_intervals = 4000;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b]. The rule
/// never samples the endpoints, so integrable endpoint singularities are tolerated.
/// Throws QuadratureError (carrying the best estimate) when the interval budget runs out.
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                const QuadratureOptions& options = {});

}  // namespace sdpbound
