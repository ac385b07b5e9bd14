#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdpbound {

/// A parameter lies outside its model domain (l >= 1, 0 < p < 1, K > 0, m > -1, t > 0, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed prediction input. `row()` is the 1-based data row, 0 when not row-specific.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t row = 0)
        : std::runtime_error(row ? "row " + std::to_string(row) + ": " + what : what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Adaptive quadrature ran out of subdivisions before reaching the tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double best_estimate, double error_bound)
        : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double best_estimate_;
    double error_bound_;
};

}  // namespace sdpbound
