#include "sdpbound/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "sdpbound/error.hpp"
#include "summation.hpp"

namespace sdpbound {
namespace {

// Kronrod 15-point abscissae; odd indices are the Gauss 7-point nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                const QuadratureOptions& options) {
    // Max-heap on segment error.
    std::vector<Segment> heap{gk15(f, a, b)};
    QuadratureResult result;
    result.evaluations = 15;

    auto totals = [&heap] {
        detail::NeumaierSum value, error;
        for (const auto& s : heap) {
            value += s.value;
            error += s.error;
        }
        return std::pair{value.value(), error.value()};
    };

    auto [value, error] = totals();
    while (true) {
        const double target = std::max(options.abs_tolerance, options.rel_floor * std::abs(value));
        if (error <= target || !std::isfinite(error)) break;
        if (heap.size() >= options.max_intervals) {
            throw QuadratureError("adaptive quadrature did not converge within " +
                                      std::to_string(options.max_intervals) + " intervals",
                                  value, error);
        }
        std::pop_heap(heap.begin(), heap.end());
        const Segment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureError("interval collapsed below machine resolution", value, error);
        }
        const Segment left = gk15(f, worst.a, mid);
        const Segment right = gk15(f, mid, worst.b);
        if (!std::isfinite(left.value + right.value) || !std::isfinite(left.error + right.error)) {
            throw QuadratureError("integrand produced a non-finite value", value, error);
        }
        for (const auto& half : {left, right}) {
            heap.push_back(half);
            std::push_heap(heap.begin(), heap.end());
        }
        result.evaluations += 30;
        std::tie(value, error) = totals();
    }
    if (!std::isfinite(value)) throw QuadratureError("integrand produced a non-finite value", value, error);
    result.value = value;
    result.error_estimate = error;
    result.intervals = heap.size();
    return result;
}

}  // namespace sdpbound
