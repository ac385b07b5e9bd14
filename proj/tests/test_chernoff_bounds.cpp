#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "oracle.hpp"
#include "sdpbound/chernoff_bounds.hpp"
#include "sdpbound/error.hpp"

using namespace sdpbound;

namespace {

struct GridPoint {
    std::uint64_t l;
    double p, K, m, K_hat, m_hat, t;
};

std::vector<GridPoint> grid() {
    std::vector<GridPoint> out;
    for (std::uint64_t l : {10u, 100u, 1000u})
        for (double p : {0.05, 0.1, 0.3})
            for (double K : {1.0, 2.0})
                for (double m : {0.0, 0.5})
                    for (double K_hat : {0.5, 1.0})
                        for (double m_hat : {0.0, 0.5})
                            for (double t : {1.0, 4.0, 16.0}) out.push_back({l, p, K, m, K_hat, m_hat, t});
    return out;
}

// Relative disagreement of exp(a) and exp(b). When both lie below the smallest normal
// double they materialize as 0 (or denormals), so the exponents are compared instead.
double log_rel_err(double a, double b) {
    if (a == b) return 0.0;
    if (std::max(a, b) < std::log(std::numeric_limits<double>::min())) return std::abs(a - b) / std::abs(b);
    return std::abs(std::expm1(a - b));
}

}  // namespace

TEST_CASE("chernoff_lower_tail") {
    CHECK(oracle::rel_err(chernoff_lower_tail(10, 0.8), oracle::exp_of(oracle::Real(-32) / 10)) <= 1e-15);
    CHECK(chernoff_lower_tail(5, 0.0) == 1.0);
    CHECK(chernoff_lower_tail(2, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(chernoff_lower_tail(0, 0.5), DomainError);
    CHECK_THROWS_AS(chernoff_lower_tail(-1, 0.5), DomainError);
}

TEST_CASE("hazard_event_threshold") {
    CHECK(hazard_event_threshold({2, 0.5}, {1, 0.5}, TimePoint(4)) == 2.0);
    CHECK(hazard_event_threshold({1.3, 0.7}, {1.3, 0.7}, TimePoint(3)) == 0.0);
    CHECK(hazard_event_threshold({1, 0}, {3, 0.5}, TimePoint(4)) < 0.0);
    CHECK_THROWS_AS(hazard_event_threshold({1, 0}, {1, 0}, TimePoint(0)), DomainError);
}

TEST_CASE("hazard_rate_bound at the canonical point") {
    const auto r = hazard_rate_bound({100, 0.1}, {2, 0.5}, {1, 0.5}, TimePoint(4));
    CHECK(r.kind == BoundKind::hazard_theorem);
    CHECK(r.event_threshold == 2.0);
    CHECK(r.mu_used == doctest::Approx(12.0).epsilon(1e-15));
    CHECK(r.delta == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(oracle::rel_err(r.bound, oracle::exp_of(oracle::Real(-100) / 24)) <= 1e-13);
    CHECK(r.bound == doctest::Approx(0.015503853599009319).epsilon(1e-13));
    CHECK(log_rel_err(r.log_bound, r.unsimplified_log_bound) <= 1e-12);
    CHECK(r.flags.delta_in_range);
    CHECK_FALSE(r.flags.delta_on_boundary);
    CHECK(r.flags.threshold_positive);
    CHECK(r.flags.threshold_below_mu);
    CHECK_FALSE(r.flags.vacuous);
    CHECK_FALSE(r.exact_zero_event);
    CHECK(r.effective_bound() == r.bound);
    CHECK((1.0 - r.delta) * r.mu_used == doctest::Approx(r.event_threshold).epsilon(1e-14));
}

TEST_CASE("hazard_rate_bound with identical hazards") {
    const auto r = hazard_rate_bound({100, 0.1}, {1, 0.5}, {1, 0.5}, TimePoint(4));
    CHECK(r.event_threshold == 0.0);
    CHECK_FALSE(r.flags.threshold_positive);
    CHECK(r.exact_zero_event);
    CHECK(std::isfinite(r.log_bound));
    CHECK(r.effective_bound() == 0.0);
    CHECK(r.delta == 1.0);
    CHECK(r.flags.delta_on_boundary);
}

TEST_CASE("hazard_rate_bound at the delta = 0 boundary") {
    // A = 1, B = 7, mu = 5 + 1 = 6 = B - A.
    const auto r = hazard_rate_bound({10, 0.5}, {7, 0}, {1, 0}, TimePoint(1));
    CHECK(r.delta == 0.0);
    CHECK(r.bound == 1.0);
    CHECK_FALSE(r.flags.delta_in_range);
    CHECK(r.flags.delta_on_boundary);
    CHECK_FALSE(r.flags.threshold_below_mu);
    CHECK(r.flags.vacuous);
}

TEST_CASE("hazard_rate_bound with delta below zero stays finite") {
    const auto r = hazard_rate_bound({10, 0.1}, {20, 0}, {1, 0}, TimePoint(1));
    CHECK(r.delta < 0.0);
    CHECK_FALSE(r.flags.delta_in_range);
    CHECK(std::isfinite(r.log_bound));
    CHECK(r.bound > 0.0);
}

TEST_CASE("reliability_event_threshold and bound") {
    CHECK(reliability_event_threshold({2, 1}, {1, 1}, TimePoint(2)) == 1.0);
    CHECK(reliability_event_threshold({1.5, 0.3}, {1.5, 0.3}, TimePoint(2)) == 0.0);

    const FailurePopulation pop(20, 0.2);
    for (auto mode : {ReliabilityBoundMode::as_stated, ReliabilityBoundMode::sign_corrected}) {
        const auto r = reliability_bound(pop, {2, 1}, {1, 1}, TimePoint(2), mode);
        CHECK(r.kind == BoundKind::reliability_theorem);
        REQUIRE(r.mode.has_value());
        CHECK(*r.mode == mode);
        CHECK(r.event_threshold == 1.0);
        CHECK(r.mu_used == expected_sdp_reliability_bound({{1, 1}, pop}, TimePoint(2), mode));
        CHECK(r.delta == doctest::Approx(1.0 - 1.0 / r.mu_used).epsilon(1e-14));
        CHECK(log_rel_err(r.log_bound, r.unsimplified_log_bound) <= 1e-12);
        CHECK_FALSE(r.note.empty());
    }

    const auto zero = reliability_bound(pop, {1, 1}, {1, 1}, TimePoint(2), ReliabilityBoundMode::sign_corrected);
    CHECK(zero.exact_zero_event);
    CHECK(zero.effective_bound() == 0.0);
}

TEST_CASE("reliability_bound at the delta = 0 boundary") {
    // m = m_hat = 0 and t = 1 make the threshold K - K_hat. A power-of-two K_hat far above
    // mu_R's ulp keeps K_hat + mu_R exact, so the threshold reproduces mu_R bit for bit.
    const FailurePopulation pop(20, 0.2);
    const WeibullParams residual(std::ldexp(1.0, -20), 0);
    const double mu = expected_sdp_reliability_bound({residual, pop}, TimePoint(1), ReliabilityBoundMode::sign_corrected);
    const double K = residual.scale_k() + mu;
    REQUIRE(K - residual.scale_k() == mu);
    const auto r = reliability_bound(pop, {K, 0}, residual, TimePoint(1), ReliabilityBoundMode::sign_corrected);
    CHECK(r.delta == 0.0);
    CHECK(r.bound == 1.0);
    CHECK(r.flags.delta_on_boundary);
    CHECK_FALSE(r.flags.delta_in_range);
}

TEST_CASE("reference_chernoff_bound") {
    const auto r = reference_chernoff_bound({100, 0.1}, 2.0);
    CHECK(r.delta == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(oracle::rel_err(r.bound, oracle::exp_of(oracle::Real(-32) / 10)) <= 1e-13);
    CHECK(r.flags.delta_in_range);

    const auto zero = reference_chernoff_bound({100, 0.1}, 0.0);
    CHECK(zero.exact_zero_event);
    CHECK(zero.effective_bound() == 0.0);

    const auto edge = reference_chernoff_bound({100, 0.1}, expected_failures({100, 0.1}));
    CHECK(edge.bound == 1.0);
    CHECK(edge.flags.vacuous);
    CHECK_FALSE(edge.flags.threshold_below_mu);

    const auto above = reference_chernoff_bound({10, 0.5}, 8.0);
    CHECK(above.bound == 1.0);
    CHECK(above.log_bound == 0.0);
}

TEST_CASE("property: simplified and unsimplified forms agree over the grid") {
    int count = 0;
    for (const auto& g : grid()) {
        const FailurePopulation pop(g.l, g.p);
        const WeibullParams manual(g.K, g.m), residual(g.K_hat, g.m_hat);
        const TimePoint tp(g.t);
        const auto h = hazard_rate_bound(pop, manual, residual, tp);
        CHECK(log_rel_err(h.log_bound, h.unsimplified_log_bound) <= 1e-12);
        CHECK(std::isfinite(h.log_bound));
        if (h.flags.delta_in_range) {
            CHECK(h.bound > 0.0);
            CHECK(h.bound <= 1.0);
            CHECK((1.0 - h.delta) * h.mu_used == doctest::Approx(h.event_threshold).epsilon(1e-12).scale(h.mu_used));
        }
        for (auto mode : {ReliabilityBoundMode::as_stated, ReliabilityBoundMode::sign_corrected}) {
            const auto r = reliability_bound(pop, manual, residual, tp, mode);
            CHECK(log_rel_err(r.log_bound, r.unsimplified_log_bound) <= 1e-12);
            CHECK(std::isfinite(r.log_bound));
        }
        ++count;
    }
    CHECK(count == 432);
}

TEST_CASE("property: hazard bound strictly decreases in l when lp + 2A > B") {
    for (const auto& g : grid()) {
        if (g.l != 10) continue;
        const WeibullParams manual(g.K, g.m), residual(g.K_hat, g.m_hat);
        const TimePoint tp(g.t);
        const double A = weibull_hazard(residual, tp), B = weibull_hazard(manual, tp);
        bool applicable = true;
        std::vector<double> bounds;
        for (std::uint64_t l : {10u, 100u, 1000u}) {
            applicable = applicable && (l * g.p + 2 * A > B);
            bounds.push_back(hazard_rate_bound({l, g.p}, manual, residual, tp).bound);
        }
        if (!applicable) continue;
        CHECK(bounds[1] < bounds[0]);
        CHECK(bounds[2] < bounds[1]);
    }
}

TEST_CASE("property: exact tail never exceeds the in-domain reference bound") {
    int in_domain = 0;
    for (const auto& g : grid()) {
        const FailurePopulation pop(g.l, g.p);
        const TimePoint tp(g.t);
        for (double c : {hazard_event_threshold({g.K, g.m}, {g.K_hat, g.m_hat}, tp),
                         reliability_event_threshold({g.K, g.m}, {g.K_hat, g.m_hat}, tp)}) {
            const auto r = reference_chernoff_bound(pop, c);
            if (!(r.flags.delta_in_range && r.flags.threshold_positive)) continue;
            ++in_domain;
            CHECK(binomial_cdf_below(pop, c) <= r.bound);
        }
    }
    CHECK(in_domain > 0);
}
