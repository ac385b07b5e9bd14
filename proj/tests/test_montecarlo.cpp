#include "doctest.h"

#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "sdpbound/error.hpp"
#include "sdpbound/montecarlo.hpp"

using namespace sdpbound;

namespace {

bool covers(const MonteCarloEstimate& e, double value) {
    return e.ci_low <= value && value <= e.ci_high;
}

bool identical(const MonteCarloEstimate& a, const MonteCarloEstimate& b) {
    return a.estimate == b.estimate && a.std_error == b.std_error && a.ci_low == b.ci_low &&
           a.ci_high == b.ci_high && a.n_samples == b.n_samples && a.seed == b.seed &&
           a.event_threshold == b.event_threshold;
}

BoundReport bound_at(double threshold, double bound) {
    BoundReport r;
    r.kind = BoundKind::hazard_theorem;
    r.event_threshold = threshold;
    r.bound = bound;
    r.log_bound = std::log(bound);
    r.exact_zero_event = threshold <= 0.0;
    return r;
}

MonteCarloEstimate interval(double threshold, double lo, double est, double hi) {
    MonteCarloEstimate e;
    e.estimate = est;
    e.ci_low = lo;
    e.ci_high = hi;
    e.n_samples = 1000;
    e.event_threshold = threshold;
    return e;
}

}  // namespace

TEST_CASE("estimators reject fewer than 1000 samples") {
    MonteCarloConfig cfg;
    cfg.n_samples = 999;
    CHECK_THROWS_AS(estimate_tail_probability({10, 0.5}, 3, cfg), DomainError);
    CHECK_THROWS_AS(estimate_expected_reliability({{1, 1}, {10, 0.5}}, TimePoint(1), cfg), DomainError);
    CHECK_THROWS_AS(estimate_reliability_exceedance({{1, 1}, {10, 0.5}}, {2, 1}, TimePoint(1), cfg), DomainError);
}

TEST_CASE("estimate_tail_probability examples") {
    MonteCarloConfig cfg;
    cfg.n_samples = 1000;
    const auto zero = estimate_tail_probability({10, 0.5}, 0.0, cfg);
    CHECK(zero.estimate == 0.0);
    CHECK(zero.ci_low == 0.0);
    CHECK(zero.ci_high == 0.0);
    CHECK(zero.std_error == 0.0);
    CHECK(*zero.event_threshold == 0.0);
    CHECK(estimate_tail_probability({10, 0.5}, -2.5, cfg).estimate == 0.0);

    cfg.n_samples = 1000000;
    cfg.seed = 1;
    cfg.workers = 4;
    const auto mid = estimate_tail_probability({10, 0.5}, 3.0, cfg);
    CHECK(mid.estimate == doctest::Approx(0.0547).epsilon(0.01));
    CHECK(covers(mid, 0.0546875));
    CHECK(mid.ci_low <= mid.estimate);
    CHECK(mid.estimate <= mid.ci_high);

    cfg.n_samples = 10000000;
    const auto tail = estimate_tail_probability({100, 0.1}, 2.0, cfg);
    CHECK(tail.estimate == doctest::Approx(3.22e-4).epsilon(0.05));
    CHECK(covers(tail, 3.2168805319411498e-4));
}

TEST_CASE("estimate_expected_reliability examples") {
    MonteCarloConfig cfg;
    cfg.n_samples = 1000;
    const CombinedHazardModel model{{1, 1}, {20, 0.2}};
    const auto at_zero = estimate_expected_reliability(model, TimePoint(0), cfg);
    CHECK(at_zero.estimate == 1.0);
    CHECK(at_zero.std_error == 0.0);
    CHECK_FALSE(at_zero.event_threshold.has_value());

    cfg.n_samples = 1000000;
    cfg.seed = 3;
    const auto e = estimate_expected_reliability(model, TimePoint(0.5), cfg);
    CHECK(covers(e, 0.17131382975544243));
    CHECK(std::abs(e.estimate - 0.17131382975544243) <= 3 * e.std_error);

    cfg.n_samples = 5000;
    const auto forced = estimate_expected_reliability(model, TimePoint(0.5), cfg, [](RandomStream&) { return 0ull; });
    CHECK(forced.estimate == doctest::Approx(weibull_reliability(model.residual, TimePoint(0.5))).epsilon(1e-15));
    CHECK(forced.std_error == 0.0);
}

TEST_CASE("estimate_reliability_exceedance examples") {
    MonteCarloConfig cfg;
    cfg.n_samples = 100000;
    cfg.seed = 9;
    const CombinedHazardModel same{{1.5, 0.5}, {10, 0.5}};
    const auto none = estimate_reliability_exceedance(same, {1.5, 0.5}, TimePoint(2), cfg);
    CHECK(none.estimate == 0.0);
    CHECK(*none.event_threshold == 0.0);

    cfg.n_samples = 1000000;
    const CombinedHazardModel model{{1, 1}, {10, 0.5}};
    const auto e = estimate_reliability_exceedance(model, {2, 1}, TimePoint(2), cfg);
    CHECK(*e.event_threshold == 1.0);
    CHECK(covers(e, std::ldexp(1.0, -10)));
}

TEST_CASE("exceedance trend is non-increasing along t") {
    const CombinedHazardModel model{{1, 1}, {10, 0.1}};
    const WeibullParams manual(2, 0);
    MonteCarloConfig cfg;
    cfg.n_samples = 200000;
    cfg.seed = 4;
    double previous = 1.0;
    double previous_exact = 1.0;
    for (double t : {0.5, 1.0, 2.0, 3.0, 4.0, 6.0}) {
        const auto e = estimate_reliability_exceedance(model, manual, TimePoint(t), cfg);
        const double exact = binomial_cdf_below(model.population, *e.event_threshold);
        CHECK(e.estimate <= previous);
        CHECK(exact <= previous_exact);
        CHECK(covers(e, exact));
        previous = e.estimate;
        previous_exact = exact;
    }
}

TEST_CASE("results do not depend on the worker count") {
    MonteCarloConfig a;
    a.n_samples = 300001;
    a.seed = 77;
    a.workers = 1;
    MonteCarloConfig b = a;
    b.workers = 4;
    const FailurePopulation pop(100, 0.1);
    const CombinedHazardModel model{{1, 0.5}, pop};
    CHECK(identical(estimate_tail_probability(pop, 7.5, a), estimate_tail_probability(pop, 7.5, b)));
    CHECK(identical(estimate_expected_reliability(model, TimePoint(0.3), a),
                    estimate_expected_reliability(model, TimePoint(0.3), b)));
    CHECK(identical(estimate_reliability_exceedance(model, {12, 0}, TimePoint(1), a),
                    estimate_reliability_exceedance(model, {12, 0}, TimePoint(1), b)));
    CHECK(draw_failures(pop, a) == draw_failures(pop, b));

    MonteCarloConfig c = a;
    c.seed = 78;
    CHECK_FALSE(identical(estimate_tail_probability(pop, 7.5, a), estimate_tail_probability(pop, 7.5, c)));
}

TEST_CASE("exceedance and tail estimators use identical per-draw indicators") {
    MonteCarloConfig cfg;
    cfg.n_samples = 70000;
    cfg.seed = 21;
    for (double K : {1.0, 2.0, 5.0}) {
        for (double m : {0.0, 0.5, 1.0}) {
            for (double t : {0.5, 1.0, 2.0, 4.0}) {
                const CombinedHazardModel model{{1, 0.5}, {50, 0.1}};
                const WeibullParams manual(K, m);
                const TimePoint tp(t);
                const double c = reliability_event_threshold(manual, model.residual, tp);
                for (auto x : draw_failures(model.population, cfg))
                    REQUIRE(exceedance_event(model, manual, x, tp) == tail_event(x, c));
                const auto ex = estimate_reliability_exceedance(model, manual, tp, cfg);
                const auto tail = estimate_tail_probability(model.population, c, cfg);
                if (c > 0.0) CHECK(identical(ex, tail));
                else CHECK(ex.estimate == 0.0);
            }
        }
    }
}

TEST_CASE("tail-probability interval coverage across seeds") {
    // Distinct events Pr[X < c] over the l <= 100 part of the default sweep grid.
    std::set<std::tuple<std::uint64_t, double, double>> cases;
    for (std::uint64_t l : {10u, 100u})
        for (double p : {0.05, 0.1, 0.3})
            for (double K : {1.0, 2.0})
                for (double m : {0.0, 0.5})
                    for (double K_hat : {0.5, 1.0})
                        for (double m_hat : {0.0, 0.5})
                            for (double t : {1.0, 4.0, 16.0}) {
                                const double c = hazard_event_threshold({K, m}, {K_hat, m_hat}, TimePoint(t));
                                if (c > 0.0 && c <= static_cast<double>(l)) cases.insert({l, p, std::ceil(c)});
                            }
    REQUIRE(cases.size() > 20);
    const int seeds = 100;
    int covered_total = 0;
    for (const auto& [l, p, c] : cases) {
        const FailurePopulation pop(l, p);
        const double exact = binomial_cdf_below(pop, c);
        int covered = 0;
        for (int seed = 0; seed < seeds; ++seed) {
            MonteCarloConfig cfg;
            cfg.n_samples = kBlockSize;
            cfg.seed = static_cast<std::uint64_t>(seed);
            if (covers(estimate_tail_probability(pop, c, cfg), exact)) ++covered;
        }
        covered_total += covered;
        if (covered < 93) MESSAGE("l=" << l << " p=" << p << " c=" << c << " covered " << covered << " of " << seeds);
        CHECK_MESSAGE(covered >= 85, "l=" << l << " p=" << p << " c=" << c << " covered=" << covered);
    }
    const double rate = static_cast<double>(covered_total) / (static_cast<double>(cases.size()) * seeds);
    MESSAGE("pooled coverage " << rate << " over " << cases.size() << " events");
    CHECK(rate >= 0.93);
}

TEST_CASE("audit_bound examples") {
    const auto canonical = audit_bound(bound_at(2.0, 0.015503853599009319), ExactProbability{3.2168805319411498e-4, 2.0});
    CHECK(canonical.verdict == Verdict::holds);
    CHECK(canonical.margin == doctest::Approx(1.5182165545815204e-2).epsilon(1e-12));
    CHECK(canonical.bound_value == 0.015503853599009319);

    CHECK(audit_bound(bound_at(1.0, 0.5), ExactProbability{0.7, 1.0}).verdict == Verdict::violated);
    CHECK(audit_bound(bound_at(1.0, 0.5), ExactProbability{0.5, 1.0}).verdict == Verdict::holds);
    CHECK(audit_bound(bound_at(1.0, 0.5), interval(1.0, 0.45, 0.5, 0.55)).verdict == Verdict::inconclusive);
    CHECK(audit_bound(bound_at(1.0, 0.5), interval(1.0, 0.3, 0.4, 0.45)).verdict == Verdict::holds);
    CHECK(audit_bound(bound_at(1.0, 0.5), interval(1.0, 0.51, 0.6, 0.7)).verdict == Verdict::violated);
    CHECK(audit_bound(bound_at(0.0, 0.9), ExactProbability{0.0, 0.0}).verdict == Verdict::exact_zero_event);
    CHECK(audit_bound(bound_at(-1.0, 0.9), ExactProbability{0.0, -1.0}).verdict == Verdict::exact_zero_event);
    CHECK(std::string(to_string(Verdict::exact_zero_event)) == "exact-zero-event");
}

TEST_CASE("audit_bound rejects estimates of a different event") {
    CHECK_THROWS_AS(audit_bound(bound_at(2.0, 0.1), ExactProbability{0.01, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(audit_bound(bound_at(2.0, 0.1), interval(2.5, 0.0, 0.01, 0.02)), std::invalid_argument);
    MonteCarloEstimate expectation;
    CHECK_THROWS_AS(audit_bound(bound_at(2.0, 0.1), expectation), std::invalid_argument);
}

TEST_CASE("property: audit never reports holds when the exact probability exceeds the bound") {
    RandomStream rng(123);
    for (int i = 0; i < 100000; ++i) {
        const double bound = rng.uniform();
        const double exact = rng.uniform();
        const double c = 1.0 + std::floor(10 * rng.uniform());
        const auto v = audit_bound(bound_at(c, bound), ExactProbability{exact, c});
        if (exact > bound) {
            REQUIRE(v.verdict != Verdict::holds);
            REQUIRE(v.verdict == Verdict::violated);
        } else {
            REQUIRE(v.verdict == Verdict::holds);
        }
        const double nudged = std::nextafter(bound, 2.0);
        REQUIRE(audit_bound(bound_at(c, bound), ExactProbability{nudged, c}).verdict != Verdict::holds);
    }
}
