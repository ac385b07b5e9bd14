#include "sdpbound/chernoff_bounds.hpp"

#include <cmath>
#include <string>

#include "sdpbound/error.hpp"

namespace sdpbound {
namespace {

DomainFlags classify(double threshold, double mu, double delta, double bound) {
    DomainFlags f;
    f.delta_in_range = delta > 0.0 && delta <= 1.0;
    f.delta_on_boundary = delta == 0.0 || delta == 1.0;
    f.threshold_positive = threshold > 0.0;
    f.threshold_below_mu = threshold < mu;
    f.vacuous = bound >= 1.0;
    return f;
}

BoundReport finish(BoundKind kind, double threshold, double mu, double delta, double log_bound) {
    BoundReport r;
    r.kind = kind;
    r.event_threshold = threshold;
    r.mu_used = mu;
    r.delta = delta;
    r.log_bound = log_bound;
    r.bound = std::exp(log_bound);
    r.unsimplified_log_bound = chernoff_lower_tail_log(mu, delta);
    r.flags = classify(threshold, mu, delta, r.bound);
    r.exact_zero_event = threshold <= 0.0;
    return r;
}

}  // namespace

const char* to_string(BoundKind kind) {
    switch (kind) {
    case BoundKind::hazard_theorem: return "hazard";
    case BoundKind::reliability_theorem: return "reliability";
    case BoundKind::reference: return "reference";
    }
    return "unknown";
}

double chernoff_lower_tail_log(double mu, double delta) {
    if (!(mu > 0.0)) throw DomainError("Chernoff mean must be positive, got " + std::to_string(mu));
    return -mu * delta * delta / 2.0;
}

double chernoff_lower_tail(double mu, double delta) {
    return std::exp(chernoff_lower_tail_log(mu, delta));
}

double hazard_event_threshold(const WeibullParams& manual, const WeibullParams& residual, TimePoint t) {
    return weibull_hazard(manual, t) - weibull_hazard(residual, t);
}

double reliability_event_threshold(const WeibullParams& manual, const WeibullParams& residual,
                                   TimePoint t) {
    return weibull_hazard(manual, t) / (manual.shape_m() + 1.0) -
           weibull_hazard(residual, t) / (residual.shape_m() + 1.0);
}

BoundReport hazard_rate_bound(const FailurePopulation& pop, const WeibullParams& manual,
                              const WeibullParams& residual, TimePoint t) {
    const double residual_hazard = weibull_hazard(residual, t);
    const double manual_hazard = weibull_hazard(manual, t);
    const double lp = expected_failures(pop);
    const double mu = residual_hazard + lp;
    const double threshold = manual_hazard - residual_hazard;
    const double delta = 1.0 - threshold / mu;
    const double gap = lp - manual_hazard + 2.0 * residual_hazard;
    return finish(BoundKind::hazard_theorem, threshold, mu, delta, -(gap * gap) / (2.0 * mu));
}

BoundReport reliability_bound(const FailurePopulation& pop, const WeibullParams& manual,
                              const WeibullParams& residual, TimePoint t, ReliabilityBoundMode mode) {
    const double threshold = reliability_event_threshold(manual, residual, t);
    const double mu = expected_sdp_reliability_bound({residual, pop}, t, mode);
    if (!std::isfinite(mu) || !(mu > 0.0))
        throw DomainError(std::string("expected-reliability bound (") + to_string(mode) +
                          ") is not representable at t = " + std::to_string(t.value()));
    const double delta = 1.0 - threshold / mu;
    const double gap = mu - threshold;
    auto r = finish(BoundKind::reliability_theorem, threshold, mu, delta, -(gap * gap) / (2.0 * mu));
    r.mode = mode;
    r.note = "mu is the expected reliability (a probability) while the threshold counts failures; "
             "substituted without rescaling";
    return r;
}

BoundReport reference_chernoff_bound(const FailurePopulation& pop, double threshold) {
    const double mu = expected_failures(pop);
    const double delta = 1.0 - threshold / mu;
    auto r = finish(BoundKind::reference, threshold, mu, delta, chernoff_lower_tail_log(mu, delta));
    if (threshold >= mu) {
        // Outside the lower-tail regime: nothing better than the trivial bound.
        r.log_bound = 0.0;
        r.bound = 1.0;
        r.flags.vacuous = true;
    }
    return r;
}

}  // namespace sdpbound
