#pragma once

#include <optional>
#include <string>

#include "sdpbound/failure_model.hpp"
#include "sdpbound/hazard_reliability.hpp"

namespace sdpbound {

enum class BoundKind { hazard_theorem, reliability_theorem, reference };

const char* to_string(BoundKind kind);

struct DomainFlags {
    bool delta_in_range = false;     // 0 < delta <= 1
    bool delta_on_boundary = false;  // delta exactly 0 or exactly 1
    bool threshold_positive = false;
    bool threshold_below_mu = false;
    bool vacuous = false;            // bound >= 1

    friend bool operator==(const DomainFlags&, const DomainFlags&) = default;
};

/// One evaluation of a lower-tail bound Pr[X < event_threshold] < bound.
struct BoundReport {
    BoundKind kind = BoundKind::reference;
    std::optional<ReliabilityBoundMode> mode;  // reliability theorem only
    double event_threshold = 0.0;
    double delta = 0.0;
    double mu_used = 0.0;
    double log_bound = 0.0;
    double bound = 1.0;
    // exp(-mu delta^2 / 2) evaluated from (mu, delta) directly, before simplification.
    double unsimplified_log_bound = 0.0;
    DomainFlags flags;
    // X >= 0, so a threshold <= 0 makes the event impossible. The formula is still recorded.
    bool exact_zero_event = false;
    std::string note;

    /// The probability the report asserts: 0 for an impossible event, else `bound`.
    double effective_bound() const { return exact_zero_event ? 0.0 : bound; }
};

/// exp(-mu delta^2 / 2). Throws DomainError for mu <= 0.
double chernoff_lower_tail(double mu, double delta);
double chernoff_lower_tail_log(double mu, double delta);

/// K t^m - K_hat t^m_hat: the cutoff on X in Pr[X + K_hat t^m_hat < K t^m].
double hazard_event_threshold(const WeibullParams& manual, const WeibullParams& residual,
                              TimePoint t);

/// K t^m/(m+1) - K_hat t^m_hat/(m_hat+1): the cutoff on X in Pr[R_hat(t) > R(t)].
double reliability_event_threshold(const WeibullParams& manual, const WeibullParams& residual,
                                   TimePoint t);

/// Hazard-rate bound with mu = K_hat t^m_hat + l p substituted into the Chernoff tail.
BoundReport hazard_rate_bound(const FailurePopulation& pop, const WeibullParams& manual,
                              const WeibullParams& residual, TimePoint t);

/// Reliability bound with mu_R = expected_sdp_reliability_bound(mode) substituted for mu.
BoundReport reliability_bound(const FailurePopulation& pop, const WeibullParams& manual,
                              const WeibullParams& residual, TimePoint t,
                              ReliabilityBoundMode mode);

/// Textbook Chernoff lower tail for X alone with mu = l p.
BoundReport reference_chernoff_bound(const FailurePopulation& pop, double threshold);

}  // namespace sdpbound
