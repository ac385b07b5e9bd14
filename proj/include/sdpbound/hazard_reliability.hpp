#pragma once

#include <cstdint>
#include <functional>

#include "sdpbound/failure_model.hpp"

namespace sdpbound {

/// Weibull hazard z(t) = K t^m with K > 0, m > -1.
class WeibullParams {
public:
    WeibullParams(double scale_k, double shape_m);

    double scale_k() const noexcept { return scale_k_; }
    double shape_m() const noexcept { return shape_m_; }

    friend bool operator==(const WeibullParams&, const WeibullParams&) = default;

private:
    double scale_k_;
    double shape_m_;
};

/// Time since deployment at t = 0. Non-negative; hazards additionally need t > 0.
class TimePoint {
public:
    explicit TimePoint(double t);

    double value() const noexcept { return t_; }

private:
    double t_;
};

/// z_hat(t) = X + K_hat t^m_hat: hidden misclassification failures on top of the
/// residual Weibull hazard of the modules that went through testing.
struct CombinedHazardModel {
    WeibullParams residual;
    FailurePopulation population;
};

double weibull_hazard(const WeibullParams& params, TimePoint t);

/// x + K_hat t^m_hat for a realized failure count 0 <= x <= l.
double combined_hazard(const CombinedHazardModel& model, std::uint64_t x, TimePoint t);

/// l p + K_hat t^m_hat.
double expected_combined_hazard(const CombinedHazardModel& model, TimePoint t);

/// Integral of K x^m over [0, t]: K t^(m+1) / (m+1).
double cumulative_weibull_hazard(const WeibullParams& params, TimePoint t);

double weibull_log_reliability(const WeibullParams& params, TimePoint t);
double weibull_reliability(const WeibullParams& params, TimePoint t);

struct IntegratedReliability {
    double cumulative_hazard = 0.0;
    double error_estimate = 0.0;
    double log_reliability = 0.0;
    double reliability = 1.0;
};

/// exp(-integral_0^t hazard) by adaptive quadrature; the independent cross-check for
/// the closed forms. Integrates over u in [0, 1] with x = t u^2, which removes an
/// x^-1/2 endpoint singularity and weakens anything stronger.
IntegratedReliability reliability_by_integration(const std::function<double(double)>& hazard,
                                                 TimePoint t, double tolerance = 1e-10);

/// Reliability with X frozen at x: exp(-[x t + K_hat t^(m_hat+1)/(m_hat+1)]).
double sdp_log_reliability(const CombinedHazardModel& model, std::uint64_t x, TimePoint t);
double sdp_reliability(const CombinedHazardModel& model, std::uint64_t x, TimePoint t);

/// E[R_hat(t)] = exp(-A') (1 + p (e^-t - 1))^l with A' the residual cumulative hazard.
double expected_sdp_log_reliability_exact(const CombinedHazardModel& model, TimePoint t);
double expected_sdp_reliability_exact(const CombinedHazardModel& model, TimePoint t);

// as_stated keeps the printed +A' in the exponent; sign_corrected uses -A'.
enum class ReliabilityBoundMode { as_stated, sign_corrected };

const char* to_string(ReliabilityBoundMode mode);

/// Upper bound on E[R_hat(t)] from 1 + x < e^x: exp(l p (e^-t - 1) -/+ A').
double expected_sdp_log_reliability_bound(const CombinedHazardModel& model, TimePoint t,
                                          ReliabilityBoundMode mode);
double expected_sdp_reliability_bound(const CombinedHazardModel& model, TimePoint t,
                                      ReliabilityBoundMode mode);

}  // namespace sdpbound
