#include "sdpbound/hazard_reliability.hpp"

#include <cmath>
#include <string>

#include "sdpbound/error.hpp"
#include "sdpbound/quadrature.hpp"

namespace sdpbound {
namespace {

double require_positive_time(TimePoint t) {
    if (!(t.value() > 0.0)) throw DomainError("hazard needs t > 0, got t = " + std::to_string(t.value()));
    return t.value();
}

void require_count(const CombinedHazardModel& model, std::uint64_t x) {
    if (x > model.population.l())
        throw DomainError("failure count x = " + std::to_string(x) + " exceeds l = " +
                          std::to_string(model.population.l()));
}

}  // namespace

WeibullParams::WeibullParams(double scale_k, double shape_m) : scale_k_(scale_k), shape_m_(shape_m) {
    if (!(scale_k > 0.0) || !std::isfinite(scale_k))
        throw DomainError("Weibull scale K must be positive and finite, got " + std::to_string(scale_k));
    if (!(shape_m > -1.0) || !std::isfinite(shape_m))
        throw DomainError("Weibull shape m must exceed -1, got " + std::to_string(shape_m));
}

TimePoint::TimePoint(double t) : t_(t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and non-negative, got " + std::to_string(t));
}

const char* to_string(ReliabilityBoundMode mode) {
    return mode == ReliabilityBoundMode::as_stated ? "as-stated" : "sign-corrected";
}

double weibull_hazard(const WeibullParams& params, TimePoint t) {
    return params.scale_k() * std::pow(require_positive_time(t), params.shape_m());
}

double combined_hazard(const CombinedHazardModel& model, std::uint64_t x, TimePoint t) {
    require_count(model, x);
    return static_cast<double>(x) + weibull_hazard(model.residual, t);
}

double expected_combined_hazard(const CombinedHazardModel& model, TimePoint t) {
    return expected_failures(model.population) + weibull_hazard(model.residual, t);
}

double cumulative_weibull_hazard(const WeibullParams& params, TimePoint t) {
    if (t.value() == 0.0) return 0.0;
    const double power = params.shape_m() + 1.0;
    return params.scale_k() * std::pow(t.value(), power) / power;
}

double weibull_log_reliability(const WeibullParams& params, TimePoint t) {
    return -cumulative_weibull_hazard(params, t);
}

double weibull_reliability(const WeibullParams& params, TimePoint t) {
    return std::exp(weibull_log_reliability(params, t));
}

IntegratedReliability reliability_by_integration(const std::function<double(double)>& hazard,
                                                 TimePoint t, double tolerance) {
    if (!(tolerance > 0.0)) throw DomainError("quadrature tolerance must be positive");
    IntegratedReliability out;
    const double horizon = t.value();
    if (horizon == 0.0) return out;
    // x = t u^2, dx = 2 t u du
    auto integrand = [&hazard, horizon](double u) { return 2.0 * horizon * u * hazard(horizon * u * u); };
    QuadratureOptions options;
    options.abs_tolerance = tolerance;
    const auto q = integrate_gk15(integrand, 0.0, 1.0, options);
    out.cumulative_hazard = q.value;
    out.error_estimate = q.error_estimate;
    out.log_reliability = -q.value;
    out.reliability = std::exp(-q.value);
    return out;
}

double sdp_log_reliability(const CombinedHazardModel& model, std::uint64_t x, TimePoint t) {
    require_count(model, x);
    return -(static_cast<double>(x) * t.value() + cumulative_weibull_hazard(model.residual, t));
}

double sdp_reliability(const CombinedHazardModel& model, std::uint64_t x, TimePoint t) {
    return std::exp(sdp_log_reliability(model, x, t));
}

double expected_sdp_log_reliability_exact(const CombinedHazardModel& model, TimePoint t) {
    const auto& pop = model.population;
    // l log(1 + p (e^-t - 1)) - A'
    return static_cast<double>(pop.l()) * std::log1p(pop.p() * std::expm1(-t.value())) -
           cumulative_weibull_hazard(model.residual, t);
}

double expected_sdp_reliability_exact(const CombinedHazardModel& model, TimePoint t) {
    return std::exp(expected_sdp_log_reliability_exact(model, t));
}

double expected_sdp_log_reliability_bound(const CombinedHazardModel& model, TimePoint t,
                                          ReliabilityBoundMode mode) {
    const double mgf_part = expected_failures(model.population) * std::expm1(-t.value());
    const double residual = cumulative_weibull_hazard(model.residual, t);
    return mode == ReliabilityBoundMode::as_stated ? mgf_part + residual : mgf_part - residual;
}

double expected_sdp_reliability_bound(const CombinedHazardModel& model, TimePoint t,
                                      ReliabilityBoundMode mode) {
    return std::exp(expected_sdp_log_reliability_bound(model, t, mode));
}

}  // namespace sdpbound
