#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "sdpbound/chernoff_bounds.hpp"
#include "sdpbound/failure_model.hpp"
#include "sdpbound/hazard_reliability.hpp"

namespace sdpbound {

struct MonteCarloEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;   // 95%
    double ci_high = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    // Cutoff of the tail event Pr[X < c] this estimate refers to; empty for expectations.
    std::optional<double> event_threshold;
};

struct ExactProbability {
    double value = 0.0;
    double event_threshold = 0.0;
};

using EmpiricalProbability = std::variant<MonteCarloEstimate, ExactProbability>;

struct MonteCarloConfig {
    std::uint64_t n_samples = 100000;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    SamplingMethod method = SamplingMethod::inversion;
};

/// Samples are generated in fixed blocks of this many draws, block b from
/// RandomStream::substream(seed, b). Results never depend on the worker count.
inline constexpr std::uint64_t kBlockSize = 1 << 16;

/// Replacement for the binomial draw of X; used to force degenerate draws in tests.
using FailureDraw = std::function<std::uint64_t(RandomStream&)>;

bool tail_event(std::uint64_t x, double threshold);

/// R_hat(t) > R(t) for the frozen draw x, compared on log-reliabilities.
bool exceedance_event(const CombinedHazardModel& model, const WeibullParams& manual,
                      std::uint64_t x, TimePoint t);

/// The exact sequence of X draws the estimators below consume for `config`.
std::vector<std::uint64_t> draw_failures(const FailurePopulation& pop,
                                         const MonteCarloConfig& config);

/// Fraction of draws with X < threshold, Wilson 95% interval. Exactly 0 with a
/// degenerate interval when threshold <= 0.
MonteCarloEstimate estimate_tail_probability(const FailurePopulation& pop, double threshold,
                                             const MonteCarloConfig& config,
                                             const FailureDraw& draw = {});

/// Mean of sdp_reliability(x, t) over draws, normal 95% interval.
MonteCarloEstimate estimate_expected_reliability(const CombinedHazardModel& model, TimePoint t,
                                                 const MonteCarloConfig& config,
                                                 const FailureDraw& draw = {});

/// Fraction of draws with R_hat(t) > R(t). Carries the equivalent tail threshold on X.
MonteCarloEstimate estimate_reliability_exceedance(const CombinedHazardModel& model,
                                                   const WeibullParams& manual, TimePoint t,
                                                   const MonteCarloConfig& config,
                                                   const FailureDraw& draw = {});

enum class Verdict { holds, violated, inconclusive, exact_zero_event };

const char* to_string(Verdict verdict);

struct AuditVerdict {
    Verdict verdict = Verdict::inconclusive;
    EmpiricalProbability empirical;
    double bound_value = 0.0;
    double margin = 0.0;  // bound - upper interval edge
};

/// Compares a bound with an empirical or exact probability of the same event.
/// Throws std::invalid_argument when the event thresholds differ.
AuditVerdict audit_bound(const BoundReport& report, const EmpiricalProbability& empirical);

}  // namespace sdpbound
