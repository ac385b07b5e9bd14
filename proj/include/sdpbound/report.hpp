#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sdpbound/chernoff_bounds.hpp"
#include "sdpbound/montecarlo.hpp"
#include "sdpbound/prediction_ingest.hpp"

namespace sdpbound {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Raw model parameters as supplied by the user; validated by `validate_parameters`.
/// K/m describe the manually tested software, K_hat/m_hat the residual hazard of the
/// SDP-tested one.
struct ModelParameters {
    std::uint64_t l = 0;
    double p = 0.0;
    double K = 0.0;
    double m = 0.0;
    double K_hat = 0.0;
    double m_hat = 0.0;

    friend bool operator==(const ModelParameters&, const ModelParameters&) = default;
};

/// Throws DomainError naming the offending parameter.
void validate_parameters(const ModelParameters& params);

/// Where p came from.
struct ProbabilitySource {
    std::string kind = "literal";  // literal | counts | confusion-file | records-file
    std::string path;
    std::optional<ConfusionCounts> counts;
};

struct EvaluationOptions {
    std::uint64_t samples = 100000;  // 0 disables Monte Carlo confirmation
    std::uint64_t seed = 0;
    unsigned workers = 1;
    bool as_stated = true;
    bool sign_corrected = true;
};

struct ReliabilityBoundRecord {
    BoundReport report;
    AuditVerdict audit;                       // against the exact tail probability
    std::optional<AuditVerdict> sampled_audit;  // against the exceedance estimate
};

/// Everything evaluated at one (parameters, t) point.
struct PointRecord {
    ModelParameters params;
    double t = 0.0;

    double expected_failures = 0.0;
    double manual_hazard = 0.0;
    double residual_hazard = 0.0;
    double expected_combined_hazard = 0.0;
    double manual_reliability = 0.0;
    double residual_reliability = 0.0;
    double expected_sdp_reliability = 0.0;
    std::optional<double> reliability_bound_as_stated;
    std::optional<double> reliability_bound_sign_corrected;

    BoundReport hazard_bound;
    double hazard_exact = 0.0;
    AuditVerdict hazard_audit;
    std::optional<MonteCarloEstimate> hazard_sampled;
    std::optional<AuditVerdict> hazard_sampled_audit;

    double reliability_threshold = 0.0;
    double reliability_exact = 0.0;
    std::vector<ReliabilityBoundRecord> reliability_bounds;  // one per requested mode
    std::optional<MonteCarloEstimate> exceedance_sampled;

    BoundReport reference_bound;
    AuditVerdict reference_audit;

    std::optional<MonteCarloEstimate> reliability_sampled;
    std::vector<std::string> warnings;
};

struct RunReport {
    std::string toolkit = "sdpbound";
    std::string version = kToolkitVersion;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    std::string mode = "both";
    ModelParameters params;
    std::vector<double> t;
    ProbabilitySource p_source;
    std::optional<AssumptionVerdict> assumptions;
    std::vector<PointRecord> points;
};

std::string mode_name(const EvaluationOptions& options);

PointRecord evaluate_point(const ModelParameters& params, double t, const EvaluationOptions& options);

RunReport run_analysis(const ModelParameters& params, const std::vector<double>& t,
                       const EvaluationOptions& options, const ProbabilitySource& source = {});

struct SweepGrid {
    std::vector<std::uint64_t> l;
    std::vector<double> p, K, m, K_hat, m_hat, t;
    EvaluationOptions options;
};

/// l, p, K, m and t values spanning small and large hidden-failure populations.
SweepGrid default_sweep_grid();

void validate_grid(const SweepGrid& grid);

struct VerdictTally {
    std::uint64_t holds = 0;
    std::uint64_t violated = 0;
    std::uint64_t inconclusive = 0;
    std::uint64_t exact_zero_event = 0;

    void add(Verdict v);
};

/// Hazard-bound trend along one swept axis with every other parameter fixed.
struct MonotonicityCheck {
    std::string axis;         // "l" or "t"
    std::string fixed;        // the held parameters, human readable
    std::vector<double> x;
    std::vector<double> bound;
    bool applicable = false;  // l: every point has lp + 2A > B; t: every point's domain flags pass
    bool strictly_decreasing = false;
};

struct SweepResult {
    std::vector<PointRecord> points;  // Cartesian order: l, p, K, m, K_hat, m_hat, t (t fastest)
    std::map<std::string, VerdictTally> tallies;
    std::vector<MonotonicityCheck> checks;
};

SweepResult run_sweep(const SweepGrid& grid);

/// Flat CSV, one row per point, doubles printed with 17 significant digits.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// Column name -> column values, as read back from `write_sweep_csv` output.
using SweepTable = std::vector<std::map<std::string, std::string>>;
SweepTable read_sweep_csv(std::istream& in);

std::string format_flags(const DomainFlags& flags);

// JSON mapping.
void to_json(nlohmann::json& j, const ModelParameters& v);
void from_json(const nlohmann::json& j, ModelParameters& v);
void to_json(nlohmann::json& j, const BoundReport& v);
void from_json(const nlohmann::json& j, BoundReport& v);
void to_json(nlohmann::json& j, const MonteCarloEstimate& v);
void from_json(const nlohmann::json& j, MonteCarloEstimate& v);
void to_json(nlohmann::json& j, const AuditVerdict& v);
void from_json(const nlohmann::json& j, AuditVerdict& v);
void to_json(nlohmann::json& j, const PointRecord& v);
void from_json(const nlohmann::json& j, PointRecord& v);
void to_json(nlohmann::json& j, const RunReport& v);
void from_json(const nlohmann::json& j, RunReport& v);

std::string serialize_report(const RunReport& report);
RunReport parse_report(std::string_view text);

// Plot-ready series.
struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct PlotData {
    std::string quantity;
    std::string x_axis;
    std::vector<Series> series;
};

/// Selectors: hazard, reliability, bound_t1 (hazard-rate bound), bound_t2 (reliability
/// bound), exact_tail. Throws std::invalid_argument for anything else.
PlotData plot_from_report(const RunReport& report, const std::string& quantity);
/// x_axis empty picks the single varying axis (t when nothing varies).
PlotData plot_from_sweep(const SweepTable& table, const std::string& quantity, const std::string& x_axis = {});

void write_plot(std::ostream& out, const PlotData& plot);

}  // namespace sdpbound
