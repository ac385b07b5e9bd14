#include "sdpbound/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sdpbound/error.hpp"

namespace sdpbound {
namespace {

using nlohmann::json;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <class T>
void get_optional(const json& j, const char* key, std::optional<T>& v) {
    if (j.contains(key) && !j.at(key).is_null()) v = j.at(key).get<T>();
    else v.reset();
}

ReliabilityBoundMode parse_mode(const std::string& s) {
    if (s == "as-stated") return ReliabilityBoundMode::as_stated;
    if (s == "sign-corrected") return ReliabilityBoundMode::sign_corrected;
    throw std::invalid_argument("unknown reliability bound mode '" + s + "'");
}

BoundKind parse_kind(const std::string& s) {
    if (s == "hazard") return BoundKind::hazard_theorem;
    if (s == "reliability") return BoundKind::reliability_theorem;
    if (s == "reference") return BoundKind::reference;
    throw std::invalid_argument("unknown bound kind '" + s + "'");
}

Verdict parse_verdict(const std::string& s) {
    for (auto v : {Verdict::holds, Verdict::violated, Verdict::inconclusive, Verdict::exact_zero_event})
        if (s == to_string(v)) return v;
    throw std::invalid_argument("unknown verdict '" + s + "'");
}

void require(bool ok, const std::string& message) {
    if (!ok) throw DomainError(message);
}

std::string fixed_description(const ModelParameters& p, std::optional<double> t) {
    std::string s = "l=" + std::to_string(p.l) + " p=" + short_num(p.p) + " K=" + short_num(p.K) +
                    " m=" + short_num(p.m) + " K_hat=" + short_num(p.K_hat) + " m_hat=" + short_num(p.m_hat);
    if (t) s += " t=" + short_num(*t);
    return s;
}

}  // namespace

void validate_parameters(const ModelParameters& v) {
    require(v.l >= 1, "l must be >= 1 (got " + std::to_string(v.l) + ")");
    require(v.p > 0.0 && v.p < 1.0,
            "p must lie in (0, 1), i.e. at least one false negative and one true negative (got " + num(v.p) + ")");
    require(v.K > 0.0 && std::isfinite(v.K), "K must be > 0 (got " + num(v.K) + ")");
    require(v.m > -1.0 && std::isfinite(v.m), "m must be > -1 (got " + num(v.m) + ")");
    require(v.K_hat > 0.0 && std::isfinite(v.K_hat), "K_hat must be > 0 (got " + num(v.K_hat) + ")");
    require(v.m_hat > -1.0 && std::isfinite(v.m_hat), "m_hat must be > -1 (got " + num(v.m_hat) + ")");
}

std::string mode_name(const EvaluationOptions& o) {
    if (o.as_stated && o.sign_corrected) return "both";
    return o.as_stated ? "as-stated" : "sign-corrected";
}

PointRecord evaluate_point(const ModelParameters& params, double t, const EvaluationOptions& options) {
    validate_parameters(params);
    require(t > 0.0 && std::isfinite(t), "t must be > 0 (got " + num(t) + ")");

    const FailurePopulation pop(params.l, params.p);
    const WeibullParams manual(params.K, params.m);
    const WeibullParams residual(params.K_hat, params.m_hat);
    const TimePoint time(t);
    const CombinedHazardModel model{residual, pop};

    PointRecord r;
    r.params = params;
    r.t = t;
    r.expected_failures = expected_failures(pop);
    r.manual_hazard = weibull_hazard(manual, time);
    r.residual_hazard = weibull_hazard(residual, time);
    r.expected_combined_hazard = expected_combined_hazard(model, time);
    r.manual_reliability = weibull_reliability(manual, time);
    r.residual_reliability = weibull_reliability(residual, time);
    r.expected_sdp_reliability = expected_sdp_reliability_exact(model, time);

    r.hazard_bound = hazard_rate_bound(pop, manual, residual, time);
    r.hazard_exact = binomial_cdf_below(pop, r.hazard_bound.event_threshold);
    r.hazard_audit = audit_bound(r.hazard_bound, ExactProbability{r.hazard_exact, r.hazard_bound.event_threshold});

    r.reliability_threshold = reliability_event_threshold(manual, residual, time);
    r.reliability_exact = binomial_cdf_below(pop, r.reliability_threshold);

    std::vector<ReliabilityBoundMode> modes;
    if (options.as_stated) modes.push_back(ReliabilityBoundMode::as_stated);
    if (options.sign_corrected) modes.push_back(ReliabilityBoundMode::sign_corrected);
    for (auto mode : modes) {
        const double mu = expected_sdp_reliability_bound(model, time, mode);
        if (std::isfinite(mu)) {
            (mode == ReliabilityBoundMode::as_stated ? r.reliability_bound_as_stated
                                                     : r.reliability_bound_sign_corrected) = mu;
        }
        try {
            ReliabilityBoundRecord rec;
            rec.report = reliability_bound(pop, manual, residual, time, mode);
            rec.audit = audit_bound(rec.report, ExactProbability{r.reliability_exact, r.reliability_threshold});
            r.reliability_bounds.push_back(std::move(rec));
        } catch (const DomainError& e) {
            r.warnings.push_back(e.what());
        }
    }

    r.reference_bound = reference_chernoff_bound(pop, r.hazard_bound.event_threshold);
    r.reference_audit = audit_bound(r.reference_bound, ExactProbability{r.hazard_exact, r.hazard_bound.event_threshold});

    if (options.samples > 0) {
        MonteCarloConfig config;
        config.n_samples = options.samples;
        config.seed = options.seed;
        config.workers = options.workers;
        r.hazard_sampled = estimate_tail_probability(pop, r.hazard_bound.event_threshold, config);
        r.hazard_sampled_audit = audit_bound(r.hazard_bound, *r.hazard_sampled);
        r.exceedance_sampled = estimate_reliability_exceedance(model, manual, time, config);
        for (auto& rec : r.reliability_bounds) rec.sampled_audit = audit_bound(rec.report, *r.exceedance_sampled);
        r.reliability_sampled = estimate_expected_reliability(model, time, config);
    }
    return r;
}

RunReport run_analysis(const ModelParameters& params, const std::vector<double>& t,
                       const EvaluationOptions& options, const ProbabilitySource& source) {
    validate_parameters(params);
    require(!t.empty(), "at least one time point is required");
    require(options.as_stated || options.sign_corrected, "at least one reliability bound mode is required");
    RunReport report;
    report.seed = options.seed;
    report.samples = options.samples;
    report.mode = mode_name(options);
    report.params = params;
    report.t = t;
    report.p_source = source;
    if (source.counts) report.assumptions = validate_assumptions(*source.counts);
    for (double ti : t) report.points.push_back(evaluate_point(params, ti, options));
    return report;
}

SweepGrid default_sweep_grid() {
    SweepGrid g;
    g.l = {10, 100, 1000};
    g.p = {0.05, 0.1, 0.3};
    g.K = {1.0, 2.0};
    g.m = {0.0, 0.5};
    g.K_hat = {0.5, 1.0};
    g.m_hat = {0.0, 0.5};
    g.t = {1.0, 4.0, 16.0};
    return g;
}

void validate_grid(const SweepGrid& g) {
    auto nonempty = [](bool empty, const char* name) {
        require(!empty, std::string("sweep axis ") + name + " is empty");
    };
    nonempty(g.l.empty(), "l");
    nonempty(g.p.empty(), "p");
    nonempty(g.K.empty(), "K");
    nonempty(g.m.empty(), "m");
    nonempty(g.K_hat.empty(), "K_hat");
    nonempty(g.m_hat.empty(), "m_hat");
    nonempty(g.t.empty(), "t");
    require(g.options.as_stated || g.options.sign_corrected, "at least one reliability bound mode is required");
    for (auto v : g.l) validate_parameters({v, 0.5, 1, 0, 1, 0});
    for (auto v : g.p) validate_parameters({1, v, 1, 0, 1, 0});
    for (auto v : g.K) validate_parameters({1, 0.5, v, 0, 1, 0});
    for (auto v : g.m) validate_parameters({1, 0.5, 1, v, 1, 0});
    for (auto v : g.K_hat) validate_parameters({1, 0.5, 1, 0, v, 0});
    for (auto v : g.m_hat) validate_parameters({1, 0.5, 1, 0, 1, v});
    for (auto v : g.t) require(v > 0.0 && std::isfinite(v), "t must be > 0 (got " + num(v) + ")");
}

void VerdictTally::add(Verdict v) {
    switch (v) {
    case Verdict::holds: ++holds; break;
    case Verdict::violated: ++violated; break;
    case Verdict::inconclusive: ++inconclusive; break;
    case Verdict::exact_zero_event: ++exact_zero_event; break;
    }
}

SweepResult run_sweep(const SweepGrid& grid) {
    validate_grid(grid);
    std::vector<std::pair<ModelParameters, double>> jobs;
    for (auto l : grid.l)
        for (auto p : grid.p)
            for (auto K : grid.K)
                for (auto m : grid.m)
                    for (auto K_hat : grid.K_hat)
                        for (auto m_hat : grid.m_hat)
                            for (auto t : grid.t) jobs.push_back({{l, p, K, m, K_hat, m_hat}, t});

    SweepResult result;
    result.points.resize(jobs.size());
    EvaluationOptions point_options = grid.options;
    point_options.workers = 1;  // parallelism is across points

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                result.points[i] = evaluate_point(jobs[i].first, jobs[i].second, point_options);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned workers = std::max(1u, grid.options.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (const auto& pt : result.points) {
        result.tallies["hazard"].add(pt.hazard_audit.verdict);
        for (const auto& rb : pt.reliability_bounds)
            result.tallies[std::string("reliability/") + to_string(*rb.report.mode)].add(rb.audit.verdict);
        result.tallies["reference"].add(pt.reference_audit.verdict);
    }

    auto build_checks = [&](const std::string& axis) {
        std::map<std::string, std::size_t> index;
        std::vector<std::vector<const PointRecord*>> groups;
        std::vector<std::string> labels;
        for (const auto& pt : result.points) {
            auto fixed = pt.params;
            std::optional<double> t = pt.t;
            if (axis == "l") fixed.l = 0;
            else t.reset();
            auto label = fixed_description(fixed, t);
            if (axis == "l") label = label.substr(label.find(' ') + 1);
            auto [it, inserted] = index.try_emplace(label, groups.size());
            if (inserted) {
                groups.emplace_back();
                labels.push_back(label);
            }
            groups[it->second].push_back(&pt);
        }
        for (std::size_t g = 0; g < groups.size(); ++g) {
            auto& pts = groups[g];
            auto key = [&](const PointRecord* p) { return axis == "l" ? static_cast<double>(p->params.l) : p->t; };
            std::stable_sort(pts.begin(), pts.end(), [&](auto* a, auto* b) { return key(a) < key(b); });
            MonotonicityCheck c;
            c.axis = axis;
            c.fixed = labels[g];
            c.applicable = true;
            for (const auto* p : pts) {
                c.x.push_back(key(p));
                c.bound.push_back(p->hazard_bound.bound);
                if (axis == "l") {
                    c.applicable &= p->expected_failures + 2 * p->residual_hazard - p->manual_hazard > 0.0;
                } else {
                    const auto& f = p->hazard_bound.flags;
                    c.applicable &= f.delta_in_range && f.threshold_positive && f.threshold_below_mu && !f.vacuous;
                }
            }
            c.strictly_decreasing = true;
            for (std::size_t i = 1; i < c.bound.size(); ++i)
                c.strictly_decreasing &= c.bound[i] < c.bound[i - 1];
            result.checks.push_back(std::move(c));
        }
    };
    if (grid.l.size() > 1) build_checks("l");
    if (grid.t.size() > 1) build_checks("t");
    return result;
}

std::string format_flags(const DomainFlags& f) {
    std::string s;
    auto add = [&s](bool on, const char* name) {
        if (!on) return;
        if (!s.empty()) s += '|';
        s += name;
    };
    add(f.delta_in_range, "delta_in_range");
    add(f.delta_on_boundary, "delta_on_boundary");
    add(f.threshold_positive, "threshold_positive");
    add(f.threshold_below_mu, "threshold_below_mu");
    add(f.vacuous, "vacuous");
    return s;
}

namespace {

const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> columns = {
        "l", "p", "K", "m", "K_hat", "m_hat", "t",
        "expected_failures", "manual_hazard", "expected_combined_hazard",
        "manual_reliability", "expected_sdp_reliability",
        "hazard_threshold", "hazard_mu", "hazard_delta", "hazard_bound", "hazard_flags",
        "hazard_exact", "hazard_verdict", "hazard_sampled",
        "reliability_threshold", "reliability_exact",
        "as_stated_mu", "as_stated_delta", "as_stated_bound", "as_stated_flags", "as_stated_verdict",
        "sign_corrected_mu", "sign_corrected_delta", "sign_corrected_bound", "sign_corrected_flags",
        "sign_corrected_verdict",
        "reference_bound", "reference_flags", "reference_verdict",
        "exceedance_sampled", "reliability_sampled"};
    return columns;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string::size_type start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    const auto& columns = sweep_columns();
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& pt : result.points) {
        std::map<std::string, std::string> row;
        row["l"] = std::to_string(pt.params.l);
        row["p"] = num(pt.params.p);
        row["K"] = num(pt.params.K);
        row["m"] = num(pt.params.m);
        row["K_hat"] = num(pt.params.K_hat);
        row["m_hat"] = num(pt.params.m_hat);
        row["t"] = num(pt.t);
        row["expected_failures"] = num(pt.expected_failures);
        row["manual_hazard"] = num(pt.manual_hazard);
        row["expected_combined_hazard"] = num(pt.expected_combined_hazard);
        row["manual_reliability"] = num(pt.manual_reliability);
        row["expected_sdp_reliability"] = num(pt.expected_sdp_reliability);
        row["hazard_threshold"] = num(pt.hazard_bound.event_threshold);
        row["hazard_mu"] = num(pt.hazard_bound.mu_used);
        row["hazard_delta"] = num(pt.hazard_bound.delta);
        row["hazard_bound"] = num(pt.hazard_bound.bound);
        row["hazard_flags"] = format_flags(pt.hazard_bound.flags);
        row["hazard_exact"] = num(pt.hazard_exact);
        row["hazard_verdict"] = to_string(pt.hazard_audit.verdict);
        if (pt.hazard_sampled) row["hazard_sampled"] = num(pt.hazard_sampled->estimate);
        row["reliability_threshold"] = num(pt.reliability_threshold);
        row["reliability_exact"] = num(pt.reliability_exact);
        for (const auto& rb : pt.reliability_bounds) {
            const std::string prefix = *rb.report.mode == ReliabilityBoundMode::as_stated ? "as_stated_" : "sign_corrected_";
            row[prefix + "mu"] = num(rb.report.mu_used);
            row[prefix + "delta"] = num(rb.report.delta);
            row[prefix + "bound"] = num(rb.report.bound);
            row[prefix + "flags"] = format_flags(rb.report.flags);
            row[prefix + "verdict"] = to_string(rb.audit.verdict);
        }
        row["reference_bound"] = num(pt.reference_bound.bound);
        row["reference_flags"] = format_flags(pt.reference_bound.flags);
        row["reference_verdict"] = to_string(pt.reference_audit.verdict);
        if (pt.exceedance_sampled) row["exceedance_sampled"] = num(pt.exceedance_sampled->estimate);
        if (pt.reliability_sampled) row["reliability_sampled"] = num(pt.reliability_sampled->estimate);
        for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << row[columns[i]];
        out << '\n';
    }
}

SweepTable read_sweep_csv(std::istream& in) {
    SweepTable table;
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (header.empty()) {
            header = std::move(fields);
            continue;
        }
        if (fields.size() != header.size())
            throw ParseError("sweep row has " + std::to_string(fields.size()) + " fields, header has " +
                                 std::to_string(header.size()),
                             table.size() + 1);
        std::map<std::string, std::string> row;
        for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = fields[i];
        table.push_back(std::move(row));
    }
    return table;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json& j, const ModelParameters& v) {
    j = json{{"l", v.l}, {"p", v.p}, {"K", v.K}, {"m", v.m}, {"K_hat", v.K_hat}, {"m_hat", v.m_hat}};
}

void from_json(const json& j, ModelParameters& v) {
    j.at("l").get_to(v.l);
    j.at("p").get_to(v.p);
    j.at("K").get_to(v.K);
    j.at("m").get_to(v.m);
    j.at("K_hat").get_to(v.K_hat);
    j.at("m_hat").get_to(v.m_hat);
}

void to_json(json& j, const BoundReport& v) {
    j = json{{"kind", to_string(v.kind)},
             {"event_threshold", v.event_threshold},
             {"delta", v.delta},
             {"mu", v.mu_used},
             {"log_bound", v.log_bound},
             {"bound", v.bound},
             {"unsimplified_log_bound", v.unsimplified_log_bound},
             {"flags",
              {{"delta_in_range", v.flags.delta_in_range},
               {"delta_on_boundary", v.flags.delta_on_boundary},
               {"threshold_positive", v.flags.threshold_positive},
               {"threshold_below_mu", v.flags.threshold_below_mu},
               {"vacuous", v.flags.vacuous}}},
             {"exact_zero_event", v.exact_zero_event}};
    if (v.mode) j["mode"] = to_string(*v.mode);
    if (!v.note.empty()) j["note"] = v.note;
}

void from_json(const json& j, BoundReport& v) {
    v.kind = parse_kind(j.at("kind").get<std::string>());
    v.mode.reset();
    if (j.contains("mode")) v.mode = parse_mode(j.at("mode").get<std::string>());
    j.at("event_threshold").get_to(v.event_threshold);
    j.at("delta").get_to(v.delta);
    j.at("mu").get_to(v.mu_used);
    j.at("log_bound").get_to(v.log_bound);
    j.at("bound").get_to(v.bound);
    j.at("unsimplified_log_bound").get_to(v.unsimplified_log_bound);
    const auto& f = j.at("flags");
    f.at("delta_in_range").get_to(v.flags.delta_in_range);
    f.at("delta_on_boundary").get_to(v.flags.delta_on_boundary);
    f.at("threshold_positive").get_to(v.flags.threshold_positive);
    f.at("threshold_below_mu").get_to(v.flags.threshold_below_mu);
    f.at("vacuous").get_to(v.flags.vacuous);
    j.at("exact_zero_event").get_to(v.exact_zero_event);
    v.note = j.value("note", std::string{});
}

void to_json(json& j, const MonteCarloEstimate& v) {
    j = json{{"estimate", v.estimate}, {"std_error", v.std_error}, {"ci_low", v.ci_low},
             {"ci_high", v.ci_high},   {"n_samples", v.n_samples}, {"seed", v.seed}};
    put_optional(j, "event_threshold", v.event_threshold);
}

void from_json(const json& j, MonteCarloEstimate& v) {
    j.at("estimate").get_to(v.estimate);
    j.at("std_error").get_to(v.std_error);
    j.at("ci_low").get_to(v.ci_low);
    j.at("ci_high").get_to(v.ci_high);
    j.at("n_samples").get_to(v.n_samples);
    j.at("seed").get_to(v.seed);
    get_optional(j, "event_threshold", v.event_threshold);
}

void to_json(json& j, const AuditVerdict& v) {
    json empirical;
    if (const auto* exact = std::get_if<ExactProbability>(&v.empirical)) {
        empirical = json{{"kind", "exact"}, {"value", exact->value}, {"event_threshold", exact->event_threshold}};
    } else {
        empirical = std::get<MonteCarloEstimate>(v.empirical);
        empirical["kind"] = "monte-carlo";
    }
    j = json{{"verdict", to_string(v.verdict)}, {"bound", v.bound_value}, {"margin", v.margin}, {"empirical", empirical}};
}

void from_json(const json& j, AuditVerdict& v) {
    v.verdict = parse_verdict(j.at("verdict").get<std::string>());
    j.at("bound").get_to(v.bound_value);
    j.at("margin").get_to(v.margin);
    const auto& e = j.at("empirical");
    if (e.at("kind").get<std::string>() == "exact") {
        v.empirical = ExactProbability{e.at("value").get<double>(), e.at("event_threshold").get<double>()};
    } else {
        v.empirical = e.get<MonteCarloEstimate>();
    }
}

void to_json(json& j, const PointRecord& v) {
    j = json::object();
    j["parameters"] = v.params;
    j["t"] = v.t;
    j["expected_failures"] = v.expected_failures;
    j["hazard"] = {{"manual", v.manual_hazard},
                   {"residual", v.residual_hazard},
                   {"expected_combined", v.expected_combined_hazard}};
    json reliability = {{"manual", v.manual_reliability},
                        {"residual", v.residual_reliability},
                        {"expected_sdp_exact", v.expected_sdp_reliability}};
    put_optional(reliability, "expected_sdp_bound_as_stated", v.reliability_bound_as_stated);
    put_optional(reliability, "expected_sdp_bound_sign_corrected", v.reliability_bound_sign_corrected);
    j["reliability"] = reliability;

    json hazard_bound = {{"report", v.hazard_bound}, {"exact_probability", v.hazard_exact}, {"audit", v.hazard_audit}};
    put_optional(hazard_bound, "sampled", v.hazard_sampled);
    put_optional(hazard_bound, "sampled_audit", v.hazard_sampled_audit);
    j["hazard_bound"] = hazard_bound;

    json bounds = json::array();
    for (const auto& rb : v.reliability_bounds) {
        json b = {{"report", rb.report}, {"audit", rb.audit}};
        put_optional(b, "sampled_audit", rb.sampled_audit);
        bounds.push_back(b);
    }
    json reliability_bound = {
        {"event_threshold", v.reliability_threshold}, {"exact_probability", v.reliability_exact}, {"modes", bounds}};
    put_optional(reliability_bound, "sampled", v.exceedance_sampled);
    j["reliability_bound"] = reliability_bound;

    j["reference_bound"] = {{"report", v.reference_bound}, {"audit", v.reference_audit}};
    put_optional(j, "reliability_sampled", v.reliability_sampled);
    if (!v.warnings.empty()) j["warnings"] = v.warnings;
}

void from_json(const json& j, PointRecord& v) {
    j.at("parameters").get_to(v.params);
    j.at("t").get_to(v.t);
    j.at("expected_failures").get_to(v.expected_failures);
    const auto& h = j.at("hazard");
    h.at("manual").get_to(v.manual_hazard);
    h.at("residual").get_to(v.residual_hazard);
    h.at("expected_combined").get_to(v.expected_combined_hazard);
    const auto& r = j.at("reliability");
    r.at("manual").get_to(v.manual_reliability);
    r.at("residual").get_to(v.residual_reliability);
    r.at("expected_sdp_exact").get_to(v.expected_sdp_reliability);
    get_optional(r, "expected_sdp_bound_as_stated", v.reliability_bound_as_stated);
    get_optional(r, "expected_sdp_bound_sign_corrected", v.reliability_bound_sign_corrected);

    const auto& hb = j.at("hazard_bound");
    hb.at("report").get_to(v.hazard_bound);
    hb.at("exact_probability").get_to(v.hazard_exact);
    hb.at("audit").get_to(v.hazard_audit);
    get_optional(hb, "sampled", v.hazard_sampled);
    get_optional(hb, "sampled_audit", v.hazard_sampled_audit);

    const auto& rb = j.at("reliability_bound");
    rb.at("event_threshold").get_to(v.reliability_threshold);
    rb.at("exact_probability").get_to(v.reliability_exact);
    v.reliability_bounds.clear();
    for (const auto& b : rb.at("modes")) {
        ReliabilityBoundRecord rec;
        b.at("report").get_to(rec.report);
        b.at("audit").get_to(rec.audit);
        get_optional(b, "sampled_audit", rec.sampled_audit);
        v.reliability_bounds.push_back(std::move(rec));
    }
    get_optional(rb, "sampled", v.exceedance_sampled);

    j.at("reference_bound").at("report").get_to(v.reference_bound);
    j.at("reference_bound").at("audit").get_to(v.reference_audit);
    get_optional(j, "reliability_sampled", v.reliability_sampled);
    v.warnings = j.value("warnings", std::vector<std::string>{});
}

void to_json(json& j, const RunReport& v) {
    j = json::object();
    j["toolkit"] = v.toolkit;
    j["version"] = v.version;
    j["seed"] = v.seed;
    j["samples"] = v.samples;
    j["mode"] = v.mode;
    j["parameters"] = v.params;
    j["t"] = v.t;
    json source = {{"kind", v.p_source.kind}};
    if (!v.p_source.path.empty()) source["path"] = v.p_source.path;
    if (v.p_source.counts) {
        const auto& c = *v.p_source.counts;
        source["fn"] = c.fn_count;
        source["tn"] = c.tn_count;
        put_optional(source, "fp", c.fp_count);
        put_optional(source, "tp", c.tp_count);
    }
    j["p_source"] = source;
    if (v.assumptions) {
        j["assumptions"] = {{"ok", v.assumptions->ok},
                            {"violations", v.assumptions->violations},
                            {"caveats", v.assumptions->caveats}};
    }
    j["points"] = v.points;
}

void from_json(const json& j, RunReport& v) {
    j.at("toolkit").get_to(v.toolkit);
    j.at("version").get_to(v.version);
    j.at("seed").get_to(v.seed);
    j.at("samples").get_to(v.samples);
    j.at("mode").get_to(v.mode);
    j.at("parameters").get_to(v.params);
    j.at("t").get_to(v.t);
    const auto& s = j.at("p_source");
    v.p_source = {};
    s.at("kind").get_to(v.p_source.kind);
    v.p_source.path = s.value("path", std::string{});
    if (s.contains("fn")) {
        ConfusionCounts c;
        s.at("fn").get_to(c.fn_count);
        s.at("tn").get_to(c.tn_count);
        get_optional(s, "fp", c.fp_count);
        get_optional(s, "tp", c.tp_count);
        v.p_source.counts = c;
    }
    v.assumptions.reset();
    if (j.contains("assumptions")) {
        AssumptionVerdict a;
        const auto& ja = j.at("assumptions");
        ja.at("ok").get_to(a.ok);
        ja.at("violations").get_to(a.violations);
        ja.at("caveats").get_to(a.caveats);
        v.assumptions = a;
    }
    j.at("points").get_to(v.points);
}

std::string serialize_report(const RunReport& report) {
    return json(report).dump(2) + "\n";
}

RunReport parse_report(std::string_view text) {
    try {
        return json::parse(text).get<RunReport>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed report: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Plot data

namespace {

const std::vector<std::string>& known_quantities() {
    static const std::vector<std::string> q = {"hazard", "reliability", "bound_t1", "bound_t2", "exact_tail"};
    return q;
}

void require_quantity(const std::string& quantity) {
    const auto& q = known_quantities();
    if (std::find(q.begin(), q.end(), quantity) == q.end())
        throw std::invalid_argument("unknown quantity '" + quantity +
                                    "' (expected hazard, reliability, bound_t1, bound_t2 or exact_tail)");
}

std::vector<std::string> sweep_curve_columns(const std::string& quantity) {
    if (quantity == "hazard") return {"manual_hazard", "expected_combined_hazard"};
    if (quantity == "reliability") return {"manual_reliability", "expected_sdp_reliability"};
    if (quantity == "bound_t1") return {"hazard_bound"};
    if (quantity == "bound_t2") return {"as_stated_bound", "sign_corrected_bound"};
    return {"hazard_exact", "reliability_exact"};
}

}  // namespace

PlotData plot_from_report(const RunReport& report, const std::string& quantity) {
    require_quantity(quantity);
    PlotData plot{quantity, "t", {}};
    if (report.points.empty()) return plot;

    std::vector<const PointRecord*> pts;
    for (const auto& p : report.points) pts.push_back(&p);
    std::stable_sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->t < b->t; });

    auto curve = [&](const std::string& label, auto&& value) {
        Series s{label, {}};
        for (const auto* p : pts)
            if (auto y = value(*p)) s.points.emplace_back(p->t, *y);
        if (!s.points.empty()) plot.series.push_back(std::move(s));
    };
    using Y = std::optional<double>;
    if (quantity == "hazard") {
        curve("manual_hazard", [](const PointRecord& p) -> Y { return p.manual_hazard; });
        curve("expected_combined_hazard", [](const PointRecord& p) -> Y { return p.expected_combined_hazard; });
    } else if (quantity == "reliability") {
        curve("manual_reliability", [](const PointRecord& p) -> Y { return p.manual_reliability; });
        curve("expected_sdp_reliability", [](const PointRecord& p) -> Y { return p.expected_sdp_reliability; });
    } else if (quantity == "bound_t1") {
        curve("hazard_bound", [](const PointRecord& p) -> Y { return p.hazard_bound.bound; });
    } else if (quantity == "bound_t2") {
        for (auto mode : {ReliabilityBoundMode::as_stated, ReliabilityBoundMode::sign_corrected}) {
            curve(std::string("reliability_bound_") + to_string(mode), [mode](const PointRecord& p) -> Y {
                for (const auto& rb : p.reliability_bounds)
                    if (rb.report.mode == mode) return rb.report.bound;
                return std::nullopt;
            });
        }
    } else {
        curve("hazard_exact", [](const PointRecord& p) -> Y { return p.hazard_exact; });
        curve("reliability_exact", [](const PointRecord& p) -> Y { return p.reliability_exact; });
    }
    return plot;
}

PlotData plot_from_sweep(const SweepTable& table, const std::string& quantity, const std::string& x_axis) {
    require_quantity(quantity);
    static const std::vector<std::string> axes = {"l", "p", "K", "m", "K_hat", "m_hat", "t"};
    std::string axis = x_axis;
    if (!axis.empty() && std::find(axes.begin(), axes.end(), axis) == axes.end())
        throw std::invalid_argument("unknown sweep axis '" + axis + "'");
    if (axis.empty()) {
        std::vector<std::string> varying;
        for (const auto& a : axes) {
            for (const auto& row : table) {
                if (row.at(a) != table.front().at(a)) {
                    varying.push_back(a);
                    break;
                }
            }
        }
        if (varying.size() > 1)
            throw std::invalid_argument("several sweep axes vary; choose one with --x");
        axis = varying.empty() ? "t" : varying.front();
    }
    PlotData plot{quantity, axis, {}};

    for (const auto& column : sweep_curve_columns(quantity)) {
        std::map<std::string, std::size_t> index;
        std::vector<Series> curves;
        for (const auto& row : table) {
            auto cell = row.find(column);
            if (cell == row.end() || cell->second.empty()) continue;
            std::string fixed;
            for (const auto& a : axes)
                if (a != axis) fixed += (fixed.empty() ? "" : " ") + a + "=" + row.at(a);
            auto [it, inserted] = index.try_emplace(fixed, curves.size());
            if (inserted) curves.push_back({column + " [" + fixed + "]", {}});
            curves[it->second].points.emplace_back(std::stod(row.at(axis)), std::stod(cell->second));
        }
        for (auto& c : curves) {
            std::stable_sort(c.points.begin(), c.points.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            plot.series.push_back(std::move(c));
        }
    }
    return plot;
}

void write_plot(std::ostream& out, const PlotData& plot) {
    out << "# sdpbound plotdata quantity=" << plot.quantity << " x=" << plot.x_axis << '\n';
    for (std::size_t i = 0; i < plot.series.size(); ++i) {
        if (i) out << '\n';
        out << "# curve: " << plot.series[i].label << '\n';
        for (const auto& [x, y] : plot.series[i].points) out << num(x) << ' ' << num(y) << '\n';
    }
}

}  // namespace sdpbound
