#include "sdpbound/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "sdpbound/error.hpp"
#include "sdpbound/report.hpp"

namespace sdpbound {
namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct CountsInput {
    std::optional<std::uint64_t> fn, tn;
    std::string records_path;
    std::string confusion_path;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--fn", fn, "False negatives (defective modules predicted clean)");
        cmd->add_option("--tn", tn, "True negatives (clean modules predicted clean)");
        cmd->add_option("--records", records_path, "Per-module CSV: module_id,predicted[,actual]");
        cmd->add_option("--confusion", confusion_path, "JSON object with integer fn, tn[, fp, tp]");
    }
};

// Counts and predicted-clean total gathered from whichever inputs were given.
struct ResolvedInputs {
    std::optional<ConfusionCounts> counts;
    std::optional<std::uint64_t> l_clean;
    ProbabilitySource source;
};

ResolvedInputs resolve_inputs(const CountsInput& in) {
    ResolvedInputs r;
    int sources = 0;
    if (in.fn || in.tn) {
        if (!in.fn || !in.tn) throw DomainError("--fn and --tn must be given together");
        r.counts = ConfusionCounts{*in.fn, *in.tn, std::nullopt, std::nullopt};
        r.source.kind = "counts";
        ++sources;
    }
    if (!in.confusion_path.empty()) {
        r.counts = read_confusion_file(in.confusion_path);
        r.source.kind = "confusion-file";
        r.source.path = in.confusion_path;
        ++sources;
    }
    if (!in.records_path.empty()) {
        auto records = read_records_file(in.records_path);
        r.l_clean = summarize_project(records).l_clean;
        if (records.front().actual) {
            r.counts = tally_confusion(records);
            r.source.kind = "records-file";
            r.source.path = in.records_path;
            ++sources;
        }
    }
    if (sources > 1) throw DomainError("give at most one of --fn/--tn, --confusion, or a labelled --records file");
    r.source.counts = r.counts;
    return r;
}

class Output {
public:
    explicit Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw ParseError("cannot write '" + path + "'");
            stream_ = file_.get();
        }
    }
    bool to_file() const { return file_ != nullptr; }
    std::ostream& stream() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

void apply_mode(const std::string& mode, EvaluationOptions& options) {
    options.as_stated = mode != "sign-corrected";
    options.sign_corrected = mode != "as-stated";
}

bool any_violation(const PointRecord& p) {
    auto bad = [](const AuditVerdict& v) { return v.verdict == Verdict::violated; };
    if (bad(p.hazard_audit) || bad(p.reference_audit)) return true;
    if (p.hazard_sampled_audit && bad(*p.hazard_sampled_audit)) return true;
    for (const auto& rb : p.reliability_bounds)
        if (bad(rb.audit) || (rb.sampled_audit && bad(*rb.sampled_audit))) return true;
    return false;
}

void print_point(std::ostream& os, const PointRecord& p) {
    os << "t=" << fmt(p.t) << ": E[X]=" << fmt(p.expected_failures) << " z(t)=" << fmt(p.manual_hazard)
       << " E[z_hat(t)]=" << fmt(p.expected_combined_hazard) << " R(t)=" << fmt(p.manual_reliability)
       << " E[R_hat(t)]=" << fmt(p.expected_sdp_reliability) << '\n';
    auto line = [&os](const std::string& name, const BoundReport& b, const AuditVerdict& a, double exact) {
        os << "  " << name << ": Pr[X < " << fmt(b.event_threshold) << "] exact " << fmt(exact) << ", bound "
           << fmt(b.bound) << " (delta " << fmt(b.delta) << ", mu " << fmt(b.mu_used) << ") -> "
           << to_string(a.verdict) << " (margin " << fmt(a.margin) << ")";
        auto flags = format_flags(b.flags);
        os << " [" << (flags.empty() ? "no flags" : flags) << "]\n";
    };
    line("hazard bound", p.hazard_bound, p.hazard_audit, p.hazard_exact);
    for (const auto& rb : p.reliability_bounds)
        line(std::string("reliability bound (") + to_string(*rb.report.mode) + ")", rb.report, rb.audit,
             p.reliability_exact);
    line("reference Chernoff", p.reference_bound, p.reference_audit, p.hazard_exact);
    if (p.hazard_sampled)
        os << "  sampled Pr[X < " << fmt(p.hazard_bound.event_threshold) << "] = " << fmt(p.hazard_sampled->estimate)
           << " [" << fmt(p.hazard_sampled->ci_low) << ", " << fmt(p.hazard_sampled->ci_high) << "]\n";
    if (p.reliability_sampled)
        os << "  sampled E[R_hat(t)] = " << fmt(p.reliability_sampled->estimate) << " +/- "
           << fmt(p.reliability_sampled->std_error) << '\n';
    for (const auto& w : p.warnings) os << "  warning: " << w << '\n';
}

int cmd_for(const CountsInput& in, std::ostream& out) {
    auto inputs = resolve_inputs(in);
    if (!inputs.counts) throw DomainError("need --fn/--tn, --confusion, or a --records file with actual labels");
    const auto& c = *inputs.counts;
    out << "source: " << inputs.source.kind;
    if (!inputs.source.path.empty()) out << " (" << inputs.source.path << ")";
    out << "\nFN = " << c.fn_count << ", TN = " << c.tn_count;
    if (c.fp_count) out << ", FP = " << *c.fp_count;
    if (c.tp_count) out << ", TP = " << *c.tp_count;
    out << "\npredicted clean = " << c.fn_count + c.tn_count << '\n';
    if (c.fn_count + c.tn_count > 0) out << "FOR p = " << fmt(false_omission_rate(c)) << '\n';
    const auto verdict = validate_assumptions(c);
    out << "assumption check: " << (verdict.ok ? "ok" : "violated") << '\n';
    for (const auto& v : verdict.violations) out << "  violation: " << v << '\n';
    for (const auto& v : verdict.caveats) out << "  caveat: " << v << '\n';
    return verdict.ok ? kExitOk : kExitUsage;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Feasibility bounds and audits for software defect prediction models", "sdpbound"};
    app.require_subcommand(1);

    // for
    CountsInput for_in;
    auto* for_cmd = app.add_subcommand("for", "False omission rate and precondition check");
    for_in.add_to(for_cmd);

    // analyze
    CountsInput an_in;
    std::optional<std::uint64_t> an_l;
    std::optional<double> an_p;
    double an_K = 0, an_m = 0, an_K_hat = 0, an_m_hat = 0;
    std::vector<double> an_t;
    EvaluationOptions an_opts;
    std::string an_mode = "both", an_out;
    bool an_strict = false;
    auto* an_cmd = app.add_subcommand("analyze", "Evaluate bounds, exact probabilities and audits at each t");
    an_in.add_to(an_cmd);
    an_cmd->add_option("--l", an_l, "Predicted-clean module count");
    an_cmd->add_option("--p", an_p, "Per-module misclassification probability (FOR)");
    an_cmd->add_option("--K", an_K, "Manual-testing Weibull scale")->required();
    an_cmd->add_option("--m", an_m, "Manual-testing Weibull shape")->required();
    an_cmd->add_option("--K-hat", an_K_hat, "Residual Weibull scale under SDP")->required();
    an_cmd->add_option("--m-hat", an_m_hat, "Residual Weibull shape under SDP")->required();
    an_cmd->add_option("--t", an_t, "Time points, comma separated")->required()->delimiter(',');

    // sweep
    SweepGrid grid = default_sweep_grid();
    std::string sw_mode = "both", sw_out;
    bool sw_strict = false;
    auto* sw_cmd = app.add_subcommand("sweep", "Evaluate the Cartesian product of parameter lists");
    sw_cmd->add_option("--l", grid.l, "l values")->delimiter(',');
    sw_cmd->add_option("--p", grid.p, "p values")->delimiter(',');
    sw_cmd->add_option("--K", grid.K, "K values")->delimiter(',');
    sw_cmd->add_option("--m", grid.m, "m values")->delimiter(',');
    sw_cmd->add_option("--K-hat", grid.K_hat, "K_hat values")->delimiter(',');
    sw_cmd->add_option("--m-hat", grid.m_hat, "m_hat values")->delimiter(',');
    sw_cmd->add_option("--t", grid.t, "t values")->delimiter(',');

    for (auto [cmd, opts, mode, outp, strict] :
         {std::tuple{an_cmd, &an_opts, &an_mode, &an_out, &an_strict},
          std::tuple{sw_cmd, &grid.options, &sw_mode, &sw_out, &sw_strict}}) {
        cmd->add_option("--samples", opts->samples, "Monte Carlo draws per estimate (0 disables)")
            ->capture_default_str();
        cmd->add_option("--seed", opts->seed, "Random seed")->capture_default_str();
        cmd->add_option("--workers", opts->workers, "Worker threads (results do not depend on it)")
            ->capture_default_str();
        cmd->add_option("--mode", *mode, "Reliability bound mode")
            ->check(CLI::IsMember({"as-stated", "sign-corrected", "both"}))
            ->capture_default_str();
        cmd->add_option("--out", *outp, "Output path ('-' or empty for standard output)");
        cmd->add_flag("--strict", *strict, "Exit 3 if any audit verdict is 'violated'");
    }

    // plotdata
    std::string pd_in, pd_quantity, pd_x, pd_out;
    auto* pd_cmd = app.add_subcommand("plotdata", "Extract (x, y) series from a report or sweep CSV");
    pd_cmd->add_option("input", pd_in, "analyze report (JSON) or sweep CSV")->required();
    pd_cmd->add_option("--quantity", pd_quantity, "hazard | reliability | bound_t1 | bound_t2 | exact_tail")
        ->required();
    pd_cmd->add_option("--x", pd_x, "Sweep axis for the x column (l, p, K, m, K_hat, m_hat, t)");
    pd_cmd->add_option("--out", pd_out, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*for_cmd) return cmd_for(for_in, out);

        if (*an_cmd) {
            auto inputs = resolve_inputs(an_in);
            ModelParameters params{0, 0, an_K, an_m, an_K_hat, an_m_hat};
            ProbabilitySource source = inputs.source;
            if (an_p) {
                if (inputs.counts) throw DomainError("--p conflicts with a counts source; give one");
                params.p = *an_p;
                source = {};
            } else if (inputs.counts) {
                auto verdict = validate_assumptions(*inputs.counts);
                if (!verdict.ok) throw DomainError(verdict.violations.front());
                params.p = false_omission_rate(*inputs.counts);
            } else {
                throw DomainError("p is unresolved: give --p, --fn/--tn, --confusion, or a labelled --records file");
            }
            if (an_l) params.l = *an_l;
            else if (inputs.l_clean) params.l = *inputs.l_clean;
            else if (inputs.counts) params.l = inputs.counts->fn_count + inputs.counts->tn_count;
            else throw DomainError("l is unresolved: give --l or a --records file");

            apply_mode(an_mode, an_opts);
            const auto report = run_analysis(params, an_t, an_opts, source);
            Output dest(an_out, out);
            dest.stream() << serialize_report(report);
            std::ostream& summary = dest.to_file() ? out : err;
            summary << "l = " << params.l << ", p = " << fmt(params.p) << " (" << source.kind << "), K = "
                    << fmt(params.K) << ", m = " << fmt(params.m) << ", K_hat = " << fmt(params.K_hat)
                    << ", m_hat = " << fmt(params.m_hat) << '\n';
            bool violated = false;
            for (const auto& p : report.points) {
                print_point(summary, p);
                violated |= any_violation(p);
            }
            return an_strict && violated ? kExitStrictViolation : kExitOk;
        }

        if (*sw_cmd) {
            apply_mode(sw_mode, grid.options);
            const auto result = run_sweep(grid);
            Output dest(sw_out, out);
            write_sweep_csv(dest.stream(), result);
            std::ostream& summary = dest.to_file() ? out : err;
            summary << result.points.size() << " points\n";
            for (const auto& [name, t] : result.tallies) {
                summary << name << ": holds " << t.holds << ", violated " << t.violated << ", inconclusive "
                        << t.inconclusive << ", exact-zero-event " << t.exact_zero_event << '\n';
            }
            for (const auto& c : result.checks) {
                summary << "hazard bound along " << c.axis << " [" << c.fixed << "]: "
                        << (c.strictly_decreasing ? "strictly decreasing" : "NOT strictly decreasing")
                        << (c.applicable ? "" : " (precondition not met)") << '\n';
            }
            bool violated = false;
            for (const auto& p : result.points) violated |= any_violation(p);
            return sw_strict && violated ? kExitStrictViolation : kExitOk;
        }

        if (*pd_cmd) {
            std::ifstream in(pd_in, std::ios::binary);
            if (!in) throw ParseError("cannot open '" + pd_in + "'");
            std::stringstream buf;
            buf << in.rdbuf();
            const std::string text = buf.str();
            const auto first = text.find_first_not_of(" \t\r\n");
            PlotData plot;
            if (first != std::string::npos && text[first] == '{') {
                plot = plot_from_report(parse_report(text), pd_quantity);
            } else {
                std::istringstream csv(text);
                plot = plot_from_sweep(read_sweep_csv(csv), pd_quantity, pd_x);
            }
            Output dest(pd_out, out);
            write_plot(dest.stream(), plot);
            return kExitOk;
        }
    } catch (const ParseError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"sdpbound"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace sdpbound
