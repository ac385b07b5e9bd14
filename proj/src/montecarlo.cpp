#include "sdpbound/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "sdpbound/error.hpp"

namespace sdpbound {
namespace {

constexpr double kZ95 = 1.959963984540054;

// Per-block sufficient statistics: count, indicator hits, Welford mean and M2.
struct BlockStats {
    std::uint64_t n = 0;
    std::uint64_t hits = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        ++n;
        if (v != 0.0) ++hits;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
    }

    void merge(const BlockStats& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(n + o.n);
        const double d = o.mean - mean;
        mean += d * (static_cast<double>(o.n) / total);
        m2 += o.m2 + d * d * (static_cast<double>(n) * static_cast<double>(o.n) / total);
        n += o.n;
        hits += o.hits;
    }
};

void require_samples(const MonteCarloConfig& config) {
    if (config.n_samples < 1000)
        throw DomainError("Monte Carlo needs at least 1000 samples, got " + std::to_string(config.n_samples));
}

// Runs `body(block, first_index, count)` for every block, on up to config.workers threads.
template <class Body>
void for_each_block(const MonteCarloConfig& config, Body&& body) {
    const std::uint64_t blocks = (config.n_samples + kBlockSize - 1) / kBlockSize;
    auto run = [&](std::uint64_t b) {
        const std::uint64_t first = b * kBlockSize;
        body(b, first, std::min(kBlockSize, config.n_samples - first));
    };
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, config.workers), blocks));
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) run(b);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::uint64_t b = next++; b < blocks; b = next++) run(b);
        });
    }
    for (auto& th : pool) th.join();
}

FailureDraw default_draw(const FailurePopulation& pop, const MonteCarloConfig& config) {
    auto sampler = std::make_shared<const BinomialSampler>(pop, config.method);
    return [sampler](RandomStream& rng) { return (*sampler)(rng); };
}

// Merged statistics of value(x) over the configured draws; merge runs in block order.
template <class Value>
BlockStats accumulate(const MonteCarloConfig& config, const FailureDraw& draw, Value&& value) {
    const std::uint64_t blocks = (config.n_samples + kBlockSize - 1) / kBlockSize;
    std::vector<BlockStats> per_block(blocks);
    for_each_block(config, [&](std::uint64_t b, std::uint64_t, std::uint64_t count) {
        auto rng = RandomStream::substream(config.seed, b);
        BlockStats s;
        for (std::uint64_t i = 0; i < count; ++i) s.add(value(draw(rng)));
        per_block[b] = s;
    });
    BlockStats total;
    for (const auto& s : per_block) total.merge(s);
    return total;
}

MonteCarloEstimate proportion(const BlockStats& s, const MonteCarloConfig& config) {
    MonteCarloEstimate e;
    const double n = static_cast<double>(s.n);
    const double phat = static_cast<double>(s.hits) / n;
    e.estimate = phat;
    e.std_error = std::sqrt(phat * (1.0 - phat) / n);
    // Wilson score interval
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = kZ95 / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    e.ci_low = std::clamp(center - half, 0.0, phat);
    e.ci_high = std::clamp(center + half, phat, 1.0);
    e.n_samples = s.n;
    e.seed = config.seed;
    return e;
}

MonteCarloEstimate mean_estimate(const BlockStats& s, const MonteCarloConfig& config) {
    MonteCarloEstimate e;
    const double n = static_cast<double>(s.n);
    e.estimate = s.mean;
    e.std_error = std::sqrt(std::max(0.0, s.m2) / (n - 1.0) / n);
    e.ci_low = s.mean - kZ95 * e.std_error;
    e.ci_high = s.mean + kZ95 * e.std_error;
    e.n_samples = s.n;
    e.seed = config.seed;
    return e;
}

}  // namespace

const char* to_string(Verdict verdict) {
    switch (verdict) {
    case Verdict::holds: return "holds";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::exact_zero_event: return "exact-zero-event";
    }
    return "unknown";
}

bool tail_event(std::uint64_t x, double threshold) {
    return static_cast<double>(x) < threshold;
}

bool exceedance_event(const CombinedHazardModel& model, const WeibullParams& manual,
                      std::uint64_t x, TimePoint t) {
    return sdp_log_reliability(model, x, t) > weibull_log_reliability(manual, t);
}

std::vector<std::uint64_t> draw_failures(const FailurePopulation& pop, const MonteCarloConfig& config) {
    std::vector<std::uint64_t> out(config.n_samples);
    const BinomialSampler sampler(pop, config.method);
    for_each_block(config, [&](std::uint64_t b, std::uint64_t first, std::uint64_t count) {
        auto rng = RandomStream::substream(config.seed, b);
        for (std::uint64_t i = 0; i < count; ++i) out[first + i] = sampler(rng);
    });
    return out;
}

MonteCarloEstimate estimate_tail_probability(const FailurePopulation& pop, double threshold,
                                             const MonteCarloConfig& config, const FailureDraw& draw) {
    require_samples(config);
    MonteCarloEstimate e;
    if (!(threshold > 0.0)) {
        e.n_samples = config.n_samples;
        e.seed = config.seed;
    } else {
        const auto& source = draw ? draw : default_draw(pop, config);
        e = proportion(accumulate(config, source, [threshold](std::uint64_t x) {
                           return tail_event(x, threshold) ? 1.0 : 0.0;
                       }),
                       config);
    }
    e.event_threshold = threshold;
    return e;
}

MonteCarloEstimate estimate_expected_reliability(const CombinedHazardModel& model, TimePoint t,
                                                 const MonteCarloConfig& config, const FailureDraw& draw) {
    require_samples(config);
    const auto& source = draw ? draw : default_draw(model.population, config);
    return mean_estimate(
        accumulate(config, source, [&](std::uint64_t x) { return sdp_reliability(model, x, t); }), config);
}

MonteCarloEstimate estimate_reliability_exceedance(const CombinedHazardModel& model,
                                                   const WeibullParams& manual, TimePoint t,
                                                   const MonteCarloConfig& config, const FailureDraw& draw) {
    require_samples(config);
    const double threshold = reliability_event_threshold(manual, model.residual, t);
    const auto& source = draw ? draw : default_draw(model.population, config);
    auto e = proportion(accumulate(config, source, [&](std::uint64_t x) {
                            return exceedance_event(model, manual, x, t) ? 1.0 : 0.0;
                        }),
                        config);
    e.event_threshold = threshold;
    return e;
}

AuditVerdict audit_bound(const BoundReport& report, const EmpiricalProbability& empirical) {
    double lo = 0.0;
    double hi = 0.0;
    double threshold = 0.0;
    if (const auto* exact = std::get_if<ExactProbability>(&empirical)) {
        lo = hi = exact->value;
        threshold = exact->event_threshold;
    } else {
        const auto& mc = std::get<MonteCarloEstimate>(empirical);
        if (!mc.event_threshold)
            throw std::invalid_argument("estimate does not describe a tail event; cannot audit a bound with it");
        lo = mc.ci_low;
        hi = mc.ci_high;
        threshold = *mc.event_threshold;
    }
    if (threshold != report.event_threshold)
        throw std::invalid_argument("event mismatch: bound is for X < " + std::to_string(report.event_threshold) +
                                    ", empirical probability is for X < " + std::to_string(threshold));

    AuditVerdict v;
    v.empirical = empirical;
    v.bound_value = report.bound;
    v.margin = report.bound - hi;
    if (report.exact_zero_event) v.verdict = Verdict::exact_zero_event;
    else if (hi <= report.bound) v.verdict = Verdict::holds;
    else if (lo > report.bound) v.verdict = Verdict::violated;
    else v.verdict = Verdict::inconclusive;
    return v;
}

}  // namespace sdpbound
