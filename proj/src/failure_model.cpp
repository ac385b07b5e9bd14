#include "sdpbound/failure_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "sdpbound/error.hpp"
#include "summation.hpp"

namespace sdpbound {
namespace {

// Stirling-series remainder: log(n!) - [(n + 1/2) log n - n + log sqrt(2 pi)].
double stirlerr(double n) {
    static const auto small = [] {
        std::array<double, 16> table{};
        const long double log_sqrt_2pi = 0.5L * std::log(2.0L * std::numbers::pi_v<long double>);
        for (int i = 1; i < 16; ++i) {
            long double x = i;
            table[i] = static_cast<double>(std::lgamma(x + 1.0L) - (x + 0.5L) * std::log(x) + x - log_sqrt_2pi);
        }
        return table;
    }();
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    if (n < 16) return small[static_cast<std::size_t>(n)];
    const double nn = n * n;
    if (n > 500) return (s0 - s1 / nn) / n;
    if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
    if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x / np) + np - x, with a series near x = np to avoid cancellation.
double bd0(double x, double np) {
    if (std::abs(x - np) < 0.1 * (x + np)) {
        const double v = (x - np) / (x + np);
        double s = (x - np) * v;
        double ej = 2 * x * v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v * v;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
        return s;
    }
    return x * std::log(x / np) + np - x;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

FailurePopulation::FailurePopulation(std::uint64_t l, double p) : l_(l), p_(p) {
    if (l < 1) throw DomainError("l must be at least 1 (no predicted-clean modules)");
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("p must lie in (0, 1); need at least one false negative and one true negative, got " +
                          std::to_string(p));
}

double expected_failures(const FailurePopulation& pop) {
    return static_cast<double>(pop.l()) * pop.p();
}

double binomial_log_pmf(const FailurePopulation& pop, std::uint64_t k) {
    const auto l = pop.l();
    const double p = pop.p();
    if (k > l) throw DomainError("k = " + std::to_string(k) + " exceeds l = " + std::to_string(l));
    const double n = static_cast<double>(l);
    const double x = static_cast<double>(k);
    if (k == 0) return n * std::log1p(-p);
    if (k == l) return n * std::log(p);
    const double q = 1.0 - p;
    const double lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
    return lc + 0.5 * std::log(n / (2 * std::numbers::pi * x * (n - x)));
}

double binomial_pmf(const FailurePopulation& pop, std::uint64_t k) {
    return std::exp(binomial_log_pmf(pop, k));
}

double binomial_cdf_below(const FailurePopulation& pop, double threshold) {
    if (!(threshold > 0.0)) return 0.0;
    if (threshold > static_cast<double>(pop.l())) return 1.0;
    // threshold in (0, l]: sum k = 0 .. ceil(threshold) - 1
    const auto k_end = static_cast<std::uint64_t>(std::ceil(threshold));
    detail::NeumaierSum sum;
    for (std::uint64_t k = 0; k < k_end; ++k) sum += binomial_pmf(pop, k);
    return std::min(sum.value(), 1.0);
}

RandomStream RandomStream::substream(std::uint64_t seed, std::uint64_t block) {
    return RandomStream(splitmix64(seed ^ splitmix64(block)));
}

BinomialSampler::BinomialSampler(const FailurePopulation& pop, SamplingMethod method)
    : pop_(pop), method_(method) {
    if (method_ != SamplingMethod::inversion) return;
    cdf_.reserve(pop.l() + 1);
    detail::NeumaierSum sum;
    for (std::uint64_t k = 0; k <= pop.l(); ++k) {
        sum += binomial_pmf(pop, k);
        cdf_.push_back(sum.value());
    }
}

std::uint64_t BinomialSampler::invert(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) {
        // u landed in the rounding gap above the summed mass; take the top of the support.
        auto last = std::adjacent_find(cdf_.rbegin(), cdf_.rend(), std::not_equal_to<>());
        return last == cdf_.rend() ? 0
                                   : static_cast<std::uint64_t>(cdf_.rend() - last - 1);
    }
    return static_cast<std::uint64_t>(it - cdf_.begin());
}

std::uint64_t sample_failures(const FailurePopulation& pop, RandomStream& rng, SamplingMethod method) {
    return BinomialSampler(pop, method)(rng);
}

}  // namespace sdpbound
