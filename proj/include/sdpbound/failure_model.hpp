#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sdpbound {

/// l predicted-clean modules, each hiding a defect independently with probability p.
/// X, the number of hidden failures, is Binomial(l, p).
class FailurePopulation {
public:
    /// Throws DomainError unless l >= 1 and 0 < p < 1.
    FailurePopulation(std::uint64_t l, double p);

    std::uint64_t l() const noexcept { return l_; }
    double p() const noexcept { return p_; }

    friend bool operator==(const FailurePopulation&, const FailurePopulation&) = default;

private:
    std::uint64_t l_;
    double p_;
};

/// E[X] = l * p.
double expected_failures(const FailurePopulation& pop);

/// log Pr[X = k] via Loader's saddle-point expansion. Throws DomainError for k > l.
double binomial_log_pmf(const FailurePopulation& pop, std::uint64_t k);
double binomial_pmf(const FailurePopulation& pop, std::uint64_t k);

/// Pr[X < threshold] (strict). 0 for threshold <= 0, 1 for threshold > l.
double binomial_cdf_below(const FailurePopulation& pop, double threshold);

/// Seeded 64-bit stream producing 53-bit uniforms in [0, 1).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Independent substream for block `block` of a computation seeded with `seed`.
    static RandomStream substream(std::uint64_t seed, std::uint64_t block);

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

enum class SamplingMethod {
    inversion,  // exact: one uniform per draw against the cumulative PMF table
    bernoulli,  // l indicator draws X_i = [u_i < p], summed
};

/// Draws X ~ Binomial(l, p). Holds the CDF table for inversion; const after construction
/// so one sampler can serve many threads, each with its own RandomStream.
class BinomialSampler {
public:
    explicit BinomialSampler(const FailurePopulation& pop,
                             SamplingMethod method = SamplingMethod::inversion);

    const FailurePopulation& population() const noexcept { return pop_; }
    SamplingMethod method() const noexcept { return method_; }

    /// `uniform` is any callable returning doubles in [0, 1); a constant source is a
    /// convenient test double (0.0 forces every Bernoulli indicator to 1).
    template <class UniformSource>
    std::uint64_t operator()(UniformSource&& uniform) const {
        if (method_ == SamplingMethod::bernoulli) {
            std::uint64_t x = 0;
            for (std::uint64_t i = 0; i < pop_.l(); ++i) x += uniform() < pop_.p() ? 1 : 0;
            return x;
        }
        return invert(uniform());
    }

    std::uint64_t operator()(RandomStream& rng) const {
        return (*this)([&rng] { return rng.uniform(); });
    }

    /// Smallest k with Pr[X <= k] > u.
    std::uint64_t invert(double u) const;

private:
    FailurePopulation pop_;
    SamplingMethod method_;
    std::vector<double> cdf_;
};

/// One draw of X. Builds a sampler per call; reuse a BinomialSampler for bulk sampling.
std::uint64_t sample_failures(const FailurePopulation& pop, RandomStream& rng,
                              SamplingMethod method = SamplingMethod::inversion);

}  // namespace sdpbound
