#pragma once

#include "socrs/counting.hpp"
#include "socrs/dist.hpp"
#include "socrs/element_set.hpp"
#include "socrs/rational.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace socrs {

// Deterministic random source keyed by (seed, stream). `counter` is the number of 64-bit words drawn,
// so a stream can be rebuilt at any position with `RngStream(seed, stream).skip(counter)`.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next();
    // Multiple of 2^-53 in [0, 1).
    double uniform();
    bool bernoulli(double p) { return uniform() < p; }
    // Uniform on {0, ..., n - 1}.
    std::uint64_t below(std::uint64_t n);
    RngStream& skip(std::uint64_t words);

    // For std:: algorithms such as std::shuffle.
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return next(); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::mt19937_64 engine_;
};

// The uniform draw as an exact rational, for comparisons against exact probabilities.
Rational exact_uniform(RngStream& rng);

// Inverse CDF over the support in its stored (size-lex) order.
ElementSet sample_explicit(const ExplicitDistribution& dist, RngStream& rng);
ElementSet sample_explicit(const RationalDistribution& dist, RngStream& rng);

// Counting-to-sampling: elements are visited in ascending order and element k joins with probability
// Z[I + k, J] / Z[I, J], where I and J are the elements already taken and refused.
// Exact mode compares an exact uniform against exact ratios.
ElementSet sample_sequential(const CountingOracle& oracle, std::span<const Rational> w, RngStream& rng);
// Double mode. Conditionals leaving [0, 1] by more than 1e-9 are errors; smaller excursions are clamped.
// Sets with more than 8 elements are out of reach of double interpolation (InputError).
ElementSet sample_sequential(const CountingOracle& oracle, std::span<const double> w, RngStream& rng);

struct ThinningVector {
    std::vector<double> tau;

    ThinningVector() = default;
    // Throws InputError unless every entry is in [0, 1].
    explicit ThinningVector(std::vector<double> retention);
    static ThinningVector constant(int n, double value) { return ThinningVector(std::vector<double>(n, value)); }
};

// Keeps each element of s independently with probability tau_e; one draw per element of s, ascending.
ElementSet thin(ElementSet s, const ThinningVector& tau, RngStream& rng);

// Half the L1 distance between the empirical law of the samples and the reference.
double empirical_tv(std::span<const ElementSet> samples, const ExplicitDistribution& reference);
// Same, between two sample sets.
double empirical_tv(std::span<const ElementSet> a, std::span<const ElementSet> b);

// Per-atom 3-sigma bound on the TV of an N-sample empirical law: 3/2 sum_S sqrt(p_S (1 - p_S) / N).
double multinomial_tv_bound(const ExplicitDistribution& reference, std::size_t samples);

}  // namespace socrs
