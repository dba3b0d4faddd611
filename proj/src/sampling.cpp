#include "socrs/sampling.hpp"

#include "socrs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace socrs {

namespace {

std::seed_seq seed_words(std::uint64_t seed, std::uint64_t stream) {
    return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    auto words = seed_words(seed, stream);
    return std::mt19937_64(words);
}

template <class P>
ElementSet inverse_cdf(const BasicDistribution<P>& dist, const P& u) {
    const auto& entries = dist.entries();
    P cumulative = 0;
    for (const auto& [s, p] : entries) {
        cumulative += p;
        if (u < cumulative) return s;
    }
    // Rounding in the double total; the last atom absorbs it.
    return entries.back().first;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

std::uint64_t RngStream::next() {
    ++counter_;
    return engine_();
}

double RngStream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t RngStream::below(std::uint64_t n) {
    if (n == 0) throw InputError("below(0)");
    // Rejection keeps the result exactly uniform.
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
}

RngStream& RngStream::skip(std::uint64_t words) {
    engine_.discard(words);
    counter_ += words;
    return *this;
}

Rational exact_uniform(RngStream& rng) {
    Rational u(rng.uniform());
    return u;
}

ElementSet sample_explicit(const ExplicitDistribution& dist, RngStream& rng) { return inverse_cdf(dist, rng.uniform()); }

ElementSet sample_explicit(const RationalDistribution& dist, RngStream& rng) {
    return inverse_cdf(dist, exact_uniform(rng));
}

ElementSet sample_sequential(const CountingOracle& oracle, std::span<const Rational> w, RngStream& rng) {
    const int n = oracle.size();
    if (static_cast<int>(w.size()) != n) throw InputError("weight vector length does not match the ground set");
    // Refused elements get weight zero; only the taken ones need interpolation.
    std::vector<Rational> point(w.begin(), w.end());
    ElementSet taken;
    Rational current = constrained_count(oracle, point, taken, ElementSet{});
    if (sgn(current) <= 0) throw NumericalError("sequential sampler: zero partition function");
    for (int k = 0; k < n; ++k) {
        if (sgn(point[k]) == 0) continue;
        const Rational with = constrained_count(oracle, point, taken.with(k), ElementSet{});
        if (exact_uniform(rng) < with / current) {
            taken = taken.with(k);
            current = with;
        } else {
            point[k] = 0;
            current -= with;
        }
        if (sgn(current) <= 0) throw NumericalError("sequential sampler reached an impossible prefix");
    }
    return taken;
}

ElementSet sample_sequential(const CountingOracle& oracle, std::span<const double> w, RngStream& rng) {
    const int n = oracle.size();
    if (static_cast<int>(w.size()) != n) throw InputError("weight vector length does not match the ground set");
    std::vector<double> point(w.begin(), w.end());
    ElementSet taken;
    double current = constrained_count(oracle, point, taken, ElementSet{});
    if (!(current > 0)) throw NumericalError("sequential sampler: zero partition function");
    for (int k = 0; k < n; ++k) {
        if (point[k] == 0) continue;
        const double with = constrained_count(oracle, point, taken.with(k), ElementSet{});
        double ratio = with / current;
        if (ratio < -1e-9 || ratio > 1 + 1e-9 || !std::isfinite(ratio))
            throw NumericalError("sequential sampler conditional " + std::to_string(ratio) + " outside [0, 1] at element " +
                                 std::to_string(k));
        ratio = std::clamp(ratio, 0.0, 1.0);
        if (rng.uniform() < ratio) {
            taken = taken.with(k);
            current = with;
        } else {
            point[k] = 0;
            current = current - with;
            // Recompute rather than subtract when cancellation has eaten the difference.
            if (!(current > 1e-12 * with)) current = constrained_count(oracle, point, taken, ElementSet{});
        }
        if (!(current > 0)) throw NumericalError("sequential sampler reached an impossible prefix");
    }
    return taken;
}

ThinningVector::ThinningVector(std::vector<double> retention) : tau(std::move(retention)) {
    for (std::size_t e = 0; e < tau.size(); ++e)
        if (!(tau[e] >= 0.0 && tau[e] <= 1.0))
            throw InputError("retention probability of element " + std::to_string(e) + " is outside [0, 1]");
}

ElementSet thin(ElementSet s, const ThinningVector& tau, RngStream& rng) {
    ElementSet kept;
    s.for_each([&](int e) {
        if (e >= static_cast<int>(tau.tau.size())) throw InputError("thinning vector is shorter than the set");
        if (rng.bernoulli(tau.tau[e])) kept = kept.with(e);
    });
    return kept;
}

namespace {

std::map<std::uint64_t, double> frequencies(std::span<const ElementSet> samples) {
    std::map<std::uint64_t, double> freq;
    if (samples.empty()) throw InputError("no samples");
    const double unit = 1.0 / static_cast<double>(samples.size());
    for (ElementSet s : samples) freq[s.bits()] += unit;
    return freq;
}

}  // namespace

double empirical_tv(std::span<const ElementSet> samples, const ExplicitDistribution& reference) {
    auto freq = frequencies(samples);
    double total = 0;
    for (const auto& [s, p] : reference.entries()) {
        auto it = freq.find(s.bits());
        const double f = it == freq.end() ? 0.0 : it->second;
        total += std::abs(f - p);
        if (it != freq.end()) freq.erase(it);
    }
    for (const auto& [bits, f] : freq) total += f;
    return std::min(1.0, 0.5 * total);
}

double empirical_tv(std::span<const ElementSet> a, std::span<const ElementSet> b) {
    const auto fa = frequencies(a);
    auto fb = frequencies(b);
    double total = 0;
    for (const auto& [bits, f] : fa) {
        auto it = fb.find(bits);
        total += std::abs(f - (it == fb.end() ? 0.0 : it->second));
        if (it != fb.end()) fb.erase(it);
    }
    for (const auto& [bits, f] : fb) total += f;
    return std::min(1.0, 0.5 * total);
}

double multinomial_tv_bound(const ExplicitDistribution& reference, std::size_t samples) {
    double total = 0;
    for (const auto& [s, p] : reference.entries()) total += std::sqrt(p * (1 - p) / static_cast<double>(samples));
    return 1.5 * total;
}

}  // namespace socrs
