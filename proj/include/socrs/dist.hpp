#pragma once

#include "socrs/counting.hpp"
#include "socrs/env.hpp"
#include "socrs/rational.hpp"

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace socrs {

// Explicit law over feasible sets; P is double or Rational.
template <class P>
class BasicDistribution {
public:
    using Entry = std::pair<ElementSet, P>;

    // Zero-probability entries are dropped and the support is stored in size-lex order.
    // Throws InputError on negative mass, infeasible support sets, duplicates, or a total away from 1.
    BasicDistribution(Environment env, std::vector<Entry> entries);

    const Environment& environment() const { return env_; }
    const std::vector<Entry>& entries() const { return entries_; }
    P probability(ElementSet s) const;
    P marginal(int e) const;
    std::vector<P> marginals() const;

private:
    Environment env_;
    std::vector<Entry> entries_;
    std::unordered_map<ElementSet, std::size_t, ElementSetHash> index_;
};

using ExplicitDistribution = BasicDistribution<double>;
using RationalDistribution = BasicDistribution<Rational>;

ExplicitDistribution to_double(const RationalDistribution& d);

// Law proportional to prod_{e in S} w_e on the feasible family, parameterized by theta = log w.
class GibbsDistribution {
public:
    GibbsDistribution(Environment env, std::vector<double> log_weights, OraclePtr oracle);

    const Environment& environment() const { return env_; }
    const CountingOracle& oracle() const { return *oracle_; }
    OraclePtr oracle_handle() const { return oracle_; }
    std::span<const double> log_weights() const { return theta_; }
    double weight(int e) const;
    // w_e / (1 + w_e)
    double rho(int e) const;
    double log_partition() const { return log_z_; }
    std::vector<double> marginals() const;
    double probability(ElementSet s) const;
    ExplicitDistribution materialize(std::size_t cap = kDefaultEnumerationCap) const;
    // Same law with each weight replaced by the exact value of the double exp(theta_e).
    RationalDistribution materialize_exact(std::size_t cap = kDefaultEnumerationCap) const;

private:
    Environment env_;
    std::vector<double> theta_;
    OraclePtr oracle_;
    double log_z_ = 0;
};

// P[e in S | S - e = t]. Pre: e not in t.
double conditional_without(const GibbsDistribution& dist, int e, ElementSet t);
template <class P>
P conditional_without(const BasicDistribution<P>& dist, int e, ElementSet t);

template <class P>
struct CapViolation {
    int element = 0;
    ElementSet given;
    P conditional{};
    P x{};
};

template <class P>
struct StationaryReport {
    P alpha_achieved{};
    int weakest_element = -1;
    // Selectability at the requested alpha (within the tolerance passed to the verifier).
    bool selectable = false;
    std::vector<CapViolation<P>> violated_caps;
    P max_cap_excess{};
    std::size_t checked_pairs = 0;

    bool holds() const { return selectable && violated_caps.empty(); }
};

// Checks P[e in S] >= alpha x_e - tol and P[e in S | S - e = T] <= x_e + tol over every pair with
// P[S - e = T] > 0. Exact for Rational with tol = 0.
template <class P>
StationaryReport<P> verify_stationary_lp(const BasicDistribution<P>& dist, std::span<const P> x, const P& alpha,
                                         const P& tol = P(0));
// Materializes the Gibbs law; throws TooLargeError past the enumeration cap.
StationaryReport<double> verify_stationary_lp(const GibbsDistribution& dist, std::span<const double> x, double alpha,
                                              double tol = 1e-12);

// Structured text with rationals as "p/q" strings.
std::string report_json(const StationaryReport<double>& r);
std::string report_json(const StationaryReport<Rational>& r);

struct Addability {
    double p_add = 0;
    double marginal = 0;
    double rho = 0;
    // |marginal - p_add * rho|
    double residual = 0;
};

// P[S - e + e feasible] under the Gibbs law, with the factorization residual.
Addability addability_prob(const GibbsDistribution& dist, int e);

}  // namespace socrs
