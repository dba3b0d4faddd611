#pragma once

#include "socrs/counting.hpp"
#include "socrs/dist.hpp"
#include "socrs/maxent.hpp"
#include "socrs/policy.hpp"
#include "socrs/sampling.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace socrs {

// Independent set drawn by sampling a base from the tilted base measure and thinning it.
struct RayleighWitness {
    BaseMeasure base;
    std::vector<double> x;
    double scale = 1.0;
    std::vector<double> base_point;  // dominates x / scale
    KlProjection projection;         // tilt whose base marginals approximate base_point
    std::vector<double> tilt;        // exp(projection.log_w)
    // Net retention: scale / (1 + scale) * min(1, x_e / (scale * achieved_e)).
    ThinningVector tau;
};

struct RayleighBuildOptions {
    double scale = 1.0;
    DualOptions dual;
    double shrink = kDefaultShrink;
    // Screen the base measure with rayleigh_check when its bases can be listed.
    bool screen_base = true;
    int screen_trials = 20;
    std::uint64_t screen_seed = 1;
    std::size_t screen_cap = 20'000;
};

// Dominating base point, KL tilt toward it, then thinning. Throws InputError when the base measure
// fails the Rayleigh screen.
RayleighWitness build_witness(const BaseMeasure& base, std::span<const double> x, const RayleighBuildOptions& options = {});

// P[mu*(T + e)] / (P[mu*(T)] + P[mu*(T + e)]) from exact thinned masses; 0 when T + e is dependent.
// Throws NumericalError when both masses vanish.
double pi_conditional(const RayleighWitness& witness, int e, ElementSet t);

// Exact law of the thinned output over all independent sets.
RationalDistribution materialize_exact(const RayleighWitness& witness, std::size_t cap = 200'000);
ExplicitDistribution materialize(const RayleighWitness& witness, std::size_t cap = 200'000);

// Policy view: conditionals from pi_conditional, draws from a tabulated or sequentially sampled base.
class RayleighPolicyWitness final : public Witness {
public:
    explicit RayleighPolicyWitness(RayleighWitness witness);
    const Environment& environment() const override { return env_; }
    double conditional(int e, ElementSet t) const override { return pi_conditional(witness_, e, t); }
    ElementSet sample(RngStream& rng) const override;
    ExplicitDistribution law() const override { return materialize(witness_); }

private:
    RayleighWitness witness_;
    Environment env_;
    std::optional<ExplicitDistribution> tilted_bases_;
};

// q, tilt, tau, and the explicit output table when one is given.
std::string witness_json(const RayleighWitness& witness, const ExplicitDistribution* table = nullptr);

struct RayleighReport {
    bool pass = true;
    // min over tilts and pairs (T, e not in T) of P[T in B] P[e in B] - P[T + e in B].
    double worst_slack = 0.0;
    double worst_pair_slack = 0.0;  // same, restricted to |T| = 1
    ElementSet worst_set;
    int worst_element = -1;
    std::vector<double> worst_tilt;  // empty: the untilted measure
    int tilts_checked = 0;
};

// The untilted measure plus `trials` tilts with weights log-uniform in [e^-5, e^5], each checked over every
// (T, e). `tol` is the allowed negative slack.
RayleighReport rayleigh_check(int n, std::span<const ElementSet> bases, std::span<const double> masses, int trials,
                              RngStream& rng, double tol = 1e-12);
RayleighReport rayleigh_check(const BaseMeasure& base, int trials, RngStream& rng, double tol = 1e-12);

}  // namespace socrs
