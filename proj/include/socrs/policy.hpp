#pragma once

#include "socrs/dist.hpp"
#include "socrs/env.hpp"
#include "socrs/sampling.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace socrs {

// What the online policy needs from a distribution over feasible sets.
class Witness {
public:
    virtual ~Witness() = default;
    virtual const Environment& environment() const = 0;
    // P[e in S | S - e = t].
    virtual double conditional(int e, ElementSet t) const = 0;
    virtual ElementSet sample(RngStream& rng) const = 0;
    // The full table; TooLargeError when it cannot be listed.
    virtual ExplicitDistribution law() const = 0;
    int size() const { return environment().size(); }
};

using WitnessPtr = std::shared_ptr<const Witness>;

class ExplicitWitness final : public Witness {
public:
    explicit ExplicitWitness(ExplicitDistribution dist) : dist_(std::move(dist)) {}
    const Environment& environment() const override { return dist_.environment(); }
    double conditional(int e, ElementSet t) const override { return conditional_without(dist_, e, t); }
    ElementSet sample(RngStream& rng) const override { return sample_explicit(dist_, rng); }
    ExplicitDistribution law() const override { return dist_; }

private:
    ExplicitDistribution dist_;
};

// Gibbs conditionals are rho_e when T + e is feasible and 0 otherwise. Sampling goes through the
// materialized table when the family is small enough, else through the sequential sampler.
class GibbsWitness final : public Witness {
public:
    explicit GibbsWitness(GibbsDistribution dist, std::size_t table_cap = 200'000);
    const Environment& environment() const override { return dist_.environment(); }
    double conditional(int e, ElementSet t) const override { return conditional_without(dist_, e, t); }
    ElementSet sample(RngStream& rng) const override;
    ExplicitDistribution law() const override;
    const GibbsDistribution& distribution() const { return dist_; }

private:
    GibbsDistribution dist_;
    std::optional<ExplicitDistribution> table_;
};

struct PolicyState {
    ElementSet simulated;
    ElementSet accepted;
    ElementSet processed;
};

inline constexpr double kCapSlack = 1e-9;

// One arrival. Throws CapViolationError when the conditional exceeds x_e by more than kCapSlack.
// The coin is drawn only for active arrivals with 0 < q_e < x_e.
bool policy_step(const Witness& witness, std::span<const double> x, PolicyState& state, int e, bool active,
                 RngStream& rng);

// What an adaptive order may look at.
struct PublicEvent {
    int element = 0;
    bool active = false;
    bool accepted = false;
};

struct PublicHistory {
    std::span<const PublicEvent> events;
    ElementSet unprocessed;
};

using AdaptiveOrder = std::function<int(const PublicHistory&)>;

class OrderStrategy {
public:
    enum class Kind { Fixed, SeededRandom, Adaptive, GreedyBlocker };

    static OrderStrategy fixed(std::vector<int> permutation);
    static OrderStrategy ascending(int n);
    static OrderStrategy seeded_random(std::uint64_t seed);
    static OrderStrategy adaptive(AdaptiveOrder next, std::string name = "adaptive");
    // Ascending order with `target` held back to the end.
    static OrderStrategy target_last(int target);
    // Adaptive: after an acceptance the largest waiting element comes next, otherwise the smallest.
    static OrderStrategy chase();
    // Debug only: looks at the simulated set and brings blocked elements forward.
    static OrderStrategy greedy_blocker();

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    bool sees_simulated() const { return kind_ == Kind::GreedyBlocker; }
    bool is_fixed() const { return kind_ == Kind::Fixed || kind_ == Kind::SeededRandom; }
    // The permutation of a fixed or seeded-random strategy over n elements.
    std::vector<int> permutation(int n) const;
    // Next element; `simulated` is consulted only by the debug strategy.
    int next(const Environment& env, const PublicHistory& history, ElementSet simulated) const;

private:
    Kind kind_ = Kind::Fixed;
    std::string name_;
    std::vector<int> permutation_;
    std::uint64_t seed_ = 0;
    AdaptiveOrder next_;
};

// ascending | descending | random | chase | greedy-blocker | target-last:E | fixed:E,E,...
// `random` uses `seed`.
OrderStrategy parse_order(const std::string& spec, int n, std::uint64_t seed);

struct TraceRow {
    int element = 0;
    int renewal = 0;
    bool active = false;
    bool accepted = false;
};

struct OneShotResult {
    ElementSet accepted;
    ElementSet simulated;
    std::vector<TraceRow> trace;
};

// Initial simulated set from the witness, then every element once in strategy order. Activations are
// drawn at arrival unless given.
OneShotResult run_one_shot(const Witness& witness, std::span<const double> x, const OrderStrategy& strategy,
                           RngStream& rng, std::optional<ElementSet> activations = std::nullopt);

struct RecurringEvent {
    int element = 0;
    int renewal = 0;
    // Drawn with probability x_e when absent.
    std::optional<bool> active;
};

// Each renewal forgets the element's membership and redraws it. Throws InputError when renewal
// indices of an element are not strictly increasing.
std::vector<TraceRow> run_recurring(const Witness& witness, std::span<const double> x,
                                    std::span<const RecurringEvent> events, RngStream& rng);

// "element,renewal,active,accepted" rows with a header line.
void write_trace(std::ostream& out, std::span<const TraceRow> rows);
std::vector<TraceRow> read_trace(std::istream& in);

struct OutputLaw {
    std::vector<std::pair<ElementSet, double>> law;  // size-lex order
    std::vector<double> selection;                  // P[e in output]
    std::size_t atoms = 0;
};

inline constexpr std::size_t kExactAtomLimit = 1'000'000;

// Exact law of the output set, summing over the witness draw, activations, and coins. Fixed orders
// propagate the law of the simulated set one element at a time; adaptive orders expand the tree of
// public histories. `atoms` counts (state, branch) expansions; past `atom_limit` it throws TooLargeError.
OutputLaw exact_output_law(const Witness& witness, std::span<const double> x, const OrderStrategy& strategy,
                           std::size_t atom_limit = kExactAtomLimit);

double total_variation(std::span<const std::pair<ElementSet, double>> law, const ExplicitDistribution& reference);

}  // namespace socrs
