#include "socrs/policy.hpp"

#include "socrs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace socrs {

GibbsWitness::GibbsWitness(GibbsDistribution dist, std::size_t table_cap) : dist_(std::move(dist)) {
    try {
        table_ = dist_.materialize(table_cap);
    } catch (const TooLargeError&) {
        table_.reset();
    }
}

ElementSet GibbsWitness::sample(RngStream& rng) const {
    if (table_) return sample_explicit(*table_, rng);
    std::vector<double> w;
    for (int e = 0; e < dist_.environment().size(); ++e) w.push_back(dist_.weight(e));
    return sample_sequential(dist_.oracle(), w, rng);
}

ExplicitDistribution GibbsWitness::law() const { return table_ ? *table_ : dist_.materialize(); }

namespace {

void check_inputs(const Witness& witness, std::span<const double> x) {
    if (static_cast<int>(x.size()) != witness.size()) throw InputError("x has the wrong length");
    for (double v : x)
        if (!(v > 0.0 && v <= 1.0)) throw InputError("activation probabilities must lie in (0, 1]");
}

// Probability that an active arrival is accepted, times x_e: min(q, x_e) after the cap check.
double checked_conditional(const Witness& witness, std::span<const double> x, int e, ElementSet t) {
    const double q = witness.conditional(e, t);
    if (q > x[e] + kCapSlack) throw CapViolationError(e, to_string(t), q, x[e]);
    return std::min(q, x[e]);
}

}  // namespace

bool policy_step(const Witness& witness, std::span<const double> x, PolicyState& state, int e, bool active,
                 RngStream& rng) {
    if (e < 0 || e >= witness.size()) throw InputError("element id out of range");
    if (state.processed.contains(e)) throw InputError("element " + std::to_string(e) + " already processed");
    const ElementSet t = state.simulated.without(e);
    const double q = checked_conditional(witness, x, e, t);
    state.processed = state.processed.with(e);
    state.simulated = t;
    if (!active || q <= 0.0) return false;
    const double ratio = q / x[e];
    if (ratio < 1.0 && !rng.bernoulli(ratio)) return false;
    state.simulated = t.with(e);
    state.accepted = state.accepted.with(e);
    return true;
}

// ---------------------------------------------------------------- orders

OrderStrategy OrderStrategy::fixed(std::vector<int> permutation) {
    OrderStrategy s;
    s.kind_ = Kind::Fixed;
    s.name_ = "fixed";
    s.permutation_ = std::move(permutation);
    return s;
}

OrderStrategy OrderStrategy::ascending(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    auto s = fixed(std::move(p));
    s.name_ = "ascending";
    return s;
}

OrderStrategy OrderStrategy::seeded_random(std::uint64_t seed) {
    OrderStrategy s;
    s.kind_ = Kind::SeededRandom;
    s.name_ = "random-" + std::to_string(seed);
    s.seed_ = seed;
    return s;
}

OrderStrategy OrderStrategy::adaptive(AdaptiveOrder next, std::string name) {
    OrderStrategy s;
    s.kind_ = Kind::Adaptive;
    s.name_ = std::move(name);
    s.next_ = std::move(next);
    return s;
}

OrderStrategy OrderStrategy::target_last(int target) {
    auto s = adaptive(
        [target](const PublicHistory& h) {
            const ElementSet rest = h.unprocessed.without(target);
            return rest.empty() ? target : rest.elements().front();
        },
        "target-last-" + std::to_string(target));
    return s;
}

OrderStrategy OrderStrategy::chase() {
    return adaptive(
        [](const PublicHistory& h) {
            const bool took = !h.events.empty() && h.events.back().accepted;
            return took ? h.unprocessed.max_element() : h.unprocessed.elements().front();
        },
        "chase");
}

OrderStrategy OrderStrategy::greedy_blocker() {
    OrderStrategy s;
    s.kind_ = Kind::GreedyBlocker;
    s.name_ = "greedy-blocker";
    return s;
}

OrderStrategy parse_order(const std::string& spec, int n, std::uint64_t seed) {
    auto parse_element = [&](const std::string& text) {
        std::size_t used = 0;
        int e = -1;
        try {
            e = std::stoi(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != text.size() || e < 0 || e >= n) throw InputError("bad element '" + text + "' in order '" + spec + "'");
        return e;
    };
    if (spec == "ascending") return OrderStrategy::ascending(n);
    if (spec == "descending") {
        std::vector<int> p(static_cast<std::size_t>(n));
        std::iota(p.rbegin(), p.rend(), 0);
        return OrderStrategy::fixed(std::move(p));
    }
    if (spec == "random") return OrderStrategy::seeded_random(seed);
    if (spec == "chase") return OrderStrategy::chase();
    if (spec == "greedy-blocker") return OrderStrategy::greedy_blocker();
    if (spec.starts_with("target-last:")) return OrderStrategy::target_last(parse_element(spec.substr(12)));
    if (spec.starts_with("fixed:")) {
        std::vector<int> p;
        std::string rest = spec.substr(6);
        for (std::size_t at = 0; at <= rest.size();) {
            const std::size_t comma = std::min(rest.find(',', at), rest.size());
            p.push_back(parse_element(rest.substr(at, comma - at)));
            at = comma + 1;
        }
        auto s = OrderStrategy::fixed(std::move(p));
        s.permutation(n);
        return s;
    }
    throw InputError("unknown order '" + spec + "'");
}

std::vector<int> OrderStrategy::permutation(int n) const {
    if (kind_ == Kind::Fixed) {
        std::vector<int> sorted = permutation_;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < static_cast<int>(sorted.size()); ++i)
            if (sorted[i] != i || static_cast<int>(sorted.size()) != n)
                throw InputError("fixed order is not a permutation of the ground set");
        return permutation_;
    }
    if (kind_ == Kind::SeededRandom) {
        std::vector<int> p(static_cast<std::size_t>(n));
        std::iota(p.begin(), p.end(), 0);
        RngStream rng(seed_, 0);
        for (int i = n - 1; i > 0; --i) std::swap(p[i], p[rng.below(static_cast<std::uint64_t>(i) + 1)]);
        return p;
    }
    throw InputError("order '" + name_ + "' has no fixed permutation");
}

int OrderStrategy::next(const Environment& env, const PublicHistory& history, ElementSet simulated) const {
    if (history.unprocessed.empty()) throw InputError("no element left to arrive");
    int e = -1;
    switch (kind_) {
        case Kind::Fixed:
        case Kind::SeededRandom: {
            // Only used through permutation(); kept total for callers that step manually.
            const auto p = permutation(env.size());
            e = p[history.events.size()];
            break;
        }
        case Kind::Adaptive: e = next_(history); break;
        case Kind::GreedyBlocker: {
            for (int f : history.unprocessed.elements())
                if (!simulated.contains(f) && !env.can_add(simulated, f)) return f;
            e = history.unprocessed.elements().front();
            break;
        }
    }
    if (e < 0 || !history.unprocessed.contains(e))
        throw InputError("order '" + name_ + "' chose an element that is not waiting to arrive");
    return e;
}

// ---------------------------------------------------------------- runs

OneShotResult run_one_shot(const Witness& witness, std::span<const double> x, const OrderStrategy& strategy,
                           RngStream& rng, std::optional<ElementSet> activations) {
    check_inputs(witness, x);
    const Environment& env = witness.environment();
    const int n = env.size();
    std::vector<int> order;
    if (strategy.is_fixed()) order = strategy.permutation(n);

    PolicyState state;
    state.simulated = witness.sample(rng);
    OneShotResult out;
    std::vector<PublicEvent> history;
    for (int i = 0; i < n; ++i) {
        const ElementSet waiting = ElementSet::full(n) - state.processed;
        const int e = strategy.is_fixed() ? order[i] : strategy.next(env, {history, waiting}, state.simulated);
        const bool active = activations ? activations->contains(e) : rng.bernoulli(x[e]);
        const bool accepted = policy_step(witness, x, state, e, active, rng);
        if (!env.is_feasible(state.simulated)) throw NumericalError("simulated set became infeasible");
        history.push_back({e, active, accepted});
        out.trace.push_back({e, 0, active, accepted});
    }
    out.accepted = state.accepted;
    out.simulated = state.simulated;
    return out;
}

std::vector<TraceRow> run_recurring(const Witness& witness, std::span<const double> x,
                                    std::span<const RecurringEvent> events, RngStream& rng) {
    check_inputs(witness, x);
    const Environment& env = witness.environment();
    std::vector<int> last_renewal(static_cast<std::size_t>(env.size()), -1);
    ElementSet simulated = witness.sample(rng);
    std::vector<TraceRow> rows;
    rows.reserve(events.size());
    for (const auto& ev : events) {
        if (ev.element < 0 || ev.element >= env.size()) throw InputError("trace element out of range");
        if (ev.renewal <= last_renewal[ev.element])
            throw InputError("renewal indices of element " + std::to_string(ev.element) + " must increase");
        last_renewal[ev.element] = ev.renewal;
        PolicyState state{simulated, ElementSet{}, ElementSet{}};
        const bool active = ev.active ? *ev.active : rng.bernoulli(x[ev.element]);
        const bool accepted = policy_step(witness, x, state, ev.element, active, rng);
        simulated = state.simulated;
        if (!env.is_feasible(simulated)) throw NumericalError("simulated set became infeasible");
        rows.push_back({ev.element, ev.renewal, active, accepted});
    }
    return rows;
}

void write_trace(std::ostream& out, std::span<const TraceRow> rows) {
    out << "element,renewal,active,accepted\n";
    for (const auto& r : rows) out << r.element << ',' << r.renewal << ',' << int(r.active) << ',' << int(r.accepted) << '\n';
}

std::vector<TraceRow> read_trace(std::istream& in) {
    std::vector<TraceRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.starts_with("element")) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        TraceRow r;
        int active = 0, accepted = 0;
        if (!(fields >> r.element >> r.renewal >> active) || r.element < 0 || active < 0 || active > 1)
            throw InputError("bad trace row at line " + std::to_string(line_no));
        // The accepted column is optional when the trace is used for replay.
        if (fields >> accepted && (accepted < 0 || accepted > 1))
            throw InputError("bad trace row at line " + std::to_string(line_no));
        r.active = active;
        r.accepted = accepted;
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------- exact expansion

namespace {

using Measure = std::map<std::uint64_t, double>;

struct Expander {
    const Witness& witness;
    std::span<const double> x;
    const OrderStrategy& strategy;
    std::size_t atom_limit;
    std::size_t atoms = 0;
    Measure leaves;
    std::vector<std::unordered_map<std::uint64_t, double>> cache;  // per element: T -> capped conditional

    Expander(const Witness& w, std::span<const double> xs, const OrderStrategy& s, std::size_t limit)
        : witness(w), x(xs), strategy(s), atom_limit(limit), cache(static_cast<std::size_t>(w.size())) {}

    double capped(int e, ElementSet t) {
        auto [it, fresh] = cache[e].try_emplace(t.bits(), 0.0);
        if (fresh) it->second = checked_conditional(witness, x, e, t);
        return it->second;
    }

    void count(std::size_t k) {
        atoms += k;
        if (atoms > atom_limit)
            throw TooLargeError("exact expansion needs more than " + std::to_string(atom_limit) + " atoms");
    }

    // Branches: inactive (1 - x), active and accepted (min(q, x)), active and refused (x - min(q, x)).
    struct Split {
        Measure inactive, accepted, refused;
    };

    Split split(const Measure& m, int e) {
        Split out;
        for (const auto& [bits, p] : m) {
            const ElementSet t = ElementSet::from_bits(bits).without(e);
            const double a = capped(e, t);
            count(3);
            if (x[e] < 1.0) out.inactive[t.bits()] += p * (1.0 - x[e]);
            if (a > 0.0) out.accepted[t.with(e).bits()] += p * a;
            if (x[e] - a > 0.0) out.refused[t.bits()] += p * (x[e] - a);
        }
        return out;
    }

    void walk(const Measure& m, std::vector<PublicEvent>& history, ElementSet waiting) {
        if (m.empty()) return;
        if (waiting.empty()) {
            for (const auto& [bits, p] : m) leaves[bits] += p;
            return;
        }
        const PublicHistory view{history, waiting};
        std::map<int, Measure> by_choice;
        if (strategy.sees_simulated()) {
            for (const auto& [bits, p] : m)
                by_choice[strategy.next(witness.environment(), view, ElementSet::from_bits(bits))][bits] = p;
        } else {
            by_choice[strategy.next(witness.environment(), view, ElementSet{})] = m;
        }
        for (const auto& [e, part] : by_choice) {
            Split s = split(part, e);
            const std::pair<const Measure*, PublicEvent> children[] = {
                {&s.inactive, {e, false, false}}, {&s.accepted, {e, true, true}}, {&s.refused, {e, true, false}}};
            for (const auto& [child, event] : children) {
                history.push_back(event);
                walk(*child, history, waiting.without(e));
                history.pop_back();
            }
        }
    }

    void propagate(Measure m, const std::vector<int>& order) {
        for (int e : order) {
            Split s = split(m, e);
            m = std::move(s.accepted);
            for (const auto* part : {&s.inactive, &s.refused})
                for (const auto& [bits, p] : *part) m[bits] += p;
        }
        leaves = std::move(m);
    }
};

}  // namespace

OutputLaw exact_output_law(const Witness& witness, std::span<const double> x, const OrderStrategy& strategy,
                           std::size_t atom_limit) {
    check_inputs(witness, x);
    const int n = witness.size();
    const ExplicitDistribution initial = witness.law();
    Measure start;
    for (const auto& [s, p] : initial.entries()) start[s.bits()] += p;

    Expander ex(witness, x, strategy, atom_limit);
    ex.count(start.size());
    if (strategy.is_fixed()) {
        ex.propagate(std::move(start), strategy.permutation(n));
    } else {
        std::vector<PublicEvent> history;
        ex.walk(start, history, ElementSet::full(n));
    }

    OutputLaw out;
    out.atoms = ex.atoms;
    out.selection.assign(static_cast<std::size_t>(n), 0.0);
    for (const auto& [bits, p] : ex.leaves) {
        const ElementSet s = ElementSet::from_bits(bits);
        if (!witness.environment().is_feasible(s)) throw NumericalError("expansion reached an infeasible output");
        out.law.emplace_back(s, p);
        s.for_each([&](int e) { out.selection[e] += p; });
    }
    std::sort(out.law.begin(), out.law.end(), [](const auto& a, const auto& b) { return size_lex_less(a.first, b.first); });
    return out;
}

double total_variation(std::span<const std::pair<ElementSet, double>> law, const ExplicitDistribution& reference) {
    std::map<std::uint64_t, double> diff;
    for (const auto& [s, p] : law) diff[s.bits()] += p;
    for (const auto& [s, p] : reference.entries()) diff[s.bits()] -= p;
    double total = 0;
    for (const auto& [bits, d] : diff) total += std::abs(d);
    return 0.5 * total;
}

}  // namespace socrs
