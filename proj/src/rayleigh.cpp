#include "socrs/rayleigh.hpp"

#include "socrs/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>

namespace socrs {

namespace {

std::vector<Rational> exact_vector(std::span<const double> v) {
    std::vector<Rational> out;
    out.reserve(v.size());
    for (double d : v) out.emplace_back(d);
    return out;
}

}  // namespace

RayleighWitness build_witness(const BaseMeasure& base, std::span<const double> x, const RayleighBuildOptions& options) {
    const Matroid& m = base.matroid();
    const int n = m.size();
    const double b = options.scale;
    if (static_cast<int>(x.size()) != n) throw InputError("x has the wrong length");
    if (!(b > 0.0)) throw InputError("scale must be positive");
    for (double v : x)
        if (!(v > 0.0 && v <= 1.0)) throw InputError("activation probabilities must lie in (0, 1]");

    if (options.screen_base && n <= 20) {
        std::vector<ElementSet> bases;
        try {
            bases = base.bases(options.screen_cap);
        } catch (const TooLargeError&) {
            bases.clear();
        }
        if (!bases.empty()) {
            RngStream rng(options.screen_seed, 0);
            const RayleighReport report = rayleigh_check(base, options.screen_trials, rng);
            if (!report.pass)
                throw InputError("base measure is not Rayleigh: slack " + std::to_string(report.worst_slack) + " at " +
                                 to_string(report.worst_set) + " + " + std::to_string(report.worst_element));
        }
    }

    RayleighWitness w{base, std::vector<double>(x.begin(), x.end()), b, {}, {}, {}, {}};
    std::vector<double> scaled(x.begin(), x.end());
    for (double& v : scaled) v /= b;
    w.base_point = dominating_base_point(m, scaled);
    w.projection = solve_kl_projection(base, w.base_point, options.dual, options.shrink);
    for (double t : w.projection.log_w) w.tilt.push_back(std::exp(t));

    const double inside = b / (1.0 + b);
    std::vector<double> tau(static_cast<std::size_t>(n));
    for (int e = 0; e < n; ++e) {
        const double achieved = w.projection.achieved[e];
        tau[e] = achieved > 0.0 ? inside * std::min(1.0, x[e] / (b * achieved)) : 0.0;
    }
    w.tau = ThinningVector(std::move(tau));
    return w;
}

double pi_conditional(const RayleighWitness& witness, int e, ElementSet t) {
    const Matroid& m = witness.base.matroid();
    if (e < 0 || e >= m.size()) throw InputError("element id out of range");
    if (t.contains(e)) throw InputError("pi_conditional needs e outside T");
    if (!m.is_independent(t.with(e))) return 0.0;
    const auto w = exact_vector(witness.tilt);
    const auto tau = exact_vector(witness.tau.tau);
    const CountingOracle& oracle = *witness.base.oracle();
    const Rational with = thinned_mass(oracle, w, tau, t.with(e));
    const Rational without = thinned_mass(oracle, w, tau, t);
    const Rational denom = with + without;
    if (sgn(denom) == 0) throw NumericalError("conditioning on a null event at " + to_string(t));
    return Rational(with / denom).get_d();
}

RationalDistribution materialize_exact(const RayleighWitness& witness, std::size_t cap) {
    const auto env = Environment::matroid(witness.base.matroid_handle());
    const auto w = exact_vector(witness.tilt);
    const auto tau = exact_vector(witness.tau.tau);
    const CountingOracle& oracle = *witness.base.oracle();
    std::vector<RationalDistribution::Entry> entries;
    for (ElementSet t : enumerate_feasible(env, cap)) entries.emplace_back(t, thinned_mass(oracle, w, tau, t));
    return RationalDistribution(env, std::move(entries));
}

ExplicitDistribution materialize(const RayleighWitness& witness, std::size_t cap) {
    return to_double(materialize_exact(witness, cap));
}

RayleighPolicyWitness::RayleighPolicyWitness(RayleighWitness witness)
    : witness_(std::move(witness)), env_(Environment::matroid(witness_.base.matroid_handle())) {
    try {
        const auto bases = witness_.base.bases(200'000);
        std::vector<Rational> mass;
        Rational total = 0;
        const auto w = exact_vector(witness_.tilt);
        for (ElementSet b : bases) {
            Rational v = witness_.base.mass(b);
            b.for_each([&](int e) { v *= w[e]; });
            total += v;
            mass.push_back(v);
        }
        std::vector<ExplicitDistribution::Entry> entries;
        for (std::size_t i = 0; i < bases.size(); ++i) entries.emplace_back(bases[i], Rational(mass[i] / total).get_d());
        tilted_bases_ = ExplicitDistribution(env_, std::move(entries));
    } catch (const TooLargeError&) {
        tilted_bases_.reset();
    }
}

ElementSet RayleighPolicyWitness::sample(RngStream& rng) const {
    const ElementSet b = tilted_bases_ ? sample_explicit(*tilted_bases_, rng)
                                       : sample_sequential(*witness_.base.oracle(), witness_.tilt, rng);
    return thin(b, witness_.tau, rng);
}

std::string witness_json(const RayleighWitness& witness, const ExplicitDistribution* table) {
    nlohmann::json doc;
    doc["scale"] = witness.scale;
    doc["x"] = witness.x;
    doc["base_point"] = witness.base_point;
    doc["kl_target"] = witness.projection.target;
    doc["achieved"] = witness.projection.achieved;
    doc["shrunk"] = witness.projection.shrunk;
    doc["log_tilt"] = witness.projection.log_w;
    doc["tau"] = witness.tau.tau;
    if (table) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& [s, p] : table->entries()) rows.push_back({{"set", s.elements()}, {"p", p}});
        doc["table"] = rows;
    }
    return doc.dump(2);
}

// ---------------------------------------------------------------- Rayleigh check

RayleighReport rayleigh_check(int n, std::span<const ElementSet> bases, std::span<const double> masses, int trials,
                              RngStream& rng, double tol) {
    if (n > 20) throw TooLargeError("rayleigh_check enumerates all subsets; limited to 20 elements");
    if (bases.size() != masses.size()) throw InputError("bases and masses differ in length");
    const std::size_t full = std::size_t{1} << n;
    RayleighReport report;
    report.worst_slack = report.worst_pair_slack = INFINITY;
    std::vector<double> up(full);
    std::vector<double> log_tilt;
    for (int trial = 0; trial <= trials; ++trial) {
        log_tilt.assign(static_cast<std::size_t>(n), 0.0);
        if (trial > 0)
            for (double& t : log_tilt) t = -5.0 + 10.0 * rng.uniform();
        // Tilted masses, normalized with a max-shift so e^{5r} stays in range.
        std::vector<double> lm(bases.size());
        double top = -INFINITY;
        for (std::size_t i = 0; i < bases.size(); ++i) {
            lm[i] = masses[i] > 0 ? std::log(masses[i]) : -INFINITY;
            bases[i].for_each([&](int e) { lm[i] += log_tilt[e]; });
            top = std::max(top, lm[i]);
        }
        std::fill(up.begin(), up.end(), 0.0);
        double z = 0;
        for (std::size_t i = 0; i < bases.size(); ++i) {
            const double v = std::exp(lm[i] - top);
            up[bases[i].bits()] += v;
            z += v;
        }
        for (double& v : up) v /= z;
        // Superset sums: up[T] = P[T in B].
        for (int i = 0; i < n; ++i) {
            const std::size_t bit = std::size_t{1} << i;
            for (std::size_t mask = 0; mask < full; ++mask)
                if (!(mask & bit)) up[mask] += up[mask | bit];
        }
        ++report.tilts_checked;
        for (std::size_t mask = 0; mask < full; ++mask) {
            const double pt = up[mask];
            if (pt == 0.0) continue;
            for (int e = 0; e < n; ++e) {
                const std::size_t bit = std::size_t{1} << e;
                if (mask & bit) continue;
                const double slack = pt * up[bit] - up[mask | bit];
                if (std::popcount(mask) == 1) report.worst_pair_slack = std::min(report.worst_pair_slack, slack);
                if (slack < report.worst_slack) {
                    report.worst_slack = slack;
                    report.worst_set = ElementSet::from_bits(mask);
                    report.worst_element = e;
                    report.worst_tilt.clear();
                    if (trial > 0)
                        for (double t : log_tilt) report.worst_tilt.push_back(std::exp(t));
                }
            }
        }
    }
    if (report.worst_pair_slack == INFINITY) report.worst_pair_slack = 0.0;
    if (report.worst_slack == INFINITY) report.worst_slack = 0.0;
    report.pass = report.worst_slack >= -tol;
    return report;
}

RayleighReport rayleigh_check(const BaseMeasure& base, int trials, RngStream& rng, double tol) {
    const auto bases = base.bases();
    std::vector<Rational> exact;
    Rational total = 0;
    for (ElementSet b : bases) {
        exact.push_back(base.mass(b));
        total += exact.back();
    }
    std::vector<double> masses;
    for (const auto& m : exact) masses.push_back(Rational(m / total).get_d());
    return rayleigh_check(base.matroid().size(), bases, masses, trials, rng, tol);
}

}  // namespace socrs
