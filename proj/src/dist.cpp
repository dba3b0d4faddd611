#include "socrs/dist.hpp"

#include "socrs/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace socrs {

namespace {

bool is_zero(double p) { return p == 0.0; }
bool is_zero(const Rational& p) { return sgn(p) == 0; }
bool is_negative(double p) { return p < 0.0 || std::isnan(p); }
bool is_negative(const Rational& p) { return sgn(p) < 0; }

bool total_ok(double total, std::size_t support) {
    return std::abs(total - 1.0) <= 1e-12 + 1e-15 * static_cast<double>(support);
}
bool total_ok(const Rational& total, std::size_t) { return total == 1; }

}  // namespace

// ---------------------------------------------------------------- explicit laws

template <class P>
BasicDistribution<P>::BasicDistribution(Environment env, std::vector<Entry> entries) : env_(std::move(env)) {
    P total = 0;
    for (auto& [s, p] : entries) {
        if (is_negative(p)) throw InputError("negative probability on " + to_string(s));
        if (is_zero(p)) continue;
        if (!env_.is_feasible(s)) throw InputError("support set " + to_string(s) + " is infeasible");
        total += p;
        entries_.emplace_back(s, p);
    }
    if (!total_ok(total, entries_.size())) throw InputError("probabilities do not sum to 1");
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return size_lex_less(a.first, b.first); });
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (!index_.emplace(entries_[i].first, i).second)
            throw InputError("support set " + to_string(entries_[i].first) + " listed twice");
}

template <class P>
P BasicDistribution<P>::probability(ElementSet s) const {
    auto it = index_.find(s);
    return it == index_.end() ? P(0) : entries_[it->second].second;
}

template <class P>
P BasicDistribution<P>::marginal(int e) const {
    P m = 0;
    for (const auto& [s, p] : entries_)
        if (s.contains(e)) m += p;
    return m;
}

template <class P>
std::vector<P> BasicDistribution<P>::marginals() const {
    std::vector<P> m(static_cast<std::size_t>(env_.size()), P(0));
    for (const auto& [s, p] : entries_) s.for_each([&](int e) { m[e] += p; });
    return m;
}

template class BasicDistribution<double>;
template class BasicDistribution<Rational>;

ExplicitDistribution to_double(const RationalDistribution& d) {
    std::vector<ExplicitDistribution::Entry> entries;
    for (const auto& [s, p] : d.entries()) entries.emplace_back(s, p.get_d());
    return ExplicitDistribution(d.environment(), std::move(entries));
}

template <class P>
P conditional_without(const BasicDistribution<P>& dist, int e, ElementSet t) {
    if (t.contains(e)) throw InputError("conditional_without needs e outside T");
    const P with = dist.probability(t.with(e));
    const P denom = dist.probability(t) + with;
    if (is_zero(denom))
        throw NumericalError("conditioning on a zero-probability event: S - " + std::to_string(e) + " = " + to_string(t));
    return P(with / denom);
}

template double conditional_without(const BasicDistribution<double>&, int, ElementSet);
template Rational conditional_without(const BasicDistribution<Rational>&, int, ElementSet);

// ---------------------------------------------------------------- Gibbs laws

GibbsDistribution::GibbsDistribution(Environment env, std::vector<double> log_weights, OraclePtr oracle)
    : env_(std::move(env)), theta_(std::move(log_weights)), oracle_(std::move(oracle)) {
    if (!oracle_) throw InputError("Gibbs distribution needs a counting oracle");
    if (static_cast<int>(theta_.size()) != env_.size() || oracle_->size() != env_.size())
        throw InputError("Gibbs weight vector size mismatch");
    for (double t : theta_)
        if (!std::isfinite(t)) throw InputError("Gibbs weights must be positive and finite");
    log_z_ = oracle_->log_partition(theta_);
}

double GibbsDistribution::weight(int e) const { return std::exp(theta_[e]); }

double GibbsDistribution::rho(int e) const { return 1.0 / (1.0 + std::exp(-theta_[e])); }

std::vector<double> GibbsDistribution::marginals() const { return oracle_->marginals(theta_); }

double GibbsDistribution::probability(ElementSet s) const {
    if (!env_.is_feasible(s)) return 0.0;
    double score = -log_z_;
    s.for_each([&](int e) { score += theta_[e]; });
    return std::exp(score);
}

ExplicitDistribution GibbsDistribution::materialize(std::size_t cap) const {
    std::vector<ElementSet> sets = enumerate_feasible(env_, cap);
    std::vector<double> scores(sets.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sets.size(); ++i) {
        double v = 0;
        sets[i].for_each([&](int e) { v += theta_[e]; });
        scores[i] = v;
        top = std::max(top, v);
    }
    double total = 0;
    for (double& v : scores) total += (v = std::exp(v - top));
    std::vector<ExplicitDistribution::Entry> entries;
    entries.reserve(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) entries.emplace_back(sets[i], scores[i] / total);
    return ExplicitDistribution(env_, std::move(entries));
}

RationalDistribution GibbsDistribution::materialize_exact(std::size_t cap) const {
    std::vector<ElementSet> sets = enumerate_feasible(env_, cap);
    std::vector<Rational> w;
    for (double t : theta_) w.push_back(exact(std::exp(t)));
    std::vector<Rational> mass(sets.size(), Rational(1));
    Rational total = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        sets[i].for_each([&](int e) { mass[i] *= w[e]; });
        total += mass[i];
    }
    std::vector<RationalDistribution::Entry> entries;
    entries.reserve(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) entries.emplace_back(sets[i], mass[i] / total);
    return RationalDistribution(env_, std::move(entries));
}

double conditional_without(const GibbsDistribution& dist, int e, ElementSet t) {
    if (t.contains(e)) throw InputError("conditional_without needs e outside T");
    if (!dist.environment().is_feasible(t)) throw InputError("conditioning set " + to_string(t) + " is infeasible");
    return dist.environment().can_add(t, e) ? dist.rho(e) : 0.0;
}

// ---------------------------------------------------------------- verification

template <class P>
StationaryReport<P> verify_stationary_lp(const BasicDistribution<P>& dist, std::span<const P> x, const P& alpha,
                                         const P& tol) {
    const Environment& env = dist.environment();
    const int n = env.size();
    if (static_cast<int>(x.size()) != n) throw InputError("activation vector size mismatch");
    StationaryReport<P> report;
    const std::vector<P> marg = dist.marginals();
    report.selectable = true;
    for (int e = 0; e < n; ++e) {
        if (!(x[e] > 0)) throw InputError("activation probabilities must be positive");
        P ratio = marg[e] / x[e];
        if (report.weakest_element < 0 || ratio < report.alpha_achieved) {
            report.alpha_achieved = ratio;
            report.weakest_element = e;
        }
        if (marg[e] < alpha * x[e] - tol) report.selectable = false;
    }
    bool first = true;
    for (const auto& [s, p] : dist.entries()) {
        for (int e = 0; e < n; ++e) {
            const ElementSet t = s.without(e);
            // Visit each (e, T) once: from T itself, or from T + e when T carries no mass.
            if (s.contains(e) && !is_zero(dist.probability(t))) continue;
            const P with = dist.probability(t.with(e));
            const P cond = with / (dist.probability(t) + with);
            const P excess = cond - x[e];
            ++report.checked_pairs;
            if (first || excess > report.max_cap_excess) report.max_cap_excess = excess;
            first = false;
            if (excess > tol) report.violated_caps.push_back({e, t, cond, x[e]});
        }
    }
    return report;
}

template StationaryReport<double> verify_stationary_lp(const BasicDistribution<double>&, std::span<const double>,
                                                       const double&, const double&);
template StationaryReport<Rational> verify_stationary_lp(const BasicDistribution<Rational>&, std::span<const Rational>,
                                                         const Rational&, const Rational&);

StationaryReport<double> verify_stationary_lp(const GibbsDistribution& dist, std::span<const double> x, double alpha,
                                              double tol) {
    auto table = [&] {
        try {
            return dist.materialize();
        } catch (const TooLargeError& err) {
            throw TooLargeError(std::string(err.what()) + "; use the Monte-Carlo estimator instead");
        }
    }();
    return verify_stationary_lp<double>(table, x, alpha, tol);
}

namespace {

nlohmann::json encode(double v) { return v; }
nlohmann::json encode(const Rational& v) { return to_string(v); }

template <class P>
std::string report_json_impl(const StationaryReport<P>& r) {
    nlohmann::json doc;
    doc["alpha_achieved"] = encode(r.alpha_achieved);
    doc["weakest_element"] = r.weakest_element;
    doc["selectable"] = r.selectable;
    doc["max_cap_excess"] = encode(r.max_cap_excess);
    doc["checked_pairs"] = r.checked_pairs;
    doc["violated_caps"] = nlohmann::json::array();
    for (const auto& v : r.violated_caps)
        doc["violated_caps"].push_back({{"element", v.element},
                                        {"given", v.given.elements()},
                                        {"conditional", encode(v.conditional)},
                                        {"x", encode(v.x)}});
    doc["holds"] = r.holds();
    return doc.dump(2);
}

}  // namespace

std::string report_json(const StationaryReport<double>& r) { return report_json_impl(r); }
std::string report_json(const StationaryReport<Rational>& r) { return report_json_impl(r); }

// ---------------------------------------------------------------- addability

namespace {

constexpr std::size_t kAddabilityEnumerationCap = 200'000;

}  // namespace

Addability addability_prob(const GibbsDistribution& dist, int e) {
    const Environment& env = dist.environment();
    if (e < 0 || e >= env.size()) throw InputError("element id out of range");
    Addability out;
    out.rho = dist.rho(e);
    out.marginal = dist.marginals()[e];

    std::vector<ElementSet> sets;
    bool enumerable = true;
    try {
        sets = enumerate_feasible(env, kAddabilityEnumerationCap);
    } catch (const TooLargeError&) {
        enumerable = false;
    }
    const auto theta = dist.log_weights();
    if (enumerable) {
        double p_add = 0;
        for (auto s : sets)
            if (env.can_add(s.without(e), e)) p_add += dist.probability(s);
        out.p_add = p_add;
    } else if (env.is_matching()) {
        // Sets avoiding every vertex of e, counted with and without e.
        std::vector<double> pinned(theta.begin(), theta.end());
        env.conflicts(e).with(e).for_each([&](int f) { pinned[f] = -std::numeric_limits<double>::infinity(); });
        out.p_add = std::exp(std::log1p(dist.weight(e)) + dist.oracle().log_partition(pinned) - dist.log_partition());
    } else if (env.kind() == EnvKind::KUniform) {
        std::vector<double> pinned(theta.begin(), theta.end());
        pinned[e] = -std::numeric_limits<double>::infinity();
        KUniformOracle smaller(env.size(), std::max(0, env.k() - 1));
        out.p_add = env.k() == 0 ? 0.0
                                 : std::exp(std::log1p(dist.weight(e)) + smaller.log_partition(pinned) - dist.log_partition());
    } else {
        throw TooLargeError("addability for large matroids needs enumeration");
    }
    out.residual = std::abs(out.marginal - out.p_add * out.rho);
    return out;
}

}  // namespace socrs
