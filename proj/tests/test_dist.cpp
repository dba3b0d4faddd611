#include "support.hpp"

#include "socrs/dist.hpp"
#include "socrs/errors.hpp"
#include "socrs/lp.hpp"

using namespace socrs;

namespace {

const std::vector<Edge> kFiveEdges{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}};

GibbsDistribution gibbs(const Environment& env, std::vector<double> w) {
    return GibbsDistribution(env, log_weights(w), oracle_for(env));
}

// Random rational law on the feasible sets of env; about half the sets get mass.
RationalDistribution random_law(const Environment& env, ref::Gen& gen) {
    std::vector<std::pair<ElementSet, Rational>> entries;
    Rational total = 0;
    for (ElementSet s : enumerate_feasible(env)) {
        if (!s.empty() && gen.coin()) continue;
        entries.emplace_back(s, Rational(gen.integer(1, 20)));
        total += entries.back().second;
    }
    for (auto& [s, p] : entries) p /= total;
    return RationalDistribution(env, entries);
}

}  // namespace

TEST_SUITE("dist") {

TEST_CASE("conditional examples") {
    const auto path = Environment::general_matching(3, {{0, 1}, {1, 2}});
    const auto g = gibbs(path, {1.0, 1.0});
    CHECK(conditional_without(g, 0, ElementSet{}) == doctest::Approx(0.5));
    CHECK(conditional_without(g, 0, ElementSet::single(1)) == 0.0);

    const auto single = Environment::k_uniform(1, 1);
    const ExplicitDistribution d(single, {{ElementSet{}, 0.4}, {ElementSet::single(0), 0.6}});
    CHECK(conditional_without(d, 0, ElementSet{}) == doctest::Approx(0.6));
}

TEST_CASE("conditioning on a null event is an error") {
    const auto env = Environment::k_uniform(2, 2);
    const ExplicitDistribution d(env, {{ElementSet{}, 0.5}, {ElementSet::single(0), 0.5}});
    CHECK_THROWS_AS(conditional_without(d, 0, ElementSet::single(1)), NumericalError);
    CHECK_THROWS_AS(conditional_without(d, 0, ElementSet::single(0)), InputError);
}

TEST_CASE("distribution construction validates its input") {
    const auto env = Environment::k_uniform(2, 1);
    using E = std::vector<ExplicitDistribution::Entry>;
    CHECK_THROWS_AS(ExplicitDistribution(env, E{{ElementSet::of({0, 1}), 1.0}}), InputError);
    CHECK_THROWS_AS(ExplicitDistribution(env, E{{ElementSet{}, 0.5}}), InputError);
    CHECK_THROWS_AS(ExplicitDistribution(env, E{{ElementSet{}, 1.5}, {ElementSet::single(0), -0.5}}), InputError);
    CHECK_THROWS_AS(ExplicitDistribution(env, E{{ElementSet{}, 0.5}, {ElementSet{}, 0.5}}), InputError);
}

TEST_CASE("verify examples") {
    const auto env = Environment::general_matching(4, kFiveEdges);
    const std::vector<double> x(5, 0.3);
    std::vector<double> p(5, 0.1);
    // Max-entropy weights are not needed for the check itself: any Gibbs law with rho_e <= x_e works.
    const auto g = gibbs(env, {0.12, 0.12, 0.12, 0.12, 0.12});
    const auto report = verify_stationary_lp(g, std::span<const double>(x), 0.0);
    CHECK(report.violated_caps.empty());

    const auto uni = Environment::k_uniform(2, 1);
    const ExplicitDistribution d(uni, {{ElementSet{}, 0.2}, {ElementSet::single(0), 0.4}, {ElementSet::single(1), 0.4}});
    const std::vector<double> ones{1.0, 1.0};
    const auto vacuous = verify_stationary_lp(d, std::span<const double>(ones), 0.4);
    CHECK(vacuous.violated_caps.empty());
    CHECK(vacuous.alpha_achieved == doctest::Approx(0.4));
    CHECK(vacuous.holds());
    CHECK_FALSE(verify_stationary_lp(d, std::span<const double>(ones), 0.41).holds());

    const auto single = Environment::k_uniform(1, 1);
    const ExplicitDistribution bad(single, {{ElementSet{}, 0.1}, {ElementSet::single(0), 0.9}});
    const std::vector<double> half{0.5};
    const auto r = verify_stationary_lp(bad, std::span<const double>(half), 0.0);
    REQUIRE(r.violated_caps.size() == 1);
    CHECK(r.violated_caps[0].element == 0);
    CHECK(r.violated_caps[0].given == ElementSet{});
    CHECK(r.violated_caps[0].conditional == doctest::Approx(0.9));
    CHECK(r.max_cap_excess == doctest::Approx(0.4));
}

TEST_CASE("stationary reports serialize rationals as p/q") {
    const auto single = Environment::k_uniform(1, 1);
    const RationalDistribution d(single, {{ElementSet{}, fraction(1, 3)}, {ElementSet::single(0), fraction(2, 3)}});
    const std::vector<Rational> x{fraction(3, 4)};
    const auto r = verify_stationary_lp(d, std::span<const Rational>(x), fraction(1, 2));
    CHECK(r.holds());
    CHECK(r.alpha_achieved == fraction(8, 9));
    const std::string doc = report_json(r);
    CHECK(doc.find("\"8/9\"") != std::string::npos);
}

TEST_CASE("addability examples") {
    // k-uniform: Add(e) is the event |S - e| < k.
    const auto uni = Environment::k_uniform(5, 2);
    const auto g = gibbs(uni, {0.5, 1.0, 2.0, 0.3, 0.7});
    const auto sets = enumerate_feasible(uni);
    for (int e = 0; e < 5; ++e) {
        double expected = 0;
        for (ElementSet s : sets)
            if (s.without(e).size() < 2) expected += g.probability(s);
        const auto a = addability_prob(g, e);
        CHECK(a.p_add == doctest::Approx(expected).epsilon(1e-12));
        CHECK(a.residual < 1e-12);
    }

    const auto single = Environment::k_uniform(1, 1);
    CHECK(addability_prob(gibbs(single, {3.0}), 0).p_add == doctest::Approx(1.0));

    const auto five = Environment::general_matching(4, kFiveEdges);
    const auto m = gibbs(five, {0.3, 1.2, 0.8, 2.0, 0.5});
    for (int e = 0; e < 5; ++e) CHECK(addability_prob(m, e).residual < 1e-12);
}

TEST_CASE("stationary LP examples") {
    const auto single = Environment::k_uniform(1, 1);
    const auto one = solve_stationary_lp_exact(single, std::vector<Rational>{1});
    CHECK(one.alpha == 1);
    CHECK(one.witness.probability(ElementSet::single(0)) == 1);

    const auto pair = solve_stationary_lp_exact(Environment::k_uniform(2, 1), std::vector<Rational>{1, 1});
    CHECK(pair.alpha == fraction(1, 2));
    CHECK(pair.witness.probability(ElementSet::single(0)) == fraction(1, 2));
    CHECK(pair.witness.probability(ElementSet::single(1)) == fraction(1, 2));
}

TEST_CASE("stationary LP on symmetric 2-uniform instances approaches 3/5 from above") {
    Rational previous = 1;
    for (int n : {4, 6, 8}) {
        const std::vector<Rational> x(static_cast<std::size_t>(n), fraction(2, n));
        const auto lp = solve_stationary_lp_exact(Environment::k_uniform(n, 2), x);
        CHECK(lp.alpha >= fraction(3, 5));
        CHECK(lp.alpha <= previous);
        previous = lp.alpha;
    }
    CHECK(symmetric_uniform_bound(4000, 2, 2.0 / 4000) == doctest::Approx(0.6).epsilon(1e-3));
}

TEST_CASE("symmetric bound examples") {
    CHECK(symmetric_uniform_bound(4, 2, fraction(1, 2)) == fraction(8, 11));
    CHECK(symmetric_uniform_bound(3, 3, Rational(1)) == 1);
    CHECK(symmetric_uniform_bound(4, 2, 0.5) == doctest::Approx(8.0 / 11.0));
}

TEST_CASE("property: symmetric bound matches binomial sums") {
    ref::Gen gen(21);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = gen.integer(1, 12);
        const int k = gen.integer(1, n);
        const Rational q = gen.fraction(17);
        Rational below = 0, head = 0;
        for (int j = 0; j < k; ++j) below += ref::binomial_pmf(n - 1, j, q);
        for (int j = 0; j <= k; ++j) head += ref::binomial_pmf(n, j, q);
        CHECK(symmetric_uniform_bound(n, k, q) == below / head);
    }
}

TEST_CASE("property: Gibbs laws are normalized and factorize") {
    ref::Gen gen(22);
    for (int trial = 0; trial < 25; ++trial) {
        const int vertices = gen.integer(3, 7);
        const auto env = Environment::general_matching(vertices, gen.edges(vertices, gen.integer(1, 10)));
        std::vector<double> w;
        for (int e = 0; e < env.size(); ++e) w.push_back(std::exp(gen.real(-3, 3)));
        const auto g = gibbs(env, w);
        double total = 0;
        for (ElementSet s : enumerate_feasible(env)) total += g.probability(s);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        const auto m = g.marginals();
        for (int e = 0; e < env.size(); ++e) {
            const auto a = addability_prob(g, e);
            CHECK(a.residual < 1e-12);
            CHECK(std::abs(a.p_add * g.rho(e) - m[e]) < 1e-12);
        }
    }
}

TEST_CASE("property: conditioning leaves two-point support") {
    ref::Gen gen(23);
    for (int trial = 0; trial < 20; ++trial) {
        const int vertices = gen.integer(3, 6);
        const auto env = Environment::general_matching(vertices, gen.edges(vertices, gen.integer(2, 8)));
        const auto law = random_law(env, gen);
        for (int e = 0; e < env.size(); ++e)
            for (ElementSet t : enumerate_feasible(env)) {
                if (t.contains(e)) continue;
                Rational on = 0, off = 0;
                for (const auto& [s, p] : law.entries()) {
                    if (s.without(e) != t) continue;
                    CHECK((s == t || s == t.with(e)));
                    (s.contains(e) ? on : off) += p;
                }
                if (sgn(on + off) == 0) continue;
                CHECK(conditional_without(law, e, t) == on / (on + off));
            }
    }
}

TEST_CASE("property: LP witness verifies exactly at its optimum") {
    ref::Gen gen(24);
    for (int trial = 0; trial < 8; ++trial) {
        const int vertices = gen.integer(3, 5);
        const auto edges = gen.edges(vertices, gen.integer(2, 6));
        const auto env = Environment::general_matching(vertices, edges);
        // Loads stay below 1 with x_e <= 1 / max degree.
        int degree = 1;
        for (int v = 0; v < vertices; ++v) {
            int d = 0;
            for (auto [a, b] : edges) d += (a == v) + (b == v);
            degree = std::max(degree, d);
        }
        std::vector<Rational> x;
        for (int e = 0; e < env.size(); ++e) x.push_back(gen.fraction(10) / degree);
        const auto lp = solve_stationary_lp_exact(env, x);
        const auto report = verify_stationary_lp(lp.witness, std::span<const Rational>(x), lp.alpha);
        CHECK(report.holds());
        CHECK(report.alpha_achieved >= lp.alpha);
        CHECK(lp.alpha <= 1);
    }
}

TEST_CASE("property: adding a near-zero element never raises the LP optimum") {
    ref::Gen gen(25);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = gen.integer(2, 4);
        const int k = gen.integer(1, n - 1);
        std::vector<Rational> x;
        for (int e = 0; e < n; ++e) x.push_back(gen.fraction(10) * k / n);
        const auto before = solve_stationary_lp_exact(Environment::k_uniform(n, k), x);
        x.push_back(fraction(1, 1000));
        const auto after = solve_stationary_lp_exact(Environment::k_uniform(n + 1, k), x);
        CHECK(after.alpha <= before.alpha);
    }
}

TEST_CASE("LP budget is enforced") {
    const std::vector<Rational> x(14, fraction(1, 2));
    CHECK_THROWS_AS(solve_stationary_lp_exact(Environment::k_uniform(14, 7), x, 100), TooLargeError);
}

}  // TEST_SUITE
