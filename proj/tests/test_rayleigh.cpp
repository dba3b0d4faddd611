#include "support.hpp"

#include "socrs/errors.hpp"
#include "socrs/instances.hpp"
#include "socrs/pipeline.hpp"
#include "socrs/rayleigh.hpp"

using namespace socrs;

namespace {

const std::vector<Edge> kTriangle{{0, 1}, {1, 2}, {0, 2}};

BaseMeasure triangle_trees() {
    return BaseMeasure::uniform_spanning_tree(std::make_shared<Matroid>(Matroid::graphic(3, kTriangle)));
}

RayleighBuildOptions tight(double scale = 1.0) {
    RayleighBuildOptions opt;
    opt.scale = scale;
    opt.dual.tol = 1e-12;
    return opt;
}

}  // namespace

TEST_SUITE("rayleigh") {

TEST_CASE("triangle at 0.3 halves every marginal") {
    const std::vector<double> x(3, 0.3);
    const auto w = build_witness(triangle_trees(), x, tight());
    CHECK(w.projection.shrunk);
    const auto law = materialize(w);
    for (int e = 0; e < 3; ++e) CHECK(std::abs(law.marginal(e) - 0.15) <= 1e-6);
    CHECK(verify_stationary_lp(law, std::span<const double>(x), 0.5, 1e-6).holds());
}

TEST_CASE("single base thins independently") {
    const auto base = BaseMeasure::determinantal({{1, 0}, {0, 1}});
    const std::vector<double> x{0.4, 0.6};
    const auto w = build_witness(base, x, tight());
    const auto law = materialize(w);
    CHECK(law.marginal(0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(law.marginal(1) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(law.probability(ElementSet::of({0, 1})) == doctest::Approx(0.06).epsilon(1e-12));
}

TEST_CASE("scale b gives ratio b over one plus b of x over b") {
    const std::vector<double> x1(3, 0.3), x2(3, 0.6);
    const auto w1 = build_witness(triangle_trees(), x1, tight(1.0));
    const auto w2 = build_witness(triangle_trees(), x2, tight(2.0));
    const auto l1 = materialize(w1), l2 = materialize(w2);
    for (int e = 0; e < 3; ++e) {
        CHECK(std::abs(l1.marginal(e) / x1[e] - 0.5) <= 1e-5);
        CHECK(std::abs(l2.marginal(e) / x2[e] - 1.0 / 3) <= 1e-5);
    }
    CHECK_THROWS_AS(build_witness(triangle_trees(), x1, tight(0.0)), InputError);
}

TEST_CASE("conditionals") {
    const auto w = build_witness(triangle_trees(), std::vector<double>(3, 0.3), tight());
    CHECK(pi_conditional(w, 2, ElementSet::of({0, 1})) == 0.0);
    CHECK_THROWS_AS(pi_conditional(w, 1, ElementSet::of({1})), InputError);
    const auto law = materialize(w);
    for (int e = 0; e < 3; ++e)
        for (ElementSet t : ref::all_subsets(3)) {
            if (t.contains(e) || !w.base.matroid().is_independent(t.with(e))) continue;
            const double q = pi_conditional(w, e, t);
            CHECK(std::abs(q - conditional_without(law, e, t)) <= 1e-9);
            CHECK(q <= 0.3 + 1e-9);
        }
}

TEST_CASE("Rayleigh screen examples") {
    RngStream rng(1, 0);
    CHECK(rayleigh_check(triangle_trees(), 50, rng).pass);

    // Independent coins: a product measure over all subsets of three elements.
    std::vector<ElementSet> all = ref::all_subsets(3);
    std::vector<double> product;
    for (ElementSet s : all) {
        double p = 1;
        for (int e = 0; e < 3; ++e) p *= s.contains(e) ? 0.3 : 0.7;
        product.push_back(p);
    }
    CHECK(rayleigh_check(3, all, product, 50, rng).pass);

    // Two disjoint pairs of U(2,4): elements inside a pair are positively correlated.
    const std::vector<ElementSet> pairs{ElementSet::of({0, 1}), ElementSet::of({2, 3})};
    const std::vector<double> half{0.5, 0.5};
    const auto bad = rayleigh_check(4, pairs, half, 10, rng);
    CHECK_FALSE(bad.pass);
    CHECK(bad.worst_slack < -0.1);
}

TEST_CASE("non-Rayleigh bases are refused at build time") {
    auto u = std::make_shared<Matroid>(Matroid::uniform(4, 2));
    std::vector<ElementSet> bases;
    std::vector<Rational> masses;
    for (ElementSet s : ref::all_subsets(4))
        if (s.size() == 2) {
            bases.push_back(s);
            masses.push_back(s == ElementSet::of({0, 1}) || s == ElementSet::of({2, 3}) ? Rational(1000) : Rational(1));
        }
    const auto base = BaseMeasure::table(u, bases, masses);
    CHECK_THROWS_AS(build_witness(base, std::vector<double>(4, 0.3)), InputError);
}

TEST_CASE("shrink size barely moves the witness") {
    const std::vector<double> x(3, 0.3);
    auto coarse = tight();
    auto fine = tight();
    fine.shrink = 1e-8;
    const auto a = materialize(build_witness(triangle_trees(), x, coarse));
    const auto b = materialize(build_witness(triangle_trees(), x, fine));
    CHECK(ref::max_abs_diff(a.marginals(), b.marginals()) <= 1e-5);
}

TEST_CASE("witness json lists the pieces") {
    const auto w = build_witness(triangle_trees(), std::vector<double>(3, 0.3), tight());
    const auto law = materialize(w);
    const std::string text = witness_json(w, &law);
    for (const char* key : {"\"base_point\"", "\"log_tilt\"", "\"tau\"", "\"table\""}) CHECK(text.find(key) != std::string::npos);
    CHECK(witness_json(w).find("\"table\"") == std::string::npos);
}

TEST_CASE("policy witness samples from its own law") {
    const auto w = build_witness(triangle_trees(), std::vector<double>(3, 0.3), tight());
    const RayleighPolicyWitness pw(w);
    const auto law = pw.law();
    RngStream rng(2, 0);
    std::vector<ElementSet> samples;
    for (int i = 0; i < 20000; ++i) samples.push_back(pw.sample(rng));
    CHECK(empirical_tv(samples, law) <= multinomial_tv_bound(law, samples.size()));
}

TEST_CASE("property: marginals and caps on random graphic matroids") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        ref::Gen gen(seed);
        const int vertices = gen.integer(3, 5);
        const auto edges = gen.edges(vertices, gen.integer(3, 7));
        const Instance inst = graphic_with_random_x(vertices, edges, seed);
        const auto x = inst.x();
        const auto w = build_witness(default_base(inst), x, tight());
        const auto law = materialize(w);
        for (int e = 0; e < law.environment().size(); ++e) CHECK(std::abs(law.marginal(e) - x[e] / 2) <= 1e-6);
        for (const auto& [s, p] : law.entries()) CHECK(w.base.matroid().is_independent(s));
        const auto report = verify_stationary_lp(law, std::span<const double>(x), 0.5, 1e-6);
        CHECK(report.violated_caps.empty());
        CHECK(report.selectable);
    }
}

TEST_CASE("property: uniform and determinantal tree measures pass the screen") {
    ref::Gen gen(61);
    for (int trial = 0; trial < 10; ++trial) {
        const int vertices = gen.integer(3, 5);
        const auto edges = gen.edges(vertices, gen.integer(3, 8));
        auto m = std::make_shared<Matroid>(Matroid::graphic(vertices, edges));
        RngStream rng(100 + static_cast<std::uint64_t>(trial), 0);
        CHECK(rayleigh_check(BaseMeasure::uniform_spanning_tree(m), 20, rng).pass);
        socrs::RealMatrix a = ref::reduced_incidence(vertices, edges);
        for (auto& row : a)
            for (double& v : row) v *= gen.real(0.5, 2.0);
        CHECK(rayleigh_check(BaseMeasure::determinantal(a), 20, rng).pass);
    }
}

}  // TEST_SUITE
