#include "support.hpp"

#include "socrs/counting.hpp"
#include "socrs/dist.hpp"
#include "socrs/errors.hpp"
#include "socrs/sampling.hpp"

#include <unordered_map>

using namespace socrs;

namespace {

const std::vector<Edge> kTriangle{{0, 1}, {1, 2}, {0, 2}};

std::unordered_map<ElementSet, int, ElementSetHash> histogram(const std::vector<ElementSet>& samples) {
    std::unordered_map<ElementSet, int, ElementSetHash> h;
    for (ElementSet s : samples) ++h[s];
    return h;
}

std::vector<double> frequencies(const std::vector<ElementSet>& samples, int n) {
    std::vector<double> f(static_cast<std::size_t>(n), 0.0);
    for (ElementSet s : samples)
        for (int e : s.elements()) f[e] += 1.0;
    for (double& v : f) v /= static_cast<double>(samples.size());
    return f;
}

ExplicitDistribution uniform_on_pairs() {
    const auto env = Environment::k_uniform(2, 2);
    return ExplicitDistribution(env, {{ElementSet{}, 0.25}, {ElementSet::of({0}), 0.25}, {ElementSet::of({1}), 0.25},
                                      {ElementSet::of({0, 1}), 0.25}});
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("point mass") {
    const ExplicitDistribution d(Environment::k_uniform(3, 2), {{ElementSet::of({0, 2}), 1.0}});
    RngStream rng(1, 0);
    for (int i = 0; i < 100; ++i) CHECK(sample_explicit(d, rng) == ElementSet::of({0, 2}));
}

TEST_CASE("uniform over four sets") {
    const auto d = uniform_on_pairs();
    RngStream rng(2, 0);
    std::vector<ElementSet> samples;
    for (int i = 0; i < 100000; ++i) samples.push_back(sample_explicit(d, rng));
    const auto h = histogram(samples);
    REQUIRE(h.size() == 4);
    for (const auto& [s, count] : h) CHECK(count / 1e5 == doctest::Approx(0.25).epsilon(0.04));
}

TEST_CASE("same seed and stream give the same draws") {
    const auto d = uniform_on_pairs();
    RngStream a(7, 3), b(7, 3), c(7, 4);
    int differ = 0;
    for (int i = 0; i < 200; ++i) {
        const ElementSet x = sample_explicit(d, a), y = sample_explicit(d, b), z = sample_explicit(d, c);
        CHECK(x == y);
        differ += x != z;
    }
    CHECK(differ > 0);
}

TEST_CASE("stream position can be rebuilt from the counter") {
    RngStream a(5, 9);
    for (int i = 0; i < 17; ++i) a.uniform();
    RngStream b(5, 9);
    b.skip(a.counter());
    for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
    for (int i = 0; i < 1000; ++i) CHECK(a.below(7) < 7);
}

TEST_CASE("exact uniform is the double draw as a rational") {
    RngStream a(3, 1), b(3, 1);
    for (int i = 0; i < 100; ++i) {
        const Rational u = exact_uniform(a);
        CHECK(u >= 0);
        CHECK(u < 1);
        CHECK(u == Rational(b.uniform()));
    }
}

TEST_CASE("single base is always drawn") {
    const auto base = BaseMeasure::determinantal({{1, 0}, {0, 1}});
    const std::vector<Rational> w{1, 1};
    RngStream rng(4, 0);
    for (int i = 0; i < 50; ++i) CHECK(sample_sequential(*base.oracle(), std::span<const Rational>(w), rng) == ElementSet::of({0, 1}));
}

TEST_CASE("uniform spanning tree of a triangle") {
    auto m = std::make_shared<Matroid>(Matroid::graphic(3, kTriangle));
    const auto oracle = BaseMeasure::uniform_spanning_tree(m).oracle();
    const std::vector<double> w(3, 1.0);
    RngStream rng(5, 0);
    std::vector<ElementSet> samples;
    for (int i = 0; i < 30000; ++i) samples.push_back(sample_sequential(*oracle, std::span<const double>(w), rng));
    const auto h = histogram(samples);
    REQUIRE(h.size() == 3);
    for (const auto& [s, count] : h) {
        CHECK(s.size() == 2);
        CHECK(std::abs(count / 3e4 - 1.0 / 3) <= 0.02);
    }
}

TEST_CASE("tilted tree law marginals") {
    auto m = std::make_shared<Matroid>(Matroid::graphic(3, kTriangle));
    const auto oracle = BaseMeasure::uniform_spanning_tree(m).oracle();
    // Trees {0,1}, {0,2} weigh 4 and {1,2} weighs 1: marginals 8/9, 5/9, 5/9.
    const std::vector<Rational> w{4, 1, 1};
    RngStream rng(6, 0);
    std::vector<ElementSet> samples;
    for (int i = 0; i < 30000; ++i) samples.push_back(sample_sequential(*oracle, std::span<const Rational>(w), rng));
    const auto f = frequencies(samples, 3);
    CHECK(std::abs(f[0] - 8.0 / 9) <= 0.02);
    CHECK(std::abs(f[1] - 5.0 / 9) <= 0.02);
    CHECK(std::abs(f[2] - 5.0 / 9) <= 0.02);
}

TEST_CASE("thinning extremes and binomial sizes") {
    RngStream rng(8, 0);
    const ElementSet s = ElementSet::of({0, 2, 3, 5, 6, 7});
    for (int i = 0; i < 50; ++i) {
        CHECK(thin(s, ThinningVector::constant(8, 1.0), rng) == s);
        CHECK(thin(s, ThinningVector::constant(8, 0.0), rng) == ElementSet{});
    }
    std::vector<int> sizes(7, 0);
    const int draws = 40000;
    for (int i = 0; i < draws; ++i) {
        const ElementSet t = thin(s, ThinningVector::constant(8, 0.5), rng);
        CHECK(t.subset_of(s));
        ++sizes[t.size()];
    }
    for (int j = 0; j <= 6; ++j) CHECK(std::abs(sizes[j] / double(draws) - ref::binomial_pmf(6, j, fraction(1, 2)).get_d()) <= 0.01);
}

TEST_CASE("thinning vector validation") {
    CHECK_NOTHROW(ThinningVector({0.0, 1.0, 0.3}));
    CHECK_THROWS_AS(ThinningVector({-0.1}), InputError);
    CHECK_THROWS_AS(ThinningVector({1.1}), InputError);
}

TEST_CASE("empirical total variation examples") {
    const auto d = uniform_on_pairs();
    RngStream rng(9, 0);
    std::vector<ElementSet> a, b;
    for (int i = 0; i < 50000; ++i) {
        a.push_back(sample_explicit(d, rng));
        b.push_back(sample_explicit(d, rng));
    }
    CHECK(empirical_tv(a, d) <= 0.02);
    CHECK(empirical_tv(a, b) <= 0.02);

    const std::vector<ElementSet> ones(10, ElementSet::of({0})), empties(10, ElementSet{});
    CHECK(empirical_tv(ones, ones) == 0.0);
    CHECK(empirical_tv(ones, empties) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sequential sampler stays within the multinomial bound") {
    const auto env = Environment::general_matching(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
    const auto oracle = oracle_for(env);
    const std::vector<double> w{0.5, 1.5, 0.7, 1.0, 2.0};
    const GibbsDistribution g(env, log_weights(w), oracle);
    const auto law = g.materialize();
    RngStream rng(10, 0);
    std::vector<ElementSet> samples;
    const std::size_t n = 20000;
    for (std::size_t i = 0; i < n; ++i) samples.push_back(sample_sequential(*oracle, std::span<const double>(w), rng));
    CHECK(empirical_tv(samples, law) <= multinomial_tv_bound(law, n));
}

TEST_CASE("double sampler refuses large sets") {
    const auto oracle = oracle_for(Environment::k_uniform(12, 10));
    // Heavy weights push the draw towards ten elements, past what double interpolation can pin.
    const std::vector<double> w(12, 100.0);
    RngStream rng(11, 0);
    CHECK_THROWS_AS(sample_sequential(*oracle, std::span<const double>(w), rng), InputError);
}

TEST_CASE("property: sequential sampler frequencies match exact marginals") {
    ref::Gen gen(41);
    for (int trial = 0; trial < 6; ++trial) {
        const int vertices = gen.integer(3, 5);
        const auto edges = gen.edges(vertices, gen.integer(2, 6));
        const auto env = Environment::general_matching(vertices, edges);
        const auto oracle = oracle_for(env);
        std::vector<Rational> w;
        for (std::size_t e = 0; e < edges.size(); ++e) w.push_back(gen.fraction(4) * 2);
        const auto sets = enumerate_feasible(env);
        const Rational z = ref::weighted_sum(sets, w);
        RngStream rng(100 + static_cast<std::uint64_t>(trial), 0);
        std::vector<ElementSet> samples;
        for (int i = 0; i < 8000; ++i) samples.push_back(sample_sequential(*oracle, std::span<const Rational>(w), rng));
        const auto f = frequencies(samples, env.size());
        for (int e = 0; e < env.size(); ++e) {
            const double p = Rational(ref::weighted_sum(sets, w, ElementSet::single(e)) / z).get_d();
            CHECK(std::abs(f[e] - p) <= 4 * std::sqrt(p * (1 - p) / 8000) + 1e-9);
        }
        for (ElementSet s : samples) CHECK(env.is_feasible(s));
    }
}

TEST_CASE("property: thinning keeps each element with its own probability") {
    ref::Gen gen(42);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> tau(6);
        for (double& t : tau) t = gen.real();
        const ThinningVector tv(tau);
        RngStream rng(200 + static_cast<std::uint64_t>(trial), 0);
        std::vector<ElementSet> samples;
        for (int i = 0; i < 20000; ++i) samples.push_back(thin(ElementSet::full(6), tv, rng));
        const auto f = frequencies(samples, 6);
        for (int e = 0; e < 6; ++e) CHECK(std::abs(f[e] - tau[e]) <= 4 * std::sqrt(0.25 / 20000));
    }
}

}  // TEST_SUITE
