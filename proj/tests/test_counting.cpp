#include "support.hpp"

#include "socrs/counting.hpp"
#include "socrs/errors.hpp"

#include <sstream>
#include <thread>

#include <limits>

using namespace socrs;

namespace {

const std::vector<Edge> kTriangle{{0, 1}, {1, 2}, {0, 2}};
const std::vector<Edge> kK4{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}};

std::vector<Rational> random_weights(int n, ref::Gen& gen) {
    std::vector<Rational> w;
    for (int e = 0; e < n; ++e) w.push_back(fraction(gen.integer(1, 30), gen.integer(1, 10)));
    return w;
}

std::vector<double> as_doubles(const std::vector<Rational>& w) { return to_doubles(w); }

// The oracle together with the family it sums over, for brute-force comparison.
struct Case {
    OraclePtr oracle;
    std::vector<ElementSet> family;
    int n = 0;
};

Case random_case(ref::Gen& gen, int kind) {
    Case c;
    if (kind == 0) {
        const int vertices = gen.integer(3, 7);
        const auto edges = gen.edges(vertices, gen.integer(1, 12));
        c.n = static_cast<int>(edges.size());
        c.oracle = std::make_shared<MatchingOracle>(Environment::general_matching(vertices, edges));
        c.family = ref::filter_subsets(c.n, [&](ElementSet s) { return ref::vertex_disjoint(edges, s); });
    } else if (kind == 1) {
        c.n = gen.integer(1, 10);
        const int k = gen.integer(0, c.n);
        c.oracle = std::make_shared<KUniformOracle>(c.n, k);
        c.family = ref::filter_subsets(c.n, [&](ElementSet s) { return s.size() <= k; });
    } else {
        const int vertices = gen.integer(2, 6);
        const auto edges = gen.edges(vertices, gen.integer(1, 10));
        c.n = static_cast<int>(edges.size());
        c.oracle = std::make_shared<SpanningTreeOracle>(vertices, edges);
        c.family = ref::spanning_forests(vertices, edges);
    }
    return c;
}

}  // namespace

TEST_SUITE("counting") {

TEST_CASE("partition examples") {
    const MatchingOracle edge(Environment::general_matching(2, {{0, 1}}));
    CHECK(edge.partition_exact(std::vector<Rational>{2}) == 3);
    CHECK(std::exp(edge.log_partition(log_weights(std::vector<double>{2.0}))) == doctest::Approx(3.0));

    const MatchingOracle k4(Environment::general_matching(4, kK4));
    ref::Gen gen(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Rational t = gen.fraction(50) * 7, s = gen.fraction(50) * 3;
        const std::vector<Rational> w{t, t, t, t, s, s};
        CHECK(k4.partition_exact(w) == 1 + 4 * t + 2 * s + 2 * t * t + s * s);
    }

    const SpanningTreeOracle tri(3, kTriangle);
    CHECK(tri.partition_exact(std::vector<Rational>(3, Rational(1))) == 3);
    CHECK(ref::spanning_forests(3, kTriangle).size() == 3);
    CHECK(std::exp(tri.log_partition(std::vector<double>(3, 0.0))) == doctest::Approx(3.0));
}

TEST_CASE("marginal sum examples") {
    const KUniformOracle single(1, 1);
    CHECK(marginal_sum(single, std::vector<Rational>{3}, 0) == 3);
    CHECK(marginal_sum(single, std::vector<double>{3.0}, 0) == doctest::Approx(3.0));

    const MatchingOracle path(Environment::general_matching(3, {{0, 1}, {1, 2}}));
    CHECK(marginal_sum(path, std::vector<Rational>{1, 1}, 0) == 1);
    CHECK(marginal_sum(path, std::vector<double>{1.0, 1.0}, 0) == doctest::Approx(1.0));
}

TEST_CASE("constrained count examples") {
    ref::Gen gen(32);
    const SpanningTreeOracle k4(4, kK4);
    const auto w = random_weights(6, gen);
    CHECK(constrained_count(k4, w, {}, {}) == k4.partition_exact(w));
    CHECK(constrained_count(k4, w, ElementSet::single(2), {}) == ref::weighted_sum(ref::spanning_forests(4, kK4), w, ElementSet::single(2)));
    const auto bases = ref::spanning_forests(4, kK4);
    const ElementSet in = ElementSet::of({0, 4}), out = ElementSet::of({2});
    CHECK(constrained_count(k4, w, in, out) == ref::weighted_sum(bases, w, in, out));
}

TEST_CASE("constrained count trace lists every evaluation") {
    const KUniformOracle u(5, 2);
    std::ostringstream trace;
    const std::vector<Rational> w(5, Rational(1));
    constrained_count(u, w, ElementSet::of({0, 1}), ElementSet::of({4}), &trace);
    std::istringstream in(trace.str());
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 3 * 2);
}

TEST_CASE("thinned mass examples") {
    const std::vector<Edge> square{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    const SpanningTreeOracle c4(4, square);
    const auto bases = ref::spanning_forests(4, square);
    const std::vector<Rational> w{1, 2, fraction(1, 2), 3};
    const std::vector<Rational> tau{fraction(1, 3), fraction(1, 2), fraction(2, 3), fraction(1, 4)};
    const Rational z = ref::weighted_sum(bases, w);
    Rational empty = 0;
    for (ElementSet b : bases) {
        Rational p = ref::monomial(b, w) / z;
        for (int e : b.elements()) p *= 1 - tau[e];
        empty += p;
    }
    CHECK(thinned_mass(c4, w, tau, ElementSet{}) == empty);

    // Not inside any base: the full 4-cycle.
    CHECK(thinned_mass(c4, w, tau, ElementSet::full(4)) == 0);

    const std::vector<Rational> keep(4, Rational(1));
    const ElementSet base = bases.front();
    CHECK(thinned_mass(c4, w, keep, base) == ref::monomial(base, w) / z);
    CHECK(thinned_mass(c4, to_doubles(w), to_doubles(keep), base) == doctest::Approx(Rational(ref::monomial(base, w) / z).get_d()));
}

TEST_CASE("double-mode interpolation refuses ill-conditioned degrees") {
    const KUniformOracle u(12, 10);
    const std::vector<double> w(12, 1.0);
    CHECK_THROWS_AS(constrained_count(u, w, ElementSet::full(9), {}), InputError);
    CHECK_THROWS_AS(thinned_mass(u, w, w, ElementSet::full(9)), InputError);
    CHECK_THROWS_AS(constrained_count(u, std::vector<Rational>(12, Rational(1)), ElementSet::single(0), ElementSet::single(0)), InputError);
}

TEST_CASE("Cauchy-Binet rejects rank-deficient representations") {
    CHECK_THROWS(CauchyBinetOracle({{1, 2}, {2, 4}}));
}

TEST_CASE("property: backends agree with enumeration") {
    ref::Gen gen(33);
    for (int trial = 0; trial < 60; ++trial) {
        const Case c = random_case(gen, trial % 3);
        const auto w = random_weights(c.n, gen);
        const Rational z = ref::weighted_sum(c.family, w);
        CHECK(c.oracle->partition_exact(w) == z);
        const EnumerationOracle flat(c.n, c.family);
        CHECK(flat.partition_exact(w) == z);
        const auto lw = log_weights(as_doubles(w));
        CHECK(c.oracle->log_partition(lw) == doctest::Approx(std::log(z.get_d())).epsilon(1e-9));
        const auto m = c.oracle->marginals(lw);
        const auto mf = flat.marginals(lw);
        for (int e = 0; e < c.n; ++e) {
            const double expected = Rational(ref::weighted_sum(c.family, w, ElementSet::single(e)) / z).get_d();
            CHECK(m[e] == doctest::Approx(expected).epsilon(1e-9));
            CHECK(mf[e] == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("property: Cauchy-Binet on signed incidence reproduces spanning-tree counts") {
    ref::Gen gen(34);
    for (int trial = 0; trial < 20; ++trial) {
        const int vertices = gen.integer(2, 6);
        const auto edges = gen.edges(vertices, gen.integer(1, 10));
        const int n = static_cast<int>(edges.size());
        const SpanningTreeOracle st(vertices, edges);
        const CauchyBinetOracle cb(ref::reduced_incidence(vertices, edges));
        const auto trees = static_cast<long>(ref::spanning_forests(vertices, edges).size());
        const auto w = random_weights(n, gen);
        // Incidence minors are +-1, so Cauchy-Binet normalizes by the tree count.
        CHECK(cb.partition_exact(w) * trees == st.partition_exact(w));
        CHECK(std::exp(cb.log_gram_det()) == doctest::Approx(static_cast<double>(trees)));
        const auto lw = log_weights(as_doubles(w));
        CHECK(ref::max_abs_diff(cb.marginals(lw), st.marginals(lw)) < 1e-9);
    }
}

TEST_CASE("property: partition functions are multi-affine") {
    ref::Gen gen(35);
    for (int trial = 0; trial < 30; ++trial) {
        const Case c = random_case(gen, trial % 3);
        auto w = as_doubles(random_weights(c.n, gen));
        const int e = gen.integer(0, c.n - 1);
        double z[3];
        for (int i = 0; i < 3; ++i) {
            w[e] = 0.5 + i;
            z[i] = std::exp(c.oracle->log_partition(log_weights(w)));
        }
        CHECK(z[1] - z[0] == doctest::Approx(z[2] - z[1]).epsilon(1e-10));
    }
}

TEST_CASE("property: marginal sum is the unit forward difference") {
    ref::Gen gen(36);
    for (int trial = 0; trial < 30; ++trial) {
        const Case c = random_case(gen, trial % 3);
        auto w = random_weights(c.n, gen);
        const int e = gen.integer(0, c.n - 1);
        const Rational z = c.oracle->partition_exact(w);
        auto bumped = w;
        bumped[e] += 1;
        CHECK(marginal_sum(*c.oracle, w, e) == w[e] * (c.oracle->partition_exact(bumped) - z));
    }
}

TEST_CASE("property: interpolation matches inclusion-exclusion") {
    ref::Gen gen(37);
    for (int trial = 0; trial < 60; ++trial) {
        const Case c = random_case(gen, trial % 3);
        const auto w = random_weights(c.n, gen);
        ElementSet in, out;
        for (int e = 0; e < c.n; ++e) {
            const int r = gen.integer(0, 3);
            if (r == 0) in = in.with(e);
            if (r == 1) out = out.with(e);
        }
        const Rational expected = ref::weighted_sum(c.family, w, in, out);
        CHECK(constrained_count(*c.oracle, w, in, out) == expected);
        if (in.size() + out.size() <= 4) {
            const double z = c.oracle->partition_exact(w).get_d();
            CHECK(constrained_count(*c.oracle, as_doubles(w), in, out) / z == doctest::Approx(expected.get_d() / z).epsilon(1e-8));
        }
    }
}

TEST_CASE("property: thinned mass matches enumeration of bases and thinning outcomes") {
    ref::Gen gen(38);
    for (int trial = 0; trial < 30; ++trial) {
        const Case c = random_case(gen, 2);
        const auto w = random_weights(c.n, gen);
        std::vector<Rational> tau;
        for (int e = 0; e < c.n; ++e) tau.push_back(fraction(gen.integer(0, 6), 6));
        const Rational z = ref::weighted_sum(c.family, w);
        for (ElementSet t : ref::all_subsets(c.n)) {
            Rational expected = 0;
            for (ElementSet b : c.family) {
                if (!t.subset_of(b)) continue;
                Rational p = ref::monomial(b, w) / z;
                for (int e : b.elements()) p *= t.contains(e) ? tau[e] : 1 - tau[e];
                expected += p;
            }
            CHECK(thinned_mass(*c.oracle, w, tau, t) == expected);
        }
    }
}

TEST_CASE("property: inclusion covariance matches pair marginals") {
    ref::Gen gen(39);
    for (int trial = 0; trial < 20; ++trial) {
        const Case c = random_case(gen, trial % 3);
        const auto w = random_weights(c.n, gen);
        const Rational z = ref::weighted_sum(c.family, w);
        const auto cov = inclusion_covariance(*c.oracle, log_weights(as_doubles(w)));
        for (int e = 0; e < c.n; ++e)
            for (int f = 0; f < c.n; ++f) {
                const Rational pe = ref::weighted_sum(c.family, w, ElementSet::single(e)) / z;
                const Rational pf = ref::weighted_sum(c.family, w, ElementSet::single(f)) / z;
                const Rational pef = ref::weighted_sum(c.family, w, ElementSet::single(e).with(f)) / z;
                CHECK(cov[e][f] == doctest::Approx(Rational(pef - pe * pf).get_d()).epsilon(1e-9).scale(1.0));
            }
    }
}

TEST_CASE("property: concurrent evaluations on one oracle agree") {
    ref::Gen gen(40);
    const auto edges = gen.edges(9, 20);
    const MatchingOracle oracle(Environment::general_matching(9, edges));
    std::vector<std::vector<double>> inputs;
    for (int i = 0; i < 8; ++i) {
        std::vector<double> lw;
        for (std::size_t e = 0; e < edges.size(); ++e) lw.push_back(gen.real(-2, 2));
        inputs.push_back(lw);
    }
    std::vector<double> serial;
    for (const auto& lw : inputs) serial.push_back(oracle.log_partition(lw));
    std::vector<double> parallel(inputs.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < inputs.size(); ++i)
        pool.emplace_back([&, i] { parallel[i] = oracle.log_partition(inputs[i]); });
    for (auto& t : pool) t.join();
    CHECK(serial == parallel);
}

TEST_CASE("base measures") {
    const auto tri = std::make_shared<Matroid>(Matroid::graphic(3, kTriangle));
    const auto ust = BaseMeasure::uniform_spanning_tree(tri);
    CHECK(ust.bases().size() == 3);
    CHECK(ust.log_mass_bound() == doctest::Approx(std::log(3.0)));

    const auto det = BaseMeasure::determinantal({{1, 0, 1}, {0, 1, 1}});
    Rational total = 0;
    for (ElementSet b : det.bases()) total += det.mass(b);
    // Minors: det[e0 e1] = 1, det[e0 e2] = 1, det[e1 e2] = -1; gram det 3.
    CHECK(det.bases().size() == 3);
    CHECK(total / det.oracle()->partition_exact(std::vector<Rational>(3, Rational(1))) == 1);

    const auto table = ust.tabulate();
    CHECK(table->sets().size() == 3);
}

TEST_CASE("bareiss determinant") {
    CHECK(bareiss_determinant({{2, 1}, {1, 3}}) == 5);
    CHECK(bareiss_determinant({{0, 1}, {1, 0}}) == -1);
    CHECK(bareiss_determinant({{1, 2}, {2, 4}}) == 0);
    int sign = 0;
    CHECK(log_abs_determinant({{0, 2}, {3, 0}}, &sign) == doctest::Approx(std::log(6.0)));
    CHECK(sign == -1);
}

TEST_CASE("tree counts vanish once a bridge is removed") {
    // Triangle 0-1-2 with a pendant edge 2-3.
    const SpanningTreeOracle oracle(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}});
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(oracle.log_partition(std::vector<double>{0, 0, 0, -inf}) == -inf);
    CHECK(std::abs(oracle.log_partition(std::vector<double>{-inf, 0, 0, 0})) <= 1e-15);
    CHECK_THROWS_AS(oracle.marginals(std::vector<double>{0, 0, 0, -inf}), NumericalError);
    const auto cov = inclusion_covariance(oracle, std::vector<double>(4, 0.0));
    for (int e = 0; e < 4; ++e) CHECK(std::abs(cov[3][e]) <= 1e-15);
}

}  // TEST_SUITE
