#include "support.hpp"

#include "socrs/env.hpp"
#include "socrs/errors.hpp"

using namespace socrs;

namespace {

const std::vector<Edge> kTriangle{{0, 1}, {1, 2}, {0, 2}};
const std::vector<Edge> kK4{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}};

}  // namespace

TEST_SUITE("env") {

TEST_CASE("feasibility examples") {
    CHECK_FALSE(Environment::k_uniform(3, 2).is_feasible(ElementSet::of({0, 1, 2})));
    CHECK_FALSE(Environment::general_matching(3, kTriangle).is_feasible(ElementSet::of({0, 1})));
    for (const auto& env : {Environment::k_uniform(3, 0), Environment::general_matching(3, kTriangle),
                            Environment::matroid(std::make_shared<Matroid>(Matroid::graphic(3, kTriangle))),
                            Environment::hypergraph_matching(4, {{0, 1, 2}, {2, 3}})})
        CHECK(env.is_feasible(ElementSet{}));
    CHECK_THROWS_AS(Environment::k_uniform(3, 2).is_feasible(ElementSet::single(5)), InputError);
}

TEST_CASE("enumeration examples") {
    const auto single = enumerate_feasible(Environment::general_matching(2, {{0, 1}}));
    REQUIRE(single.size() == 2);
    CHECK(single[0] == ElementSet{});
    CHECK(single[1] == ElementSet::single(0));

    const auto k4 = enumerate_feasible(Environment::general_matching(4, kK4));
    CHECK(k4.size() == 10);
    int by_size[3] = {0, 0, 0};
    for (ElementSet s : k4) ++by_size[s.size()];
    CHECK(by_size[0] == 1);
    CHECK(by_size[1] == 6);
    CHECK(by_size[2] == 3);

    CHECK(enumerate_feasible(Environment::k_uniform(3, 1)).size() == 4);
    CHECK_THROWS_AS(enumerate_feasible(Environment::k_uniform(20, 20), 1000), TooLargeError);
}

TEST_CASE("enumeration order is by size then lexicographic") {
    const auto sets = enumerate_feasible(Environment::k_uniform(5, 3));
    for (std::size_t i = 1; i < sets.size(); ++i) CHECK(size_lex_less(sets[i - 1], sets[i]));
    CHECK(sets.size() == 1 + 5 + 10 + 10);
}

TEST_CASE("rank examples") {
    CHECK(Matroid::uniform(5, 2).rank(ElementSet::full(5)) == 2);
    CHECK(Matroid::graphic(3, kTriangle).rank(ElementSet::full(3)) == 2);
    CHECK(Matroid::linear({{1, 0}, {0, 1}}).rank(ElementSet::of({0, 1})) == 2);
}

TEST_CASE("linear rank flags ill-conditioned pivots") {
    // Columns (0,1), (1,0), (1,3e-10): the last two are nearly parallel.
    const Matroid m = Matroid::linear({{0.0, 1.0, 1.0}, {1.0, 0.0, 3e-10}}, 1e-9);
    CHECK(m.rank() == 2);
    CHECK(m.rank_checked(ElementSet::of({1, 2})).ill_conditioned);
    CHECK_THROWS_AS(m.rank(ElementSet::of({1, 2})), NumericalError);
    CHECK_FALSE(m.rank_checked(ElementSet::of({0, 1})).ill_conditioned);
}

TEST_CASE("membership examples") {
    const auto star = Environment::general_matching(4, {{0, 1}, {0, 2}, {0, 3}});
    const auto out = check_membership(star, std::vector<double>{0.4, 0.4, 0.4});
    CHECK(out.status == Membership::Outside);
    CHECK(out.constraint.find("vertex 0") != std::string::npos);
    CHECK(out.max_excess == doctest::Approx(0.2));

    CHECK(check_membership(Environment::k_uniform(4, 2), std::vector<double>(4, 0.5)).status == Membership::Boundary);

    const auto path = Environment::bipartite_matching(4, {{0, 1}, {2, 3}}, {0, 1, 0, 1});
    CHECK(check_membership(path, std::vector<double>{0.3, 0.3}).status == Membership::InsideRelint);
}

TEST_CASE("membership on odd sets and large hypergraphs") {
    // Triangle at 1/2 each satisfies every vertex load but not the odd-set constraint x(E) <= 1.
    const auto tri = Environment::general_matching(3, kTriangle);
    CHECK(check_membership(tri, std::vector<double>(3, 0.5)).status == Membership::Outside);
    CHECK(check_membership(tri, std::vector<double>(3, 0.3)).status == Membership::InsideRelint);
    const auto h = Environment::hypergraph_matching(4, {{0, 1, 2}, {2, 3}});
    CHECK(check_membership(h, std::vector<double>{0.3, 0.3}).status == Membership::Undetermined);
    CHECK(check_membership(h, std::vector<double>{0.6, 0.6}).status == Membership::Outside);
}

TEST_CASE("activation vectors reject out-of-range coordinates") {
    CHECK_NOTHROW(ActivationVector({0.5, 1.0}));
    CHECK_THROWS_AS(ActivationVector({0.0, 0.5}), InputError);
    CHECK_THROWS_AS(ActivationVector({1.5}), InputError);
    CHECK_THROWS_AS(ActivationVector({0.5}, -1.0), InputError);
}

TEST_CASE("property: enumeration matches brute force and is downward closed") {
    ref::Gen gen(11);
    for (int trial = 0; trial < 40; ++trial) {
        const int vertices = gen.integer(3, 7);
        const auto edges = gen.edges(vertices, gen.integer(1, 12));
        const int m = static_cast<int>(edges.size());
        const auto env = Environment::general_matching(vertices, edges);
        const auto sets = enumerate_feasible(env);
        const auto expected = ref::filter_subsets(m, [&](ElementSet s) { return ref::vertex_disjoint(edges, s); });
        REQUIRE(sets.size() == expected.size());
        for (ElementSet s : sets) {
            CHECK(ref::vertex_disjoint(edges, s));
            for (ElementSet t : ref::all_subsets(m))
                if (t.subset_of(s)) CHECK(env.is_feasible(t));
        }
    }
}

TEST_CASE("property: hypergraph and uniform feasibility match their definitions") {
    ref::Gen gen(12);
    for (int trial = 0; trial < 20; ++trial) {
        const int vertices = gen.integer(4, 8);
        std::vector<std::vector<int>> h;
        for (int e = 0; e < gen.integer(2, 8); ++e) {
            std::vector<int> all(static_cast<std::size_t>(vertices));
            std::iota(all.begin(), all.end(), 0);
            std::shuffle(all.begin(), all.end(), gen.engine);
            all.resize(static_cast<std::size_t>(gen.integer(1, 3)));
            std::sort(all.begin(), all.end());
            h.push_back(all);
        }
        const auto env = Environment::hypergraph_matching(vertices, h);
        for (ElementSet s : ref::all_subsets(static_cast<int>(h.size()))) CHECK(env.is_feasible(s) == ref::vertex_disjoint(h, s));
        const int k = gen.integer(0, 5);
        const auto uni = Environment::k_uniform(8, k);
        for (ElementSet s : ref::all_subsets(8)) CHECK(uni.is_feasible(s) == (s.size() <= k));
    }
}

TEST_CASE("property: graphic rank is vertices minus components") {
    ref::Gen gen(13);
    for (int trial = 0; trial < 30; ++trial) {
        const int vertices = gen.integer(2, 10);
        const auto edges = gen.edges(vertices, gen.integer(1, 12));
        const Matroid m = Matroid::graphic(vertices, edges);
        for (ElementSet s : ref::all_subsets(static_cast<int>(edges.size())))
            CHECK(m.rank(s) == ref::graphic_rank(vertices, edges, s));
    }
}

TEST_CASE("property: linear and graphic rank agree on signed incidence matrices") {
    ref::Gen gen(14);
    for (int trial = 0; trial < 20; ++trial) {
        const int vertices = gen.integer(2, 8);
        const auto edges = gen.edges(vertices, gen.integer(1, 10));
        const Matroid g = Matroid::graphic(vertices, edges);
        const Matroid l = Matroid::linear(ref::reduced_incidence(vertices, edges));
        CHECK(l.has_integer_matrix());
        for (ElementSet s : ref::all_subsets(static_cast<int>(edges.size()))) CHECK(g.rank(s) == l.rank(s));
    }
}

TEST_CASE("property: rank axioms on random matroids") {
    ref::Gen gen(15);
    for (int trial = 0; trial < 10; ++trial) {
        const int vertices = gen.integer(3, 6);
        const auto edges = gen.edges(vertices, gen.integer(3, 10));
        const int n = static_cast<int>(edges.size());
        const Matroid m = Matroid::graphic(vertices, edges);
        const auto subsets = ref::all_subsets(n);
        CHECK(m.rank(ElementSet{}) == 0);
        for (ElementSet a : subsets) {
            CHECK(m.rank(a) <= a.size());
            for (int e = 0; e < n; ++e) CHECK(m.rank(a.with(e)) >= m.rank(a));
            const ElementSet b = subsets[static_cast<std::size_t>(gen.integer(0, static_cast<int>(subsets.size()) - 1))];
            CHECK(m.rank(a | b) + m.rank(a & b) <= m.rank(a) + m.rank(b));
        }
    }
}

TEST_CASE("property: exchange axiom on explicit matroids") {
    ref::Gen gen(16);
    for (int trial = 0; trial < 10; ++trial) {
        const int vertices = gen.integer(3, 6);
        const auto edges = gen.edges(vertices, gen.integer(3, 10));
        const int n = static_cast<int>(edges.size());
        const Matroid m = Matroid::from_bases(n, ref::spanning_forests(vertices, edges));
        const auto indep = ref::filter_subsets(n, [&](ElementSet s) { return m.is_independent(s); });
        for (ElementSet a : indep)
            for (ElementSet b : indep) {
                if (a.size() >= b.size()) continue;
                bool exchange = false;
                for (int e : (b - a).elements()) exchange = exchange || m.is_independent(a.with(e));
                CHECK(exchange);
            }
    }
}

TEST_CASE("property: matroid environments enumerate exactly the independent sets") {
    ref::Gen gen(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int vertices = gen.integer(3, 6);
        const auto edges = gen.edges(vertices, gen.integer(2, 10));
        const auto env = Environment::matroid(std::make_shared<Matroid>(Matroid::graphic(vertices, edges)));
        const auto expected = ref::filter_subsets(static_cast<int>(edges.size()),
                                                  [&](ElementSet s) { return ref::is_forest(vertices, edges, s); });
        CHECK(enumerate_feasible(env).size() == expected.size());
    }
}

}  // TEST_SUITE
