#pragma once

// Reference computations written independently of the library: plain subset loops, a separate
// union-find, and rational sums. Tests compare library output against these.

#include "socrs/element_set.hpp"
#include "socrs/env.hpp"
#include "socrs/rational.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace ref {

using socrs::Edge;
using socrs::ElementSet;
using socrs::Rational;

// Deterministic generator for property tests.
struct Gen {
    std::mt19937_64 engine;
    explicit Gen(std::uint64_t seed) : engine(seed) {}
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
    double real(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
    bool coin() { return integer(0, 1) == 1; }
    // Rational in [1/den, 1] with the given denominator.
    Rational fraction(int den) { return socrs::fraction(integer(1, den), den); }

    // Distinct vertex pairs; allowed pairs can be restricted by a side labelling.
    std::vector<Edge> edges(int vertices, int count, const std::vector<int>* side = nullptr) {
        std::vector<Edge> pool;
        for (int u = 0; u < vertices; ++u)
            for (int v = u + 1; v < vertices; ++v)
                if (!side || (*side)[u] != (*side)[v]) pool.emplace_back(u, v);
        std::shuffle(pool.begin(), pool.end(), engine);
        pool.resize(std::min<std::size_t>(pool.size(), static_cast<std::size_t>(count)));
        return pool;
    }
};

inline std::vector<ElementSet> all_subsets(int n) {
    std::vector<ElementSet> out;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) out.push_back(ElementSet::from_bits(b));
    return out;
}

inline bool vertex_disjoint(const std::vector<std::vector<int>>& hyperedges, ElementSet s) {
    std::vector<int> used;
    for (int e : s.elements())
        for (int v : hyperedges[e]) {
            if (std::find(used.begin(), used.end(), v) != used.end()) return false;
            used.push_back(v);
        }
    return true;
}

inline bool vertex_disjoint(const std::vector<Edge>& edges, ElementSet s) {
    std::vector<std::vector<int>> h;
    for (auto [u, v] : edges) h.push_back({u, v});
    return vertex_disjoint(h, s);
}

// Number of connected components of (vertices, edges restricted to s).
inline int components(int vertices, const std::vector<Edge>& edges, ElementSet s) {
    std::vector<int> parent(static_cast<std::size_t>(vertices));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
    int count = vertices;
    for (int e : s.elements()) {
        const int a = find(edges[e].first), b = find(edges[e].second);
        if (a != b) {
            parent[a] = b;
            --count;
        }
    }
    return count;
}

inline int graphic_rank(int vertices, const std::vector<Edge>& edges, ElementSet s) {
    return vertices - components(vertices, edges, s);
}

inline bool is_forest(int vertices, const std::vector<Edge>& edges, ElementSet s) {
    return graphic_rank(vertices, edges, s) == s.size();
}

template <class Pred>
std::vector<ElementSet> filter_subsets(int n, Pred&& keep) {
    std::vector<ElementSet> out;
    for (ElementSet s : all_subsets(n))
        if (keep(s)) out.push_back(s);
    return out;
}

inline std::vector<ElementSet> spanning_forests(int vertices, const std::vector<Edge>& edges) {
    const int r = graphic_rank(vertices, edges, ElementSet::full(static_cast<int>(edges.size())));
    return filter_subsets(static_cast<int>(edges.size()),
                          [&](ElementSet s) { return s.size() == r && is_forest(vertices, edges, s); });
}

inline Rational monomial(ElementSet s, const std::vector<Rational>& w) {
    Rational p = 1;
    for (int e : s.elements()) p *= w[e];
    return p;
}

inline Rational weighted_sum(const std::vector<ElementSet>& sets, const std::vector<Rational>& w,
                             ElementSet include = {}, ElementSet exclude = {}) {
    Rational z = 0;
    for (ElementSet s : sets)
        if (include.subset_of(s) && !s.intersects(exclude)) z += monomial(s, w);
    return z;
}

inline double log_sum(const std::vector<ElementSet>& sets, const std::vector<double>& w) {
    double z = 0;
    for (ElementSet s : sets) {
        double p = 1;
        for (int e : s.elements()) p *= w[e];
        z += p;
    }
    return std::log(z);
}

// Bin(n, q) probability mass by the product formula.
inline Rational binomial_pmf(int n, int j, const Rational& q) {
    Rational c = 1;
    for (int i = 1; i <= j; ++i) c = c * (n - j + i) / i;
    Rational p = c;
    for (int i = 0; i < j; ++i) p *= q;
    for (int i = 0; i < n - j; ++i) p *= (1 - q);
    return p;
}

// Signed vertex-edge incidence matrix with one vertex row per component removed (full row rank).
inline socrs::RealMatrix reduced_incidence(int vertices, const std::vector<Edge>& edges) {
    const int m = static_cast<int>(edges.size());
    std::vector<int> parent(static_cast<std::size_t>(vertices));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
    for (auto [u, v] : edges) parent[find(u)] = find(v);
    socrs::RealMatrix a;
    std::vector<bool> dropped(static_cast<std::size_t>(vertices), false);
    for (int v = 0; v < vertices; ++v) {
        const int root = find(v);
        if (!dropped[root]) {
            dropped[root] = true;
            continue;
        }
        std::vector<double> row(static_cast<std::size_t>(m), 0.0);
        for (int e = 0; e < m; ++e) {
            if (edges[e].first == v) row[e] = 1.0;
            if (edges[e].second == v) row[e] = -1.0;
        }
        a.push_back(row);
    }
    return a;
}

// Connected graphs on `vertices` labelled vertices, as edge lists (exhaustive, small only).
inline std::vector<std::vector<Edge>> connected_graphs(int vertices) {
    std::vector<Edge> pairs;
    for (int u = 0; u < vertices; ++u)
        for (int v = u + 1; v < vertices; ++v) pairs.emplace_back(u, v);
    std::vector<std::vector<Edge>> out;
    for (std::uint64_t b = 1; b < (std::uint64_t{1} << pairs.size()); ++b) {
        std::vector<Edge> g;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if ((b >> i) & 1) g.push_back(pairs[i]);
        if (components(vertices, g, ElementSet::full(static_cast<int>(g.size()))) == 1) out.push_back(g);
    }
    return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace ref
