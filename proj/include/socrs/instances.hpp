#pragma once

#include "socrs/env.hpp"
#include "socrs/rational.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace socrs {

// A feasibility environment with an activation vector. x is exact; doubles are derived from it.
struct Instance {
    std::string name;
    // Structural description, kept for round-tripping.
    std::string kind;  // general-matching | bipartite-matching | hypergraph-matching | k-uniform | graphic-matroid | linear-matroid
    int vertices = 0;
    std::vector<Edge> edges;
    std::vector<int> side;
    std::vector<std::vector<int>> hyperedges;
    int n = 0;
    int k = 0;
    RealMatrix matrix;
    std::vector<Rational> x_exact;
    std::map<std::string, std::string> params;
    std::uint64_t seed = 0;

    Environment environment() const;
    std::shared_ptr<const Matroid> matroid() const;  // graphic and linear kinds
    std::vector<double> x() const { return to_doubles(x_exact); }
};

// Structured document; x entries are written as "p/q" strings.
std::string instance_to_json(const Instance& inst);
// Rejects unknown fields. x entries may be numbers or "p/q" strings.
Instance instance_from_json(const std::string& text);

// Star center a joined to v_1..v_n (x = eps = 1/n), pendant edges u_i v_i (x = 1 - eps).
// Edges 0..n-1 are the center edges, n..2n-1 the pendants.
Instance bipartite_impossibility(int n);
// K4 with outer cycle 01,12,23,30 at (1 - eps)/2 and diagonals 02,13 at eps.
Instance k4_barrier(const Rational& eps);
// Terminals u = 0, v = 1, middle vertices 2..n+1; edges u m_i (2i), m_i v (2i+1), every x = 1/2.
// With `terminal_edge`, edge 2n = uv with x = terminal_x.
Instance hat_graph(int n, bool terminal_edge = false, const Rational& terminal_x = fraction(1, 1000));
// k-uniform on n elements with x = k/n.
Instance symmetric_uniform(int n, int k);

// Random instances; x is a rational convex combination of random maximal feasible sets, scaled by a
// random factor in [scale_lo, 1]. Deterministic in the seed.
Instance random_graph(int vertices, int edges, std::uint64_t seed, double scale_lo = 0.5);
Instance random_bipartite(int left, int right, int edges, std::uint64_t seed, double scale_lo = 0.5);
Instance random_hypergraph(int vertices, int edges, int max_edge_size, std::uint64_t seed, double scale_lo = 0.5);
Instance random_graphic_matroid(int vertices, int edges, std::uint64_t seed, double scale_lo = 0.5);
// Graphic matroid of a given graph with a random x built the same way.
Instance graphic_with_random_x(int vertices, std::vector<Edge> edges, std::uint64_t seed, double scale_lo = 0.5);

// Dispatch by generator name: bipartite-impossibility, K4-barrier, hat-graph, symmetric-uniform,
// random-graph, random-bipartite, random-hypergraph, random-graphic-matroid.
Instance gen_instance(const std::string& name, const std::map<std::string, std::string>& params, std::uint64_t seed);

}  // namespace socrs
