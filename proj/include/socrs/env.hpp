#pragma once

#include "socrs/element_set.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace socrs {

inline constexpr std::size_t kDefaultEnumerationCap = 2'000'000;

using Edge = std::pair<int, int>;
using RealMatrix = std::vector<std::vector<double>>;

struct RankResult {
    int rank = 0;
    bool ill_conditioned = false;
};

class Matroid {
public:
    enum class Variant { Uniform, Graphic, Linear, Explicit };

    static Matroid uniform(int n, int k);
    // Ground set = edges; self-loops are allowed and have rank 0.
    static Matroid graphic(int num_vertices, std::vector<Edge> edges);
    // Column matroid of an r x n matrix.
    static Matroid linear(RealMatrix matrix, double pivot_tol = 1e-9);
    // Bases must be equicardinal; the independent sets are their subsets.
    static Matroid from_bases(int n, std::vector<ElementSet> bases);
    // Any family whose maximal members form a matroid base family.
    static Matroid from_independent_sets(int n, const std::vector<ElementSet>& independent);

    Variant variant() const { return variant_; }
    int size() const { return n_; }
    int rank() const { return full_rank_; }

    // Throws NumericalError when a linear matroid hits an ill-conditioned pivot.
    int rank(ElementSet t) const;
    RankResult rank_checked(ElementSet t) const;
    bool is_independent(ElementSet s) const { return rank(s) == s.size(); }

    int uniform_k() const { return k_; }
    int num_vertices() const { return num_vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const RealMatrix& matrix() const { return matrix_; }
    const std::vector<ElementSet>& explicit_bases() const { return bases_; }
    bool has_integer_matrix() const { return integer_matrix_; }

private:
    Matroid() = default;
    RankResult linear_rank(ElementSet t) const;
    int graphic_rank(ElementSet t) const;

    Variant variant_ = Variant::Uniform;
    int n_ = 0;
    int full_rank_ = 0;
    int k_ = 0;
    int num_vertices_ = 0;
    std::vector<Edge> edges_;
    RealMatrix matrix_;
    double pivot_tol_ = 1e-9;
    bool integer_matrix_ = false;
    std::vector<ElementSet> bases_;
};

enum class EnvKind { GeneralMatching, BipartiteMatching, HypergraphMatching, KUniform, Matroid };

std::string to_string(EnvKind kind);

// Ground set plus a downward-closed feasibility family.
class Environment {
public:
    static Environment general_matching(int num_vertices, std::vector<Edge> edges);
    // side[v] in {0, 1}; every edge must join the two sides.
    static Environment bipartite_matching(int num_vertices, std::vector<Edge> edges, std::vector<int> side);
    static Environment hypergraph_matching(int num_vertices, std::vector<std::vector<int>> hyperedges);
    static Environment k_uniform(int n, int k);
    static Environment matroid(std::shared_ptr<const Matroid> m);

    EnvKind kind() const { return kind_; }
    int size() const { return n_; }
    bool is_matching() const {
        return kind_ == EnvKind::GeneralMatching || kind_ == EnvKind::BipartiteMatching ||
               kind_ == EnvKind::HypergraphMatching;
    }

    // Throws InputError when s mentions an element outside [0, n).
    bool is_feasible(ElementSet s) const;
    // For feasible t with e not in t: is t + e feasible?
    bool can_add(ElementSet t, int e) const;

    int num_vertices() const { return num_vertices_; }
    // Sorted vertex lists; graphs store pairs as 2-element lists.
    const std::vector<std::vector<int>>& hyperedges() const { return hyperedges_; }
    std::vector<Edge> graph_edges() const;
    const std::vector<int>& side() const { return side_; }
    // Max hyperedge size (2 for graphs).
    int rank_bound() const { return rank_bound_; }
    int k() const { return k_; }
    const Matroid& matroid() const { return *matroid_; }
    std::shared_ptr<const Matroid> matroid_handle() const { return matroid_; }
    // Elements sharing a vertex with e (matching kinds), e excluded.
    ElementSet conflicts(int e) const { return conflicts_[static_cast<std::size_t>(e)]; }

private:
    Environment() = default;
    void build_conflicts();
    void check_ids(ElementSet s) const;

    EnvKind kind_ = EnvKind::KUniform;
    int n_ = 0;
    int num_vertices_ = 0;
    int k_ = 0;
    int rank_bound_ = 0;
    std::vector<std::vector<int>> hyperedges_;
    std::vector<int> side_;
    std::vector<ElementSet> conflicts_;
    std::shared_ptr<const Matroid> matroid_;
};

// Every feasible set once, ordered by size then lexicographically.
std::vector<ElementSet> enumerate_feasible(const Environment& env, std::size_t cap = kDefaultEnumerationCap);

// Validated marginal activation vector, coordinates in (0, 1].
class ActivationVector {
public:
    ActivationVector() = default;
    explicit ActivationVector(std::vector<double> x, double scale = 1.0);

    int size() const { return static_cast<int>(x_.size()); }
    double operator[](int e) const { return x_[static_cast<std::size_t>(e)]; }
    std::span<const double> values() const { return x_; }
    double scale() const { return scale_; }

private:
    std::vector<double> x_;
    double scale_ = 1.0;
};

enum class Membership { InsideRelint, Boundary, Outside, Undetermined };

std::string to_string(Membership m);

struct MembershipReport {
    Membership status = Membership::Undetermined;
    // Human-readable name of the violated (outside) or tight (boundary) constraint.
    std::string constraint;
    // Largest lhs - rhs over the checked constraints.
    double max_excess = 0.0;
};

inline constexpr int kMembershipEnumerationLimit = 20;

MembershipReport check_membership(const Environment& env, std::span<const double> x, double tol = 1e-12);

// Largest c with c * x satisfying every checked constraint of the polytope (exact for matroids
// and for graphs up to 20 vertices). Used by the random instance generators.
double max_feasible_scale(const Environment& env, std::span<const double> x);

}  // namespace socrs
