#pragma once

#include "socrs/env.hpp"
#include "socrs/rational.hpp"

#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace socrs {

// Weighted generating polynomial Z(w) = sum over feasible sets (or bases) of mass(S) * prod_{e in S} w_e.
//
// Double mode takes log-weights (w_e = exp(log_w[e]), -inf meaning w_e = 0) and returns log values,
// so weights up to e^60 never overflow. Exact mode takes rational weights.
class CountingOracle {
public:
    virtual ~CountingOracle() = default;

    virtual std::string_view backend() const = 0;
    virtual int size() const = 0;

    // -inf when Z = 0.
    virtual double log_partition(std::span<const double> log_w) const = 0;
    virtual Rational partition_exact(std::span<const Rational> w) const = 0;

    // P[e in S] under the tilted measure. The default removes one element at a time.
    virtual std::vector<double> marginals(std::span<const double> log_w) const;
};

using OraclePtr = std::shared_ptr<const CountingOracle>;

// Sums over an explicit list of sets with optional per-set masses.
class EnumerationOracle final : public CountingOracle {
public:
    // Unit masses.
    EnumerationOracle(int n, std::vector<ElementSet> sets);
    // Exact masses; log masses are derived from them.
    EnumerationOracle(int n, std::vector<ElementSet> sets, std::vector<Rational> masses);
    static std::shared_ptr<EnumerationOracle> for_environment(const Environment& env,
                                                              std::size_t cap = kDefaultEnumerationCap);

    std::string_view backend() const override { return "enumeration"; }
    int size() const override { return n_; }
    double log_partition(std::span<const double> log_w) const override;
    Rational partition_exact(std::span<const Rational> w) const override;
    std::vector<double> marginals(std::span<const double> log_w) const override;

    const std::vector<ElementSet>& sets() const { return sets_; }
    const std::vector<double>& log_masses() const { return log_mass_; }

private:
    int n_;
    std::vector<ElementSet> sets_;
    std::vector<double> log_mass_;
    std::vector<Rational> mass_;  // empty: all ones
};

// Z(G) = Z(G - e) + w_e Z(G - u - v), memoized on the remaining edge set.
// Works for hypergraph matchings too (delete every vertex of e).
class MatchingOracle final : public CountingOracle {
public:
    explicit MatchingOracle(const Environment& env, std::size_t cache_cap = 1'000'000);

    std::string_view backend() const override { return "matching-recursion"; }
    int size() const override { return static_cast<int>(conflicts_.size()); }
    double log_partition(std::span<const double> log_w) const override;
    Rational partition_exact(std::span<const Rational> w) const override;
    std::vector<double> marginals(std::span<const double> log_w) const override;

private:
    std::vector<ElementSet> conflicts_;  // includes the element itself
    std::size_t cache_cap_;
};

// sum_{j <= k} e_j(w) by the truncated elementary-symmetric recurrence.
class KUniformOracle final : public CountingOracle {
public:
    KUniformOracle(int n, int k);

    std::string_view backend() const override { return "ksym-dp"; }
    int size() const override { return n_; }
    double log_partition(std::span<const double> log_w) const override;
    Rational partition_exact(std::span<const Rational> w) const override;
    std::vector<double> marginals(std::span<const double> log_w) const override;

private:
    int n_;
    int k_;
};

// Spanning forests (bases of the graphic matroid): product over components of the reduced
// weighted Laplacian determinant.
class SpanningTreeOracle final : public CountingOracle {
public:
    SpanningTreeOracle(int num_vertices, std::vector<Edge> edges);

    std::string_view backend() const override { return "matrix-tree"; }
    int size() const override { return static_cast<int>(edges_.size()); }
    double log_partition(std::span<const double> log_w) const override;
    Rational partition_exact(std::span<const Rational> w) const override;
    // w_e times the effective resistance between the endpoints of e.
    std::vector<double> marginals(std::span<const double> log_w) const override;

private:
    // Do the edges of nonzero weight span every component?
    bool spans(std::span<const double> log_w) const;

    int num_vertices_;
    std::vector<Edge> edges_;
    std::vector<int> component_;   // component id per vertex
    std::vector<int> local_index_; // index inside the reduced Laplacian of its component, -1 for the dropped root
    std::vector<int> component_dim_;
    int rank_ = 0;
};

// det(A diag(w) A^T) / det(A A^T) for a full-row-rank r x n matrix A.
class CauchyBinetOracle final : public CountingOracle {
public:
    explicit CauchyBinetOracle(RealMatrix a);

    std::string_view backend() const override { return "cauchy-binet"; }
    int size() const override { return n_; }
    double log_partition(std::span<const double> log_w) const override;
    Rational partition_exact(std::span<const Rational> w) const override;
    // Leverage scores w_e a_e^T (A W A^T)^{-1} a_e.
    std::vector<double> marginals(std::span<const double> log_w) const override;

    const RealMatrix& matrix() const { return a_; }
    double log_gram_det() const { return log_gram_det_; }

private:
    RealMatrix a_;
    int r_ = 0;
    int n_ = 0;
    double log_gram_det_ = 0;
    Rational gram_det_;
};

// Measure on the bases of a matroid, with full support.
class BaseMeasure {
public:
    enum class Kind { UniformOnBases, UniformSpanningTree, Determinantal, Table };

    static BaseMeasure uniform_on_bases(std::shared_ptr<const Matroid> m, std::size_t cap = kDefaultEnumerationCap);
    static BaseMeasure uniform_spanning_tree(std::shared_ptr<const Matroid> graphic);
    // mu0(B) = det(A_B)^2 / det(A A^T); the matroid is the column matroid of A.
    static BaseMeasure determinantal(RealMatrix a);
    static BaseMeasure table(std::shared_ptr<const Matroid> m, std::vector<ElementSet> bases,
                             std::vector<Rational> masses);

    Kind kind() const { return kind_; }
    const Matroid& matroid() const { return *matroid_; }
    std::shared_ptr<const Matroid> matroid_handle() const { return matroid_; }
    OraclePtr oracle() const { return oracle_; }

    // Every base, in size-lex order.
    std::vector<ElementSet> bases(std::size_t cap = kDefaultEnumerationCap) const;
    // Unnormalized mass on the oracle's scale (zero for non-bases).
    Rational mass(ElementSet b) const;
    // Enumeration oracle over the explicit base table, same scale as oracle().
    std::shared_ptr<EnumerationOracle> tabulate(std::size_t cap = kDefaultEnumerationCap) const;
    // max |log mu0(B)| over bases of the normalized measure.
    double log_mass_bound(std::size_t cap = kDefaultEnumerationCap) const;

private:
    Kind kind_ = Kind::Table;
    std::shared_ptr<const Matroid> matroid_;
    OraclePtr oracle_;
    std::vector<ElementSet> table_bases_;
    std::vector<Rational> table_masses_;
};

// Backend for the feasible family of env: matching recursion for matching kinds, ksym-dp for
// k-uniform, enumeration of independent sets for matroids.
OraclePtr oracle_for(const Environment& env);

// Z restricted to sets containing `include` and avoiding `exclude`, from evaluations of Z alone.
// Optional trace receives one "a,b,value" row per evaluation.
Rational constrained_count(const CountingOracle& oracle, std::span<const Rational> w, ElementSet include,
                           ElementSet exclude, std::ostream* trace = nullptr);
// Double mode; refuses |include| + |exclude| > 8.
double constrained_count(const CountingOracle& oracle, std::span<const double> w, ElementSet include,
                         ElementSet exclude);

Rational marginal_sum(const CountingOracle& oracle, std::span<const Rational> w, int e);
double marginal_sum(const CountingOracle& oracle, std::span<const double> w, int e);

// Probability that thinning a w-tilted base with retention tau yields exactly t.
Rational thinned_mass(const CountingOracle& oracle, std::span<const Rational> w, std::span<const Rational> tau,
                      ElementSet t, std::ostream* trace = nullptr);
double thinned_mass(const CountingOracle& oracle, std::span<const double> w, std::span<const double> tau,
                    ElementSet t);

std::vector<double> log_weights(std::span<const double> w);

// Covariance of the inclusion indicators under the tilt, from marginals with one weight pinned to zero:
// Cov(e, f) = (1 - m_f) (m_e - m_e[w_f = 0]).
std::vector<std::vector<double>> inclusion_covariance(const CountingOracle& oracle, std::span<const double> log_w);

// Determinants shared by the oracles.
Rational bareiss_determinant(std::vector<std::vector<Rational>> a);
// log |det|, -inf when singular; sign returned through `sign` when non-null.
double log_abs_determinant(std::vector<std::vector<double>> a, int* sign = nullptr);

}  // namespace socrs
