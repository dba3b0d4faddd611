#include "socrs/env.hpp"

#include "socrs/errors.hpp"
#include "socrs/rational.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace socrs {

// ---------------------------------------------------------------- ElementSet

ElementSet ElementSet::of(std::initializer_list<int> elements) {
    return of(std::vector<int>(elements));
}

ElementSet ElementSet::of(const std::vector<int>& elements) {
    ElementSet s;
    for (int e : elements) {
        if (e < 0 || e >= kMaxElements) throw InputError("element id " + std::to_string(e) + " out of range");
        s = s.with(e);
    }
    return s;
}

std::vector<int> ElementSet::elements() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for_each([&](int e) { out.push_back(e); });
    return out;
}

bool size_lex_less(ElementSet a, ElementSet b) {
    if (a.size() != b.size()) return a.size() < b.size();
    std::uint64_t diff = a.bits() ^ b.bits();
    if (diff == 0) return false;
    return a.contains(std::countr_zero(diff));
}

std::string to_string(ElementSet s) {
    std::string out = "{";
    bool first = true;
    s.for_each([&](int e) {
        if (!first) out += ",";
        out += std::to_string(e);
        first = false;
    });
    return out + "}";
}

// ---------------------------------------------------------------- Matroid

namespace {

struct UnionFind {
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    bool unite(int a, int b) {
        a = find(a), b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
    std::vector<int> parent;
};

void check_size(int n) {
    if (n < 0 || n > kMaxElements)
        throw InputError("ground set size " + std::to_string(n) + " outside [0, " + std::to_string(kMaxElements) + "]");
}

}  // namespace

Matroid Matroid::uniform(int n, int k) {
    check_size(n);
    if (k < 0) throw InputError("uniform matroid needs k >= 0");
    Matroid m;
    m.variant_ = Variant::Uniform;
    m.n_ = n;
    m.k_ = k;
    m.full_rank_ = std::min(n, k);
    return m;
}

Matroid Matroid::graphic(int num_vertices, std::vector<Edge> edges) {
    check_size(static_cast<int>(edges.size()));
    for (auto [u, v] : edges)
        if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices)
            throw InputError("graphic matroid edge endpoint out of range");
    Matroid m;
    m.variant_ = Variant::Graphic;
    m.n_ = static_cast<int>(edges.size());
    m.num_vertices_ = num_vertices;
    m.edges_ = std::move(edges);
    m.full_rank_ = m.graphic_rank(ElementSet::full(m.n_));
    return m;
}

Matroid Matroid::linear(RealMatrix matrix, double pivot_tol) {
    const std::size_t cols = matrix.empty() ? 0 : matrix.front().size();
    for (const auto& row : matrix)
        if (row.size() != cols) throw InputError("linear matroid matrix is ragged");
    check_size(static_cast<int>(cols));
    Matroid m;
    m.variant_ = Variant::Linear;
    m.n_ = static_cast<int>(cols);
    m.pivot_tol_ = pivot_tol;
    m.integer_matrix_ = std::all_of(matrix.begin(), matrix.end(), [](const auto& row) {
        return std::all_of(row.begin(), row.end(), [](double a) { return std::isfinite(a) && a == std::round(a); });
    });
    m.matrix_ = std::move(matrix);
    m.full_rank_ = m.rank(ElementSet::full(m.n_));
    return m;
}

Matroid Matroid::from_bases(int n, std::vector<ElementSet> bases) {
    check_size(n);
    if (bases.empty()) throw InputError("explicit matroid needs at least one base");
    const ElementSet ground = ElementSet::full(n);
    for (auto b : bases) {
        if (!b.subset_of(ground)) throw InputError("explicit base mentions an element out of range");
        if (b.size() != bases.front().size()) throw InputError("explicit bases must be equicardinal");
    }
    std::sort(bases.begin(), bases.end(), size_lex_less);
    bases.erase(std::unique(bases.begin(), bases.end()), bases.end());
    Matroid m;
    m.variant_ = Variant::Explicit;
    m.n_ = n;
    m.full_rank_ = bases.front().size();
    m.bases_ = std::move(bases);
    return m;
}

Matroid Matroid::from_independent_sets(int n, const std::vector<ElementSet>& independent) {
    std::vector<ElementSet> maximal;
    for (auto s : independent) {
        bool dominated = std::any_of(independent.begin(), independent.end(),
                                     [&](ElementSet t) { return t != s && s.subset_of(t); });
        if (!dominated) maximal.push_back(s);
    }
    return from_bases(n, std::move(maximal));
}

int Matroid::graphic_rank(ElementSet t) const {
    UnionFind uf(num_vertices_);
    int r = 0;
    t.for_each([&](int e) {
        if (uf.unite(edges_[e].first, edges_[e].second)) ++r;
    });
    return r;
}

RankResult Matroid::linear_rank(ElementSet t) const {
    const std::size_t rows = matrix_.size();
    const std::vector<int> cols = t.elements();
    RankResult result;
    if (integer_matrix_) {
        std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(cols.size()));
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols.size(); ++j) a[i][j] = matrix_[i][cols[j]];
        std::size_t pivot_row = 0;
        for (std::size_t j = 0; j < cols.size() && pivot_row < rows; ++j) {
            std::size_t p = pivot_row;
            while (p < rows && sgn(a[p][j]) == 0) ++p;
            if (p == rows) continue;
            std::swap(a[p], a[pivot_row]);
            for (std::size_t i = pivot_row + 1; i < rows; ++i) {
                if (sgn(a[i][j]) == 0) continue;
                Rational f = a[i][j] / a[pivot_row][j];
                for (std::size_t c = j; c < cols.size(); ++c) a[i][c] -= f * a[pivot_row][c];
            }
            ++pivot_row;
        }
        result.rank = static_cast<int>(pivot_row);
        return result;
    }
    std::vector<std::vector<double>> a(rows, std::vector<double>(cols.size()));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) a[i][j] = matrix_[i][cols[j]];
    std::size_t pivot_row = 0;
    for (std::size_t j = 0; j < cols.size() && pivot_row < rows; ++j) {
        std::size_t p = pivot_row;
        for (std::size_t i = pivot_row + 1; i < rows; ++i)
            if (std::abs(a[i][j]) > std::abs(a[p][j])) p = i;
        const double mag = std::abs(a[p][j]);
        if (mag < pivot_tol_) {
            if (mag >= pivot_tol_ / 10) result.ill_conditioned = true;
            continue;
        }
        std::swap(a[p], a[pivot_row]);
        for (std::size_t i = pivot_row + 1; i < rows; ++i) {
            double f = a[i][j] / a[pivot_row][j];
            for (std::size_t c = j; c < cols.size(); ++c) a[i][c] -= f * a[pivot_row][c];
        }
        ++pivot_row;
    }
    result.rank = static_cast<int>(pivot_row);
    return result;
}

RankResult Matroid::rank_checked(ElementSet t) const {
    if (!t.subset_of(ElementSet::full(n_))) throw InputError("rank query mentions an element out of range");
    switch (variant_) {
    case Variant::Uniform:
        return {std::min(t.size(), k_), false};
    case Variant::Graphic:
        return {graphic_rank(t), false};
    case Variant::Linear:
        return linear_rank(t);
    case Variant::Explicit: {
        int best = 0;
        for (auto b : bases_) best = std::max(best, (b & t).size());
        return {best, false};
    }
    }
    return {};
}

int Matroid::rank(ElementSet t) const {
    RankResult r = rank_checked(t);
    if (r.ill_conditioned)
        throw NumericalError("ill-conditioned submatrix in linear matroid rank for " + to_string(t));
    return r.rank;
}

// ---------------------------------------------------------------- Environment

std::string to_string(EnvKind kind) {
    switch (kind) {
    case EnvKind::GeneralMatching: return "general-matching";
    case EnvKind::BipartiteMatching: return "bipartite-matching";
    case EnvKind::HypergraphMatching: return "hypergraph-matching";
    case EnvKind::KUniform: return "k-uniform";
    case EnvKind::Matroid: return "matroid";
    }
    return "unknown";
}

void Environment::build_conflicts() {
    conflicts_.assign(static_cast<std::size_t>(n_), ElementSet{});
    std::vector<ElementSet> incident(static_cast<std::size_t>(num_vertices_));
    for (int e = 0; e < n_; ++e)
        for (int v : hyperedges_[e]) incident[v] = incident[v].with(e);
    rank_bound_ = 0;
    for (int e = 0; e < n_; ++e) {
        ElementSet c;
        for (int v : hyperedges_[e]) c = c | incident[v];
        conflicts_[e] = c.without(e);
        rank_bound_ = std::max(rank_bound_, static_cast<int>(hyperedges_[e].size()));
    }
}

Environment Environment::hypergraph_matching(int num_vertices, std::vector<std::vector<int>> hyperedges) {
    check_size(static_cast<int>(hyperedges.size()));
    if (num_vertices < 0) throw InputError("negative vertex count");
    for (auto& h : hyperedges) {
        std::sort(h.begin(), h.end());
        if (h.empty()) throw InputError("empty hyperedge");
        if (std::adjacent_find(h.begin(), h.end()) != h.end()) throw InputError("hyperedge repeats a vertex");
        if (h.front() < 0 || h.back() >= num_vertices) throw InputError("hyperedge vertex out of range");
    }
    Environment env;
    env.kind_ = EnvKind::HypergraphMatching;
    env.n_ = static_cast<int>(hyperedges.size());
    env.num_vertices_ = num_vertices;
    env.hyperedges_ = std::move(hyperedges);
    env.build_conflicts();
    return env;
}

Environment Environment::general_matching(int num_vertices, std::vector<Edge> edges) {
    std::vector<std::vector<int>> h;
    h.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u == v) throw InputError("matching environments do not allow self-loops");
        h.push_back({u, v});
    }
    Environment env = hypergraph_matching(num_vertices, std::move(h));
    env.kind_ = EnvKind::GeneralMatching;
    return env;
}

Environment Environment::bipartite_matching(int num_vertices, std::vector<Edge> edges, std::vector<int> side) {
    if (static_cast<int>(side.size()) != num_vertices) throw InputError("side labels must cover every vertex");
    for (int s : side)
        if (s != 0 && s != 1) throw InputError("side labels must be 0 or 1");
    for (auto [u, v] : edges)
        if (u >= 0 && v >= 0 && u < num_vertices && v < num_vertices && side[u] == side[v])
            throw InputError("bipartite edge joins two vertices on the same side");
    Environment env = general_matching(num_vertices, std::move(edges));
    env.kind_ = EnvKind::BipartiteMatching;
    env.side_ = std::move(side);
    return env;
}

Environment Environment::k_uniform(int n, int k) {
    check_size(n);
    if (k < 0) throw InputError("k-uniform environment needs k >= 0");
    Environment env;
    env.kind_ = EnvKind::KUniform;
    env.n_ = n;
    env.k_ = k;
    return env;
}

Environment Environment::matroid(std::shared_ptr<const Matroid> m) {
    if (!m) throw InputError("null matroid");
    Environment env;
    env.kind_ = EnvKind::Matroid;
    env.n_ = m->size();
    env.matroid_ = std::move(m);
    return env;
}

std::vector<Edge> Environment::graph_edges() const {
    std::vector<Edge> out;
    for (const auto& h : hyperedges_) {
        if (h.size() != 2) throw InputError("environment is not a graph");
        out.emplace_back(h[0], h[1]);
    }
    return out;
}

void Environment::check_ids(ElementSet s) const {
    if (!s.subset_of(ElementSet::full(n_)))
        throw InputError("element id " + std::to_string(s.max_element()) + " out of range for n=" + std::to_string(n_));
}

bool Environment::is_feasible(ElementSet s) const {
    check_ids(s);
    switch (kind_) {
    case EnvKind::KUniform:
        return s.size() <= k_;
    case EnvKind::Matroid:
        return matroid_->is_independent(s);
    default: {
        bool ok = true;
        s.for_each([&](int e) { ok = ok && !conflicts_[e].intersects(s); });
        return ok;
    }
    }
}

bool Environment::can_add(ElementSet t, int e) const {
    switch (kind_) {
    case EnvKind::KUniform:
        return t.size() < k_;
    case EnvKind::Matroid:
        return matroid_->rank(t.with(e)) == t.size() + 1;
    default:
        return !conflicts_[e].intersects(t);
    }
}

std::vector<ElementSet> enumerate_feasible(const Environment& env, std::size_t cap) {
    std::vector<ElementSet> out;
    std::vector<ElementSet> stack{ElementSet{}};
    const int n = env.size();
    while (!stack.empty()) {
        ElementSet s = stack.back();
        stack.pop_back();
        out.push_back(s);
        if (out.size() > cap)
            throw TooLargeError("too large for enumeration: more than " + std::to_string(cap) + " feasible sets");
        for (int e = s.max_element() + 1; e < n; ++e)
            if (env.can_add(s, e)) stack.push_back(s.with(e));
    }
    std::sort(out.begin(), out.end(), size_lex_less);
    return out;
}

// ---------------------------------------------------------------- activations and membership

ActivationVector::ActivationVector(std::vector<double> x, double scale) : x_(std::move(x)), scale_(scale) {
    for (std::size_t e = 0; e < x_.size(); ++e)
        if (!(x_[e] > 0.0 && x_[e] <= 1.0))
            throw InputError("activation x[" + std::to_string(e) + "] = " + std::to_string(x_[e]) + " not in (0,1]");
    if (!(scale_ >= 0.0)) throw InputError("scale b must be >= 0");
}

std::string to_string(Membership m) {
    switch (m) {
    case Membership::InsideRelint: return "inside-relint";
    case Membership::Boundary: return "boundary";
    case Membership::Outside: return "outside";
    case Membership::Undetermined: return "undetermined";
    }
    return "unknown";
}

namespace {

// Folds constraints lhs <= rhs into a report: first violation wins, otherwise first tight one.
class ConstraintLedger {
public:
    explicit ConstraintLedger(double tol) : tol_(tol) {}

    void add(double lhs, double rhs, const std::function<std::string()>& name) {
        const double excess = lhs - rhs;
        const double scale = std::max(1.0, std::abs(rhs));
        max_excess_ = std::max(max_excess_, excess);
        if (excess > tol_ * scale) {
            if (violated_.empty()) violated_ = name();
        } else if (excess >= -tol_ * scale) {
            if (tight_.empty()) tight_ = name();
        }
    }

    MembershipReport finish(bool complete) const {
        MembershipReport r;
        r.max_excess = max_excess_;
        if (!violated_.empty()) {
            r.status = Membership::Outside;
            r.constraint = violated_;
        } else if (!complete) {
            r.status = Membership::Undetermined;
            r.constraint = tight_;
        } else if (!tight_.empty()) {
            r.status = Membership::Boundary;
            r.constraint = tight_;
        } else {
            r.status = Membership::InsideRelint;
        }
        return r;
    }

private:
    double tol_;
    double max_excess_ = -std::numeric_limits<double>::infinity();
    std::string violated_;
    std::string tight_;
};

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

template <class F>
void for_each_subset(int n, F&& f) {
    const std::uint64_t limit = std::uint64_t{1} << n;
    for (std::uint64_t b = 1; b < limit; ++b) f(ElementSet::from_bits(b));
}

double sum_over(ElementSet t, std::span<const double> x) {
    double s = 0;
    t.for_each([&](int e) { s += x[e]; });
    return s;
}

// Vertex loads; odd-set constraints when the vertex count allows enumeration.
void add_matching_constraints(const Environment& env, std::span<const double> x, ConstraintLedger& ledger,
                              bool& complete) {
    const int nv = env.num_vertices();
    std::vector<double> load(static_cast<std::size_t>(nv), 0.0);
    for (int e = 0; e < env.size(); ++e)
        for (int v : env.hyperedges()[e]) load[v] += x[e];
    for (int v = 0; v < nv; ++v)
        ledger.add(load[v], 1.0, [&] { return "load(vertex " + std::to_string(v) + ") = " + fmt(load[v]) + " <= 1"; });

    switch (env.kind()) {
    case EnvKind::BipartiteMatching:
        complete = true;
        return;
    case EnvKind::HypergraphMatching:
        complete = false;
        return;
    default:
        break;
    }
    if (nv > kMembershipEnumerationLimit) {
        complete = false;
        return;
    }
    complete = true;
    const auto edges = env.graph_edges();
    const std::uint64_t limit = std::uint64_t{1} << nv;
    for (std::uint64_t u = 1; u < limit; ++u) {
        const int size = std::popcount(u);
        if (size < 3 || size % 2 == 0) continue;
        double inside = 0;
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (((u >> edges[e].first) & 1u) && ((u >> edges[e].second) & 1u)) inside += x[e];
        if (inside == 0) continue;
        ledger.add(inside, (size - 1) / 2.0, [&] {
            return "odd set " + to_string(ElementSet::from_bits(u)) + ": x(E[U]) = " + fmt(inside) + " <= " +
                   std::to_string((size - 1) / 2);
        });
    }
}

}  // namespace

MembershipReport check_membership(const Environment& env, std::span<const double> x, double tol) {
    if (static_cast<int>(x.size()) != env.size())
        throw InputError("activation vector has " + std::to_string(x.size()) + " entries, environment has " +
                         std::to_string(env.size()));
    ConstraintLedger ledger(tol);
    for (int e = 0; e < env.size(); ++e) {
        ledger.add(-x[e], 0.0, [&] { return "x[" + std::to_string(e) + "] >= 0"; });
        ledger.add(x[e], 1.0, [&] { return "x[" + std::to_string(e) + "] <= 1"; });
    }
    bool complete = true;
    switch (env.kind()) {
    case EnvKind::GeneralMatching:
    case EnvKind::BipartiteMatching:
    case EnvKind::HypergraphMatching:
        add_matching_constraints(env, x, ledger, complete);
        break;
    case EnvKind::KUniform: {
        double total = sum_over(ElementSet::full(env.size()), x);
        ledger.add(total, env.k(), [&] { return "sum x = " + fmt(total) + " <= k = " + std::to_string(env.k()); });
        break;
    }
    case EnvKind::Matroid: {
        const Matroid& m = env.matroid();
        if (m.variant() == Matroid::Variant::Uniform) {
            double total = sum_over(ElementSet::full(env.size()), x);
            ledger.add(total, m.uniform_k(),
                       [&] { return "x(E) = " + fmt(total) + " <= rank " + std::to_string(m.uniform_k()); });
        } else if (env.size() <= kMembershipEnumerationLimit) {
            for_each_subset(env.size(), [&](ElementSet t) {
                double lhs = sum_over(t, x);
                int r = m.rank(t);
                ledger.add(lhs, r, [&] { return "x(" + to_string(t) + ") = " + fmt(lhs) + " <= rank " + std::to_string(r); });
            });
        } else {
            complete = false;
        }
        break;
    }
    }
    return ledger.finish(complete);
}

double max_feasible_scale(const Environment& env, std::span<const double> x) {
    if (static_cast<int>(x.size()) != env.size()) throw InputError("activation vector size mismatch");
    double c = std::numeric_limits<double>::infinity();
    auto bound = [&](double lhs, double rhs) {
        if (lhs > 0) c = std::min(c, rhs / lhs);
    };
    for (double v : x) bound(v, 1.0);
    switch (env.kind()) {
    case EnvKind::KUniform:
        bound(sum_over(ElementSet::full(env.size()), x), env.k());
        break;
    case EnvKind::Matroid:
        if (env.matroid().variant() == Matroid::Variant::Uniform) {
            bound(sum_over(ElementSet::full(env.size()), x), env.matroid().uniform_k());
        } else {
            if (env.size() > kMembershipEnumerationLimit) throw TooLargeError("matroid too large for exact scaling");
            for_each_subset(env.size(), [&](ElementSet t) { bound(sum_over(t, x), env.matroid().rank(t)); });
        }
        break;
    default: {
        std::vector<double> load(static_cast<std::size_t>(env.num_vertices()), 0.0);
        for (int e = 0; e < env.size(); ++e)
            for (int v : env.hyperedges()[e]) load[v] += x[e];
        for (double l : load) bound(l, 1.0);
        if (env.kind() == EnvKind::GeneralMatching) {
            if (env.num_vertices() > kMembershipEnumerationLimit) throw TooLargeError("graph too large for exact scaling");
            const auto edges = env.graph_edges();
            for (std::uint64_t u = 1; u < (std::uint64_t{1} << env.num_vertices()); ++u) {
                const int size = std::popcount(u);
                if (size < 3 || size % 2 == 0) continue;
                double inside = 0;
                for (std::size_t e = 0; e < edges.size(); ++e)
                    if (((u >> edges[e].first) & 1u) && ((u >> edges[e].second) & 1u)) inside += x[e];
                bound(inside, (size - 1) / 2.0);
            }
        }
        break;
    }
    }
    return c;
}

}  // namespace socrs
