#include "socrs/counting.hpp"

#include "socrs/errors.hpp"
#include "socrs/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_map>

namespace socrs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void check_weights(const CountingOracle& oracle, std::size_t size) {
    if (static_cast<int>(size) != oracle.size())
        throw InputError("weight vector has " + std::to_string(size) + " entries, oracle expects " +
                         std::to_string(oracle.size()));
}

// Largest finite log weight, or 0 when none.
double log_shift(std::span<const double> log_w) {
    double c = kNegInf;
    for (double v : log_w)
        if (v != kNegInf) c = std::max(c, v);
    return c == kNegInf ? 0.0 : c;
}

Rational factorial(int d) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(d));
    return Rational(f);
}

}  // namespace

std::vector<double> log_weights(std::span<const double> w) {
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] < 0 || std::isnan(w[i])) throw InputError("weights must be nonnegative");
        out[i] = w[i] == 0 ? kNegInf : std::log(w[i]);
    }
    return out;
}

std::vector<std::vector<double>> inclusion_covariance(const CountingOracle& oracle, std::span<const double> log_w) {
    check_weights(oracle, log_w.size());
    const std::size_t n = log_w.size();
    const std::vector<double> m = oracle.marginals(log_w);
    std::vector<std::vector<double>> cov(n, std::vector<double>(n, 0.0));
    std::vector<double> pinned(log_w.begin(), log_w.end());
    for (std::size_t f = 0; f < n; ++f) {
        pinned[f] = kNegInf;
        // f in every set: no variance, no covariance.
        if (oracle.log_partition(pinned) != kNegInf) {
            const std::vector<double> m0 = oracle.marginals(pinned);
            for (std::size_t e = 0; e < n; ++e) cov[e][f] = (1.0 - m[f]) * (m[e] - m0[e]);
        }
        cov[f][f] = m[f] * (1.0 - m[f]);
        pinned[f] = log_w[f];
    }
    for (std::size_t e = 0; e < n; ++e)
        for (std::size_t f = e + 1; f < n; ++f) cov[e][f] = cov[f][e] = 0.5 * (cov[e][f] + cov[f][e]);
    return cov;
}

// ---------------------------------------------------------------- determinants

Rational bareiss_determinant(std::vector<std::vector<Rational>> a) {
    const std::size_t n = a.size();
    if (n == 0) return 1;
    Rational previous = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (sgn(a[k][k]) == 0) {
            std::size_t p = k + 1;
            while (p < n && sgn(a[p][k]) == 0) ++p;
            if (p == n) return 0;
            std::swap(a[p], a[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / previous;
        previous = a[k][k];
    }
    Rational det = a[n - 1][n - 1];
    return sign < 0 ? Rational(-det) : det;
}

double log_abs_determinant(std::vector<std::vector<double>> a, int* sign) {
    const Eigen::Index n = static_cast<Eigen::Index>(a.size());
    if (sign) *sign = 1;
    if (n == 0) return 0.0;
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a[i][j];
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const Eigen::MatrixXd& u = lu.matrixLU();
    double log_det = 0;
    int s = lu.permutationP().determinant() > 0 ? 1 : -1;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (u(i, i) == 0) {
            if (sign) *sign = 0;
            return kNegInf;
        }
        if (u(i, i) < 0) s = -s;
        log_det += std::log(std::abs(u(i, i)));
    }
    if (sign) *sign = s;
    return log_det;
}

// ---------------------------------------------------------------- base class

std::vector<double> CountingOracle::marginals(std::span<const double> log_w) const {
    check_weights(*this, log_w.size());
    const double log_z = log_partition(log_w);
    if (log_z == kNegInf) throw NumericalError("marginals requested at a zero partition function");
    std::vector<double> out(log_w.size());
    std::vector<double> pinned(log_w.begin(), log_w.end());
    for (std::size_t e = 0; e < log_w.size(); ++e) {
        pinned[e] = kNegInf;
        out[e] = -std::expm1(log_partition(pinned) - log_z);
        pinned[e] = log_w[e];
    }
    return out;
}

// ---------------------------------------------------------------- enumeration

EnumerationOracle::EnumerationOracle(int n, std::vector<ElementSet> sets) : n_(n), sets_(std::move(sets)) {
    const ElementSet ground = ElementSet::full(n);
    for (auto s : sets_)
        if (!s.subset_of(ground)) throw InputError("enumerated set mentions an element out of range");
}

EnumerationOracle::EnumerationOracle(int n, std::vector<ElementSet> sets, std::vector<Rational> masses)
    : EnumerationOracle(n, std::move(sets)) {
    if (masses.size() != sets_.size()) throw InputError("mass table size mismatch");
    log_mass_.reserve(masses.size());
    for (const auto& m : masses) {
        if (sgn(m) < 0) throw InputError("negative mass");
        log_mass_.push_back(sgn(m) == 0 ? kNegInf : std::log(m.get_d()));
    }
    mass_ = std::move(masses);
}

std::shared_ptr<EnumerationOracle> EnumerationOracle::for_environment(const Environment& env, std::size_t cap) {
    return std::make_shared<EnumerationOracle>(env.size(), enumerate_feasible(env, cap));
}

double EnumerationOracle::log_partition(std::span<const double> log_w) const {
    check_weights(*this, log_w.size());
    return kernels::enum_log_partition_parallel(sets_, log_mass_, log_w);
}

std::vector<double> EnumerationOracle::marginals(std::span<const double> log_w) const {
    check_weights(*this, log_w.size());
    auto result = kernels::enum_marginals_parallel(n_, sets_, log_mass_, log_w);
    if (result.log_z == kNegInf) throw NumericalError("marginals requested at a zero partition function");
    return result.marginals;
}

Rational EnumerationOracle::partition_exact(std::span<const Rational> w) const {
    check_weights(*this, w.size());
    Rational z = 0;
    for (std::size_t i = 0; i < sets_.size(); ++i) {
        Rational term = mass_.empty() ? Rational(1) : mass_[i];
        sets_[i].for_each([&](int e) { term *= w[e]; });
        z += term;
    }
    return z;
}

// ---------------------------------------------------------------- matching recursion

namespace {

template <class Value, class Combine, class Leaf>
class MatchingRecursion {
public:
    MatchingRecursion(const std::vector<ElementSet>& conflicts, std::size_t cap, Combine combine, Leaf leaf)
        : conflicts_(conflicts), cap_(cap), combine_(combine), leaf_(leaf) {}

    Value operator()(ElementSet remaining) {
        if (remaining.empty()) return leaf_();
        if (auto it = memo_.find(remaining.bits()); it != memo_.end()) return it->second;
        const int e = std::countr_zero(remaining.bits());
        Value without = (*this)(remaining.without(e));
        Value result = combine_(without, e, [&] { return (*this)(remaining - conflicts_[e]); });
        if (memo_.size() < cap_) memo_.emplace(remaining.bits(), result);
        return result;
    }

private:
    const std::vector<ElementSet>& conflicts_;
    std::size_t cap_;
    Combine combine_;
    Leaf leaf_;
    std::unordered_map<std::uint64_t, Value> memo_;
};

}  // namespace

MatchingOracle::MatchingOracle(const Environment& env, std::size_t cache_cap) : cache_cap_(cache_cap) {
    if (!env.is_matching()) throw InputError("matching recursion needs a matching environment");
    for (int e = 0; e < env.size(); ++e) conflicts_.push_back(env.conflicts(e).with(e));
}

double MatchingOracle::log_partition(std::span<const double> log_w) const {
    check_weights(*this, log_w.size());
    auto combine = [&](double without, int e, auto with_rest) {
        if (log_w[e] == kNegInf) return without;
        return log_add(without, log_w[e] + with_rest());
    };
    MatchingRecursion<double, decltype(combine), double (*)()> rec(conflicts_, cache_cap_, combine,
                                                                   +[] { return 0.0; });
    return rec(ElementSet::full(size()));
}

std::vector<double> MatchingOracle::marginals(std::span<const double> log_w) const {
    check_weights(*this, log_w.size());
    auto combine = [&](double without, int e, auto with_rest) {
        if (log_w[e] == kNegInf) return without;
        return log_add(without, log_w[e] + with_rest());
    };
    MatchingRecursion<double, decltype(combine), double (*)()> rec(conflicts_, cache_cap_, combine,
                                                                   +[] { return 0.0; });
    const ElementSet all = ElementSet::full(size());
    const double log_z = rec(all);
    if (log_z == kNegInf) throw NumericalError("marginals requested at a zero partition function");
    std::vector<double> out(static_cast<std::size_t>(size()));
    for (int e = 0; e < size(); ++e)
        out[e] = log_w[e] == kNegInf ? 0.0 : std::exp(log_w[e] + rec(all - conflicts_[e]) - log_z);
    return out;
}

Rational MatchingOracle::partition_exact(std::span<const Rational> w) const {
    check_weights(*this, w.size());
    auto combine = [&](const Rational& without, int e, auto with_rest) -> Rational {
        if (sgn(w[e]) == 0) return without;
        return without + w[e] * with_rest();
    };
    MatchingRecursion<Rational, decltype(combine), Rational (*)()> rec(conflicts_, cache_cap_, combine,
                                                                       +[] { return Rational(1); });
    return rec(ElementSet::full(size()));
}

// ---------------------------------------------------------------- k-uniform

KUniformOracle::KUniformOracle(int n, int k) : n_(n), k_(k) {
    if (n < 0 || n > kMaxElements || k < 0) throw InputError("bad k-uniform oracle parameters");
}

namespace {

// log sum_{j <= k} e_j(w) over coordinates != skip, with weights exp(log_w - shift) in [0, 1].
double truncated_esp_log(std::span<const double> log_w, int k, int skip) {
    if (k < 0) return kNegInf;
    const double c = log_shift(log_w);
    std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t i = 0; i < log_w.size(); ++i) {
        if (static_cast<int>(i) == skip || log_w[i] == kNegInf) continue;
        const double v = std::exp(log_w[i] - c);
        for (int j = k; j >= 1; --j) e[j] += v * e[j - 1];
    }
    double out = kNegInf;
    for (int j = 0; j <= k; ++j)
        if (e[j] > 0) out = log_add(out, std::log(e[j]) + j * c);
    return out;
}

}  // namespace

double KUniformOracle::log_partition(std::span<const double> log_w) const {
    check_weights(*this, log_w.size());
    return truncated_esp_log(log_w, k_, -1);
}

std::vector<double> KUniformOracle::marginals(std::span<const double> log_w) const {
    check_weights(*this, log_w.size());
    const double log_z = log_partition(log_w);
    std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
    for (int e = 0; e < n_; ++e)
        if (log_w[e] != kNegInf) out[e] = std::exp(log_w[e] + truncated_esp_log(log_w, k_ - 1, e) - log_z);
    return out;
}

Rational KUniformOracle::partition_exact(std::span<const Rational> w) const {
    check_weights(*this, w.size());
    std::vector<Rational> e(static_cast<std::size_t>(k_) + 1, Rational(0));
    e[0] = 1;
    for (const auto& v : w)
        for (int j = k_; j >= 1; --j) e[j] += v * e[j - 1];
    return std::accumulate(e.begin(), e.end(), Rational(0));
}

// ---------------------------------------------------------------- matrix-tree

SpanningTreeOracle::SpanningTreeOracle(int num_vertices, std::vector<Edge> edges)
    : num_vertices_(num_vertices), edges_(std::move(edges)) {
    if (static_cast<int>(edges_.size()) > kMaxElements) throw InputError("too many edges");
    std::vector<int> parent(static_cast<std::size_t>(num_vertices));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (auto [u, v] : edges_) {
        if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices) throw InputError("edge endpoint out of range");
        parent[find(u)] = find(v);
    }
    component_.assign(static_cast<std::size_t>(num_vertices), -1);
    local_index_.assign(static_cast<std::size_t>(num_vertices), -1);
    std::vector<int> root_component(static_cast<std::size_t>(num_vertices), -1);
    for (int v = 0; v < num_vertices; ++v) {
        const int r = find(v);
        if (root_component[r] < 0) {
            root_component[r] = static_cast<int>(component_dim_.size());
            component_dim_.push_back(0);
            component_[v] = root_component[r];  // first vertex is the dropped root
            continue;
        }
        component_[v] = root_component[r];
        local_index_[v] = component_dim_[component_[v]]++;
    }
    rank_ = std::accumulate(component_dim_.begin(), component_dim_.end(), 0);
}

bool SpanningTreeOracle::spans(std::span<const double> log_w) const {
    std::vector<int> parent(static_cast<std::size_t>(num_vertices_));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    int merged = 0;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (log_w[e] == kNegInf) continue;
        const int a = find(edges_[e].first), b = find(edges_[e].second);
        if (a != b) {
            parent[a] = b;
            ++merged;
        }
    }
    return merged == rank_;
}

double SpanningTreeOracle::log_partition(std::span<const double> log_w) const {
    check_weights(*this, log_w.size());
    // The Laplacian of a disconnected weighting is singular, but rounding would leave a finite determinant.
    if (!spans(log_w)) return kNegInf;
    const double c = log_shift(log_w);
    std::vector<std::vector<std::vector<double>>> blocks;
    for (int d : component_dim_)
        blocks.emplace_back(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d), 0.0));
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        auto [u, v] = edges_[e];
        if (u == v || log_w[e] == kNegInf) continue;
        const double we = std::exp(log_w[e] - c);
        auto& b = blocks[component_[u]];
        const int iu = local_index_[u], iv = local_index_[v];
        if (iu >= 0) b[iu][iu] += we;
        if (iv >= 0) b[iv][iv] += we;
        if (iu >= 0 && iv >= 0) b[iu][iv] -= we, b[iv][iu] -= we;
    }
    double total = rank_ * c;
    for (auto& b : blocks) total += log_abs_determinant(std::move(b));
    return total;
}

std::vector<double> SpanningTreeOracle::marginals(std::span<const double> log_w) const {
    check_weights(*this, log_w.size());
    if (!spans(log_w)) throw NumericalError("marginals requested at a zero partition function");
    const double c = log_shift(log_w);
    std::vector<Eigen::MatrixXd> blocks;
    for (int d : component_dim_) blocks.emplace_back(Eigen::MatrixXd::Zero(d, d));
    std::vector<double> scaled(edges_.size(), 0.0);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        auto [u, v] = edges_[e];
        if (u == v || log_w[e] == kNegInf) continue;
        scaled[e] = std::exp(log_w[e] - c);
        auto& b = blocks[component_[u]];
        const int iu = local_index_[u], iv = local_index_[v];
        if (iu >= 0) b(iu, iu) += scaled[e];
        if (iv >= 0) b(iv, iv) += scaled[e];
        if (iu >= 0 && iv >= 0) b(iu, iv) -= scaled[e], b(iv, iu) -= scaled[e];
    }
    std::vector<Eigen::MatrixXd> inverses;
    for (auto& b : blocks) {
        if (b.rows() == 0) {
            inverses.emplace_back(b);
            continue;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
        if (!lu.isInvertible()) throw NumericalError("marginals requested at a zero partition function");
        inverses.emplace_back(lu.inverse());
    }
    std::vector<double> out(edges_.size(), 0.0);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        auto [u, v] = edges_[e];
        if (u == v || scaled[e] == 0) continue;
        const auto& inv = inverses[component_[u]];
        const int iu = local_index_[u], iv = local_index_[v];
        double r = 0;
        if (iu >= 0) r += inv(iu, iu);
        if (iv >= 0) r += inv(iv, iv);
        if (iu >= 0 && iv >= 0) r -= 2 * inv(iu, iv);
        out[e] = scaled[e] * r;
    }
    return out;
}

Rational SpanningTreeOracle::partition_exact(std::span<const Rational> w) const {
    check_weights(*this, w.size());
    std::vector<std::vector<std::vector<Rational>>> blocks;
    for (int d : component_dim_)
        blocks.emplace_back(static_cast<std::size_t>(d), std::vector<Rational>(static_cast<std::size_t>(d), Rational(0)));
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        auto [u, v] = edges_[e];
        if (u == v) continue;
        auto& b = blocks[component_[u]];
        const int iu = local_index_[u], iv = local_index_[v];
        if (iu >= 0) b[iu][iu] += w[e];
        if (iv >= 0) b[iv][iv] += w[e];
        if (iu >= 0 && iv >= 0) b[iu][iv] -= w[e], b[iv][iu] -= w[e];
    }
    Rational total = 1;
    for (auto& b : blocks) total *= bareiss_determinant(std::move(b));
    return total;
}

// ---------------------------------------------------------------- Cauchy-Binet

namespace {

Eigen::MatrixXd to_eigen(const RealMatrix& a) {
    const Eigen::Index r = static_cast<Eigen::Index>(a.size());
    const Eigen::Index n = r ? static_cast<Eigen::Index>(a.front().size()) : 0;
    Eigen::MatrixXd m(r, n);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a[i][j];
    return m;
}

std::vector<std::vector<Rational>> weighted_gram(const RealMatrix& a, std::span<const Rational> w) {
    const std::size_t r = a.size();
    const std::size_t n = r ? a.front().size() : 0;
    std::vector<std::vector<Rational>> g(r, std::vector<Rational>(r, Rational(0)));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i; j < r; ++j) {
            Rational s = 0;
            for (std::size_t e = 0; e < n; ++e)
                if (a[i][e] != 0 && a[j][e] != 0) s += Rational(a[i][e]) * Rational(a[j][e]) * w[e];
            g[i][j] = s;
            g[j][i] = s;
        }
    return g;
}

}  // namespace

CauchyBinetOracle::CauchyBinetOracle(RealMatrix a) : a_(std::move(a)) {
    r_ = static_cast<int>(a_.size());
    n_ = r_ ? static_cast<int>(a_.front().size()) : 0;
    for (const auto& row : a_)
        if (static_cast<int>(row.size()) != n_) throw InputError("Cauchy-Binet matrix is ragged");
    if (n_ > kMaxElements) throw InputError("too many columns");
    std::vector<Rational> ones(static_cast<std::size_t>(n_), Rational(1));
    gram_det_ = bareiss_determinant(weighted_gram(a_, ones));
    if (sgn(gram_det_) == 0) throw NumericalError("singular A A^T: representation matrix is rank-deficient");
    log_gram_det_ = std::log(gram_det_.get_d());
}

double CauchyBinetOracle::log_partition(std::span<const double> log_w) const {
    check_weights(*this, log_w.size());
    const double c = log_shift(log_w);
    Eigen::MatrixXd a = to_eigen(a_);
    Eigen::VectorXd v(n_);
    for (int e = 0; e < n_; ++e) v(e) = log_w[e] == kNegInf ? 0.0 : std::exp(log_w[e] - c);
    Eigen::MatrixXd m = a * v.asDiagonal() * a.transpose();
    std::vector<std::vector<double>> g(static_cast<std::size_t>(r_), std::vector<double>(static_cast<std::size_t>(r_)));
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < r_; ++j) g[i][j] = m(i, j);
    return log_abs_determinant(std::move(g)) + r_ * c - log_gram_det_;
}

std::vector<double> CauchyBinetOracle::marginals(std::span<const double> log_w) const {
    check_weights(*this, log_w.size());
    const double c = log_shift(log_w);
    Eigen::MatrixXd a = to_eigen(a_);
    Eigen::VectorXd v(n_);
    for (int e = 0; e < n_; ++e) v(e) = log_w[e] == kNegInf ? 0.0 : std::exp(log_w[e] - c);
    Eigen::MatrixXd m = a * v.asDiagonal() * a.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) throw NumericalError("marginals requested at a zero partition function");
    Eigen::MatrixXd solved = lu.solve(a);
    std::vector<double> out(static_cast<std::size_t>(n_));
    for (int e = 0; e < n_; ++e) out[e] = v(e) * a.col(e).dot(solved.col(e));
    return out;
}

Rational CauchyBinetOracle::partition_exact(std::span<const Rational> w) const {
    check_weights(*this, w.size());
    return bareiss_determinant(weighted_gram(a_, w)) / gram_det_;
}

// ---------------------------------------------------------------- base measures

BaseMeasure BaseMeasure::uniform_on_bases(std::shared_ptr<const Matroid> m, std::size_t cap) {
    BaseMeasure b;
    b.kind_ = Kind::UniformOnBases;
    b.matroid_ = std::move(m);
    b.table_bases_ = b.bases(cap);
    b.table_masses_.assign(b.table_bases_.size(), Rational(1));
    b.oracle_ = std::make_shared<EnumerationOracle>(b.matroid_->size(), b.table_bases_, b.table_masses_);
    return b;
}

BaseMeasure BaseMeasure::uniform_spanning_tree(std::shared_ptr<const Matroid> graphic) {
    if (!graphic || graphic->variant() != Matroid::Variant::Graphic)
        throw InputError("uniform spanning tree measure needs a graphic matroid");
    BaseMeasure b;
    b.kind_ = Kind::UniformSpanningTree;
    b.matroid_ = std::move(graphic);
    b.oracle_ = std::make_shared<SpanningTreeOracle>(b.matroid_->num_vertices(), b.matroid_->edges());
    return b;
}

BaseMeasure BaseMeasure::determinantal(RealMatrix a) {
    BaseMeasure b;
    b.kind_ = Kind::Determinantal;
    auto oracle = std::make_shared<CauchyBinetOracle>(a);
    b.matroid_ = std::make_shared<Matroid>(Matroid::linear(std::move(a)));
    if (b.matroid_->rank() != static_cast<int>(oracle->matrix().size()))
        throw NumericalError("determinantal base measure needs a full-row-rank matrix");
    b.oracle_ = std::move(oracle);
    return b;
}

BaseMeasure BaseMeasure::table(std::shared_ptr<const Matroid> m, std::vector<ElementSet> bases,
                               std::vector<Rational> masses) {
    if (bases.size() != masses.size()) throw InputError("base table size mismatch");
    for (std::size_t i = 0; i < bases.size(); ++i) {
        if (bases[i].size() != m->rank() || !m->is_independent(bases[i]))
            throw InputError("table entry " + to_string(bases[i]) + " is not a base");
        if (sgn(masses[i]) <= 0) throw InputError("base masses must be positive (full support)");
    }
    BaseMeasure b;
    b.kind_ = Kind::Table;
    b.matroid_ = std::move(m);
    b.table_bases_ = std::move(bases);
    b.table_masses_ = std::move(masses);
    b.oracle_ = std::make_shared<EnumerationOracle>(b.matroid_->size(), b.table_bases_, b.table_masses_);
    return b;
}

std::vector<ElementSet> BaseMeasure::bases(std::size_t cap) const {
    if (!table_bases_.empty()) return table_bases_;
    std::vector<ElementSet> out;
    for (auto s : enumerate_feasible(Environment::matroid(matroid_), cap))
        if (s.size() == matroid_->rank()) out.push_back(s);
    return out;
}

Rational BaseMeasure::mass(ElementSet b) const {
    if (!table_bases_.empty()) {
        auto it = std::find(table_bases_.begin(), table_bases_.end(), b);
        return it == table_bases_.end() ? Rational(0) : table_masses_[static_cast<std::size_t>(it - table_bases_.begin())];
    }
    if (b.size() != matroid_->rank() || !matroid_->is_independent(b)) return 0;
    if (kind_ == Kind::UniformSpanningTree) return 1;
    // Determinantal: the coefficient of w^B in the Cauchy-Binet oracle.
    std::vector<Rational> w(static_cast<std::size_t>(matroid_->size()), Rational(0));
    b.for_each([&](int e) { w[e] = 1; });
    return oracle_->partition_exact(w);
}

std::shared_ptr<EnumerationOracle> BaseMeasure::tabulate(std::size_t cap) const {
    if (auto table = std::dynamic_pointer_cast<const EnumerationOracle>(oracle_))
        return std::make_shared<EnumerationOracle>(*table);
    std::vector<ElementSet> bs = bases(cap);
    std::vector<Rational> masses;
    masses.reserve(bs.size());
    for (auto b : bs) masses.push_back(mass(b));
    return std::make_shared<EnumerationOracle>(matroid_->size(), std::move(bs), std::move(masses));
}

double BaseMeasure::log_mass_bound(std::size_t cap) const {
    auto table = tabulate(cap);
    std::vector<double> zero(static_cast<std::size_t>(matroid_->size()), 0.0);
    const double log_z = table->log_partition(zero);
    double bound = 0;
    for (double lm : table->log_masses()) bound = std::max(bound, std::abs(lm - log_z));
    if (table->log_masses().empty()) bound = std::abs(log_z - std::log(static_cast<double>(table->sets().size())));
    return bound;
}

// ---------------------------------------------------------------- interpolation

namespace {

// (-1)^{d-a} C(d,a) (-1)^{b-1} C(m+1,b)
Rational interp_coefficient(int d, int a, int m, int b) {
    Rational c = binomial(d, a) * binomial(m + 1, b);
    if (((d - a) + (b - 1)) % 2) c = -c;
    return c;
}

}  // namespace

Rational constrained_count(const CountingOracle& oracle, std::span<const Rational> w, ElementSet include,
                           ElementSet exclude, std::ostream* trace) {
    check_weights(oracle, w.size());
    if (include.intersects(exclude)) throw InputError("include and exclude sets overlap");
    if (!(include | exclude).subset_of(ElementSet::full(oracle.size())))
        throw InputError("constrained set mentions an element out of range");
    const int d = include.size();
    const int m = exclude.size();
    std::vector<Rational> point(w.begin(), w.end());
    Rational total = 0;
    for (int a = 0; a <= d; ++a)
        for (int b = 1; b <= m + 1; ++b) {
            include.for_each([&](int e) { point[e] = w[e] * (1 + a); });
            exclude.for_each([&](int e) { point[e] = w[e] * b; });
            Rational value = oracle.partition_exact(point);
            if (trace) *trace << a << ',' << b << ',' << to_string(value) << '\n';
            total += interp_coefficient(d, a, m, b) * value;
        }
    return total / factorial(d);
}

double constrained_count(const CountingOracle& oracle, std::span<const double> w, ElementSet include,
                         ElementSet exclude) {
    check_weights(oracle, w.size());
    if (include.intersects(exclude)) throw InputError("include and exclude sets overlap");
    const int d = include.size();
    const int m = exclude.size();
    if (d + m > 8)
        throw InputError("double-mode interpolation with more than 8 pinned elements is ill-conditioned; use exact mode");
    const std::vector<double> base = log_weights(w);
    const double log_z = oracle.log_partition(base);
    if (log_z == kNegInf) return 0.0;
    std::vector<double> point = base;
    double total = 0;
    for (int a = 0; a <= d; ++a)
        for (int b = 1; b <= m + 1; ++b) {
            include.for_each([&](int e) { point[e] = base[e] + std::log(1.0 + a); });
            exclude.for_each([&](int e) { point[e] = base[e] + std::log(static_cast<double>(b)); });
            total += interp_coefficient(d, a, m, b).get_d() * std::exp(oracle.log_partition(point) - log_z);
        }
    const double out = total / factorial(d).get_d() * std::exp(log_z);
    if (!std::isfinite(out)) throw NumericalError("double-mode constrained count overflowed; use exact mode");
    return std::max(0.0, out);
}

Rational marginal_sum(const CountingOracle& oracle, std::span<const Rational> w, int e) {
    return constrained_count(oracle, w, ElementSet::single(e), ElementSet{});
}

double marginal_sum(const CountingOracle& oracle, std::span<const double> w, int e) {
    const std::vector<double> lw = log_weights(w);
    const double log_z = oracle.log_partition(lw);
    if (log_z == kNegInf) return 0.0;
    return oracle.marginals(lw)[e] * std::exp(log_z);
}

Rational thinned_mass(const CountingOracle& oracle, std::span<const Rational> w, std::span<const Rational> tau,
                      ElementSet t, std::ostream* trace) {
    check_weights(oracle, w.size());
    check_weights(oracle, tau.size());
    const Rational z = oracle.partition_exact(w);
    if (sgn(z) == 0) throw NumericalError("thinned mass at a zero partition function");
    const int d = t.size();
    std::vector<Rational> point(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) point[i] = w[i] * (1 - tau[i]);
    Rational coefficient = 0;
    for (int a = 0; a <= d; ++a) {
        t.for_each([&](int e) { point[e] = w[e] * (1 + a); });
        Rational value = oracle.partition_exact(point);
        if (trace) *trace << a << ",1," << to_string(value) << '\n';
        coefficient += (((d - a) % 2) ? Rational(-binomial(d, a)) : binomial(d, a)) * value;
    }
    Rational out = coefficient / factorial(d) / z;
    t.for_each([&](int e) { out *= tau[e]; });
    return out;
}

double thinned_mass(const CountingOracle& oracle, std::span<const double> w, std::span<const double> tau,
                    ElementSet t) {
    check_weights(oracle, w.size());
    check_weights(oracle, tau.size());
    const int d = t.size();
    if (d > 8) throw InputError("double-mode coefficient extraction beyond degree 8 is ill-conditioned; use exact mode");
    const std::vector<double> base = log_weights(w);
    const double log_z = oracle.log_partition(base);
    if (log_z == kNegInf) throw NumericalError("thinned mass at a zero partition function");
    std::vector<double> point(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) point[i] = std::log(std::max(w[i] * (1 - tau[i]), 1e-300));
    double coefficient = 0;
    for (int a = 0; a <= d; ++a) {
        t.for_each([&](int e) { point[e] = base[e] + std::log(1.0 + a); });
        const double sign = ((d - a) % 2) ? -1.0 : 1.0;
        coefficient += sign * binomial(d, a).get_d() * std::exp(oracle.log_partition(point) - log_z);
    }
    double out = coefficient / factorial(d).get_d();
    t.for_each([&](int e) { out *= tau[e]; });
    return std::max(0.0, out);
}

OraclePtr oracle_for(const Environment& env) {
    if (env.is_matching()) return std::make_shared<MatchingOracle>(env);
    if (env.kind() == EnvKind::KUniform) return std::make_shared<KUniformOracle>(env.size(), env.k());
    return EnumerationOracle::for_environment(env);
}

}  // namespace socrs
