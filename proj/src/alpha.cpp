#include "socrs/alpha.hpp"

#include "socrs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace socrs {

namespace {

void check_k(int k) {
    if (k < 1) throw InputError("k must be at least 1");
}

double log_sum_exp(std::span<const double> v) {
    const double top = *std::max_element(v.begin(), v.end());
    if (top == -INFINITY) return top;
    double s = 0;
    for (double t : v) s += std::exp(t - top);
    return top + std::log(s);
}

template <class T>
std::vector<T> pb_head(std::span<const T> p, int k) {
    check_k(k);
    std::vector<T> head(static_cast<std::size_t>(k) + 1, T(0));
    head[0] = 1;
    for (const T& pe : p) {
        for (int t = k; t >= 1; --t) head[t] = head[t] * (1 - pe) + head[t - 1] * pe;
        head[0] *= (1 - pe);
    }
    return head;
}

}  // namespace

double truncated_poisson_ratio(int k, double mean) {
    check_k(k);
    if (!(mean > 0)) throw InputError("Poisson mean must be positive");
    // log r_j = log(P[Q = j] / P[Q = k]), r_k = 1.
    std::vector<double> log_r(static_cast<std::size_t>(k) + 1);
    log_r[k] = 0;
    for (int j = k; j >= 1; --j) log_r[j - 1] = log_r[j] + std::log(static_cast<double>(j)) - std::log(mean);
    const double below = log_sum_exp(std::span<const double>(log_r).first(k));
    const double all = log_sum_exp(log_r);
    return std::exp(below - all);
}

Rational truncated_poisson_ratio(int k, const Rational& mean) {
    check_k(k);
    if (sgn(mean) <= 0) throw InputError("Poisson mean must be positive");
    Rational r = 1, below = 0;
    for (int j = k; j >= 1; --j) {
        r = r * j / mean;
        below += r;
    }
    return below / (below + 1);
}

double truncated_poisson_mean(int k, double mean) { return mean * truncated_poisson_ratio(k, mean); }

std::vector<double> poisson_binomial_head(std::span<const double> p, int k) { return pb_head(p, k); }
std::vector<Rational> poisson_binomial_head(std::span<const Rational> p, int k) { return pb_head(p, k); }

double truncated_pb_ratio(std::span<const double> p, int k) {
    const auto head = pb_head(p, k);
    const double all = std::accumulate(head.begin(), head.end(), 0.0);
    return (all - head[k]) / all;
}

double truncated_pb_mean(std::span<const double> p, int k) {
    const auto head = pb_head(p, k);
    double all = 0, first = 0;
    for (int t = 0; t <= k; ++t) {
        all += head[t];
        first += t * head[t];
    }
    return first / all;
}

double uniform_alpha(int k, double b) { return truncated_poisson_ratio(k, b * k); }

double bipartite_alpha(double b) {
    if (!(b > 0)) throw InputError("scale must be positive");
    return (2 * b + 1 - std::sqrt(4 * b + 1)) / (2 * b * b);
}

double hypergraph_alpha(int max_edge_size, double b) {
    if (max_edge_size < 1) throw InputError("edge size must be at least 1");
    if (!(b > 0)) throw InputError("scale must be positive");
    return 1.0 / (1.0 + b * max_edge_size);
}

double rayleigh_alpha(double b) {
    if (!(b > 0)) throw InputError("scale must be positive");
    return 1.0 / (1.0 + b);
}

double bipartite_instance_bound(double eps) {
    if (!(eps > 0 && eps < 1)) throw InputError("eps must lie in (0, 1)");
    // (1 - eps) a^2 - (3 - 2 eps) a + 1 = 0, smaller root.
    const double a2 = 1 - eps, a1 = 3 - 2 * eps;
    const double disc = a1 * a1 - 4 * a2;
    // Rationalized form avoids cancellation in a1 - sqrt(disc).
    return 2.0 / (a1 + std::sqrt(disc));
}

double k4_alpha_limit() { return (std::sqrt(3.0) - 1.0) / 2.0; }

GreedyDiscard greedy_discard(int k) {
    check_k(k);
    const long nearest = std::lround(std::sqrt(k / 2.0));
    return {Rational(1) - fraction(nearest, k), 1.0 - std::sqrt(2.0 / (k + 1))};
}

std::vector<Rational> greedy_selectability(std::span<const Rational> x, int k, const Rational& gamma) {
    std::vector<Rational> rho;
    for (const auto& v : x) rho.push_back(gamma * v);
    const auto head = pb_head(std::span<const Rational>(rho), k);
    const Rational feasible = std::accumulate(head.begin(), head.end(), Rational(0));
    std::vector<Rational> out;
    std::vector<Rational> rest;
    for (std::size_t e = 0; e < x.size(); ++e) {
        rest.clear();
        for (std::size_t f = 0; f < x.size(); ++f)
            if (f != e) rest.push_back(rho[f]);
        const auto h = pb_head(std::span<const Rational>(rest), k);
        const Rational addable = std::accumulate(h.begin(), h.end() - 1, Rational(0));
        out.push_back(gamma * addable / feasible);
    }
    return out;
}

bool meets_greedy_bound(const Rational& s, int k) {
    // s >= 1 - sqrt(2/(k+1))  <=>  1 - s <= 0  or  (1 - s)^2 <= 2/(k+1).
    const Rational gap = 1 - s;
    if (sgn(gap) <= 0) return true;
    return gap * gap <= fraction(2, k + 1);
}

std::vector<AlphaRow> alpha_table(const std::string& kind, int k, double b, int max_edge_size) {
    std::vector<AlphaRow> rows;
    const bool all = kind == "all";
    const std::string scale = "b=" + std::to_string(b);
    if (all || kind == "uniform")
        rows.push_back({"uniform", "k=" + std::to_string(k) + "," + scale, uniform_alpha(k, b)});
    if (all || kind == "bipartite") rows.push_back({"bipartite", scale, bipartite_alpha(b)});
    if (all || kind == "hypergraph")
        rows.push_back({"hypergraph", "L=" + std::to_string(max_edge_size) + "," + scale, hypergraph_alpha(max_edge_size, b)});
    if (all || kind == "matching") rows.push_back({"matching", "b=1", kGeneralMatchingAlpha});
    if (all || kind == "rayleigh") rows.push_back({"rayleigh", scale, rayleigh_alpha(b)});
    if (all || kind == "greedy") rows.push_back({"greedy", "k=" + std::to_string(k), greedy_discard(k).bound});
    if (rows.empty()) throw InputError("unknown alpha kind '" + kind + "'");
    return rows;
}

}  // namespace socrs
