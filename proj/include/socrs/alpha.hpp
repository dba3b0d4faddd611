#pragma once

#include "socrs/rational.hpp"

#include <span>
#include <string>
#include <vector>

namespace socrs {

// P[Q < k | Q <= k] for Q ~ Poisson(mean), summed as ratios P[Q = j] / P[Q = k] in log space.
double truncated_poisson_ratio(int k, double mean);
// Exact for rational means: every ratio P[Q = j] / P[Q = k] = k! / (j! mean^(k - j)) is rational.
Rational truncated_poisson_ratio(int k, const Rational& mean);
// E[Q | Q <= k] = mean P[Q < k | Q <= k].
double truncated_poisson_mean(int k, double mean);

// Law of a sum of independent Bernoullis, truncated to {0, ..., k}.
std::vector<double> poisson_binomial_head(std::span<const double> p, int k);
std::vector<Rational> poisson_binomial_head(std::span<const Rational> p, int k);
double truncated_pb_ratio(std::span<const double> p, int k);
double truncated_pb_mean(std::span<const double> p, int k);

// Uniform matroid constant with activations scaled by b: Q ~ Poisson(b k).
double uniform_alpha(int k, double b = 1.0);
double bipartite_alpha(double b = 1.0);
double hypergraph_alpha(int max_edge_size, double b = 1.0);
double rayleigh_alpha(double b = 1.0);
inline constexpr double kGeneralMatchingAlpha = 1.0 / 3.0;

// Upper bound for the star-with-pendants instance at parameter eps: the root in (0, 1) of
// a = (1 - a (1 - eps)) / (2 - eps - a (1 - eps)).
double bipartite_instance_bound(double eps);
// (sqrt 3 - 1) / 2
double k4_alpha_limit();

struct GreedyDiscard {
    Rational gamma;   // 1 - round(sqrt(k / 2)) / k
    double bound = 0; // 1 - sqrt(2 / (k + 1))
};
GreedyDiscard greedy_discard(int k);

// Per-element selectability of the Gibbs law with rho_e = gamma x_e on the k-uniform family:
// gamma P[T_{-e} <= k - 1] / P[T <= k] with T a sum of Bernoulli(rho).
std::vector<Rational> greedy_selectability(std::span<const Rational> x, int k, const Rational& gamma);
// s >= 1 - sqrt(2 / (k + 1)), decided without rounding.
bool meets_greedy_bound(const Rational& s, int k);

struct AlphaRow {
    std::string kind;
    std::string params;
    double value = 0;
};

// kind: uniform | bipartite | hypergraph | matching | rayleigh | greedy | all.
// Unused parameters are ignored; throws InputError on an unknown kind or invalid parameter.
std::vector<AlphaRow> alpha_table(const std::string& kind, int k = 1, double b = 1.0, int max_edge_size = 2);

}  // namespace socrs
