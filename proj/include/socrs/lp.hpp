#pragma once

#include "socrs/dist.hpp"
#include "socrs/env.hpp"
#include "socrs/rational.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace socrs {

// max c.x  s.t.  A x <= b, x >= 0, with b >= 0 so the slack basis is feasible.
struct LinearProgram {
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    std::vector<Rational> c;
};

struct LpSolution {
    enum class Status { Optimal, Unbounded };
    Status status = Status::Optimal;
    Rational objective;
    std::vector<Rational> x;
    std::size_t pivots = 0;
};

// Dense exact simplex on the condensed tableau with Bland's rule.
LpSolution solve_lp(const LinearProgram& lp);

inline constexpr std::size_t kLpSupportBudget = 5000;

struct StationaryLp {
    Rational alpha;
    RationalDistribution witness;
    std::size_t constraints = 0;
    std::size_t pivots = 0;
};

// Largest alpha admitting a stationary witness, with caps linearized as
// (1 - x_e) mu(T + e) <= x_e mu(T).
StationaryLp solve_stationary_lp_exact(const Environment& env, std::span<const Rational> x,
                                       std::size_t budget = kLpSupportBudget);

// P[Bin(n-1, q) < k] / P[Bin(n, q) <= k].
Rational symmetric_uniform_bound(int n, int k, const Rational& q);
double symmetric_uniform_bound(int n, int k, double q);

}  // namespace socrs
