#pragma once

#include "socrs/counting.hpp"
#include "socrs/dist.hpp"
#include "socrs/env.hpp"
#include "socrs/errors.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace socrs {

enum class DualMethod {
    // Damped Newton with the inclusion covariance as Hessian.
    Newton,
    // Gradient descent with the diagonal preconditioner 1 / (p_e (1 - p_e)).
    PreconditionedGradient,
};

struct DualOptions {
    DualMethod method = DualMethod::Newton;
    double tol = 1e-8;
    int max_iters = 20000;
    double theta_max = 60.0;
    double armijo = 1e-4;
    // Largest change of any theta coordinate in one iteration.
    double max_move = 4.0;
    // When set, one "iteration,grad_inf,step" row per iteration.
    std::ostream* trace = nullptr;
};

struct DualState {
    std::vector<double> theta;
    double step = 1.0;
    std::vector<double> gradient;  // marginals - target
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;  // log Z(theta) - <theta, target>
};

// The target is on (or past) the boundary: the dual has no minimizer and theta ran off.
class DivergenceError : public NumericalError {
public:
    DivergenceError(int coordinate, int direction, DualState state);
    int coordinate() const { return coordinate_; }
    // +1: weight driven to infinity, -1: driven to zero.
    int direction() const { return direction_; }
    const DualState& state() const { return state_; }

private:
    int coordinate_;
    int direction_;
    DualState state_;
};

double dual_objective(const CountingOracle& oracle, std::span<const double> theta, std::span<const double> target);

// Minimizes log Z(theta) - <theta, target> with an Armijo line search from the unit step.
DualState minimize_dual(const CountingOracle& oracle, std::span<const double> target, const DualOptions& options = {},
                        std::span<const double> theta0 = {});

// Max-entropy law on the feasible family with marginals p. Targets that the membership check puts on or
// outside the boundary raise DivergenceError naming the coordinate that runs off.
GibbsDistribution solve_maxent(const Environment& env, OraclePtr oracle, std::span<const double> p,
                               const DualOptions& options = {});

struct KlProjection {
    std::vector<double> log_w;
    std::vector<double> target;    // after the boundary shrink
    std::vector<double> achieved;  // marginals of the tilted measure
    bool shrunk = false;
    double delta = 0.0;
    DualState state;
};

inline constexpr double kDefaultShrink = 1e-6;
// Base measures with at most this many bases are projected on their explicit table.
inline constexpr std::size_t kKlTableCap = 200'000;

// Tilt of the base measure whose base marginals are q. Boundary targets are pulled toward the
// barycentric base point by delta first.
KlProjection solve_kl_projection(const BaseMeasure& base, std::span<const double> q, const DualOptions& options = {},
                                 double delta = kDefaultShrink);

// Average of all base indicators; a relative-interior point of the base polytope.
std::vector<double> barycentric_base_point(const Matroid& m, std::size_t cap = kDefaultEnumerationCap);

// Is q on the relative boundary of the base polytope? Exhaustive over subsets (n <= 20).
bool on_base_polytope_boundary(const Matroid& m, std::span<const double> q, double tol = 1e-12);

// Greedy coordinate raising in index order: a base-polytope point dominating x.
std::vector<double> dominating_base_point(const Matroid& m, std::span<const double> x);

struct BasePointCheck {
    bool dominates = true;
    bool sums_to_rank = true;
    bool rank_feasible = true;
    bool ok() const { return dominates && sums_to_rank && rank_feasible; }
};

BasePointCheck check_base_point(const Matroid& m, std::span<const double> q, std::span<const double> x,
                                double tol = 1e-12);

}  // namespace socrs
