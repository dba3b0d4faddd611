#include "socrs/maxent.hpp"

#include "socrs/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace socrs {

DivergenceError::DivergenceError(int coordinate, int direction, DualState state)
    : NumericalError("target on or outside the polytope boundary: coordinate " + std::to_string(coordinate) +
                     " driven to " + (direction > 0 ? "+inf" : "-inf")),
      coordinate_(coordinate), direction_(direction), state_(std::move(state)) {}

double dual_objective(const CountingOracle& oracle, std::span<const double> theta, std::span<const double> target) {
    double h = oracle.log_partition(theta);
    for (std::size_t e = 0; e < theta.size(); ++e) h -= theta[e] * target[e];
    return h;
}

namespace {

double inf_norm(std::span<const double> v) {
    double m = 0;
    for (double a : v) m = std::max(m, std::abs(a));
    return m;
}

void check_divergence(const DualState& state, double theta_max) {
    std::size_t worst = 0;
    for (std::size_t e = 0; e < state.theta.size(); ++e)
        if (std::abs(state.theta[e]) > std::abs(state.theta[worst])) worst = e;
    if (!state.theta.empty() && std::abs(state.theta[worst]) > theta_max)
        throw DivergenceError(static_cast<int>(worst), state.theta[worst] > 0 ? 1 : -1, state);
}

}  // namespace

DualState minimize_dual(const CountingOracle& oracle, std::span<const double> target, const DualOptions& options,
                        std::span<const double> theta0) {
    const std::size_t n = static_cast<std::size_t>(oracle.size());
    if (target.size() != n) throw InputError("target marginal vector size mismatch");
    DualState state;
    state.theta = theta0.empty() ? std::vector<double>(n, 0.0) : std::vector<double>(theta0.begin(), theta0.end());
    if (state.theta.size() != n) throw InputError("initial dual point size mismatch");

    std::vector<double> scale(n);
    for (std::size_t e = 0; e < n; ++e) scale[e] = 1.0 / std::max(target[e] * (1.0 - target[e]), 1e-12);

    std::vector<double> direction(n), trial(n);
    auto value_at = [&](double t) {
        for (std::size_t e = 0; e < n; ++e) trial[e] = state.theta[e] + t * direction[e];
        return dual_objective(oracle, trial, target);
    };

    state.objective = dual_objective(oracle, state.theta, target);
    for (;;) {
        const std::vector<double> marg = oracle.marginals(state.theta);
        state.gradient.resize(n);
        for (std::size_t e = 0; e < n; ++e) state.gradient[e] = marg[e] - target[e];
        const double grad_inf = inf_norm(state.gradient);
        if (options.trace) *options.trace << state.iterations << ',' << grad_inf << ',' << state.step << '\n';
        if (grad_inf <= options.tol) {
            state.converged = true;
            return state;
        }
        if (state.iterations >= options.max_iters) return state;

        bool newton = options.method == DualMethod::Newton;
        if (newton) {
            const auto cov = inclusion_covariance(oracle, state.theta);
            Eigen::MatrixXd h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            Eigen::VectorXd g(static_cast<Eigen::Index>(n));
            for (std::size_t e = 0; e < n; ++e) {
                g(e) = state.gradient[e];
                for (std::size_t f = 0; f < n; ++f) h(e, f) = cov[e][f];
            }
            // Pseudo-inverse: directions the family cannot move along (|B| = r, bridges) have zero
            // curvature, and any component there would only eat the max_move budget.
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
            const Eigen::VectorXd& lambda = eig.eigenvalues();
            const double cutoff = 1e-12 * std::max(lambda.cwiseAbs().maxCoeff(), 1e-300);
            Eigen::VectorXd coeff = eig.eigenvectors().transpose() * g;
            for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff(i) = lambda(i) > cutoff ? -coeff(i) / lambda(i) : 0.0;
            const Eigen::VectorXd d = eig.eigenvectors() * coeff;
            for (std::size_t e = 0; e < n; ++e) direction[e] = d(e);
            newton = d.allFinite() && g.dot(d) < 0;
        }
        if (!newton)
            for (std::size_t e = 0; e < n; ++e) direction[e] = -state.gradient[e] * scale[e];
        double slope = 0;
        for (std::size_t e = 0; e < n; ++e) slope += state.gradient[e] * direction[e];

        // Steps can be huge far from the optimum; bound the move in theta.
        const double t_max = options.max_move / inf_norm(direction);
        double t = std::min(1.0, t_max);
        double h_t = value_at(t);
        auto sufficient = [&](double h, double step) { return h <= state.objective + options.armijo * step * slope; };
        // Below the resolution of h the Armijo test is noise; take the step as is.
        const bool below_resolution = -slope * t <= 1e-14 * std::max(1.0, std::abs(state.objective));
        if (!below_resolution && sufficient(h_t, t)) {
            if (!newton)
                while (2 * t <= t_max) {
                    const double h_2 = value_at(2 * t);
                    if (!sufficient(h_2, 2 * t) || !(h_2 < h_t)) break;
                    t *= 2;
                    h_t = h_2;
                }
        } else if (!below_resolution) {
            while (!sufficient(h_t, t)) {
                t *= 0.5;
                if (t < 1e-18) return state;  // no representable decrease left
                h_t = value_at(t);
            }
        }
        for (std::size_t e = 0; e < n; ++e) state.theta[e] += t * direction[e];
        state.objective = h_t;
        state.step = t;
        ++state.iterations;
        check_divergence(state, options.theta_max);
    }
}

namespace {

// The coordinate a boundary target drives off: run a short solve and report its largest coordinate.
[[noreturn]] void diagnose_boundary(const CountingOracle& oracle, std::span<const double> p,
                                    std::span<const double> theta0, const DualOptions& options) {
    DualOptions probe = options;
    probe.max_iters = std::min(options.max_iters, 200);
    probe.tol = 0;
    DualState state = minimize_dual(oracle, p, probe, theta0);
    std::size_t worst = 0;
    for (std::size_t e = 0; e < state.theta.size(); ++e)
        if (std::abs(state.theta[e]) > std::abs(state.theta[worst])) worst = e;
    const int direction = state.theta[worst] > 0 ? 1 : -1;
    throw DivergenceError(static_cast<int>(worst), direction, std::move(state));
}

}  // namespace

GibbsDistribution solve_maxent(const Environment& env, OraclePtr oracle, std::span<const double> p,
                               const DualOptions& options) {
    if (!oracle || oracle->size() != env.size() || static_cast<int>(p.size()) != env.size())
        throw InputError("maxent: size mismatch between environment, oracle and targets");
    std::vector<double> theta0(p.size());
    for (std::size_t e = 0; e < p.size(); ++e) {
        if (!(p[e] > 0.0)) throw DivergenceError(static_cast<int>(e), -1, DualState{});
        if (!(p[e] < 1.0)) throw DivergenceError(static_cast<int>(e), 1, DualState{});
        theta0[e] = std::log(p[e] / (1.0 - p[e]));
    }
    const MembershipReport membership = check_membership(env, p, 1e-12);
    if (membership.status == Membership::Boundary || membership.status == Membership::Outside)
        diagnose_boundary(*oracle, p, theta0, options);
    DualState state = minimize_dual(*oracle, p, options, theta0);
    if (!state.converged)
        throw NumericalError("maxent solver stopped after " + std::to_string(state.iterations) +
                             " iterations with gradient " + std::to_string(inf_norm(state.gradient)));
    return GibbsDistribution(env, std::move(state.theta), std::move(oracle));
}

// ---------------------------------------------------------------- base polytope

namespace {

std::vector<ElementSet> all_bases(const Matroid& m, std::size_t cap) {
    auto handle = std::make_shared<Matroid>(m);
    std::vector<ElementSet> out;
    for (auto s : enumerate_feasible(Environment::matroid(handle), cap))
        if (s.size() == m.rank()) out.push_back(s);
    return out;
}

double sum_over(ElementSet t, std::span<const double> v) {
    double s = 0;
    t.for_each([&](int e) { s += v[e]; });
    return s;
}

void require_enumerable(const Matroid& m) {
    if (m.size() > kMembershipEnumerationLimit)
        throw TooLargeError("subset enumeration beyond n=" + std::to_string(kMembershipEnumerationLimit));
}

}  // namespace

std::vector<double> barycentric_base_point(const Matroid& m, std::size_t cap) {
    const auto bases = all_bases(m, cap);
    std::vector<double> q(static_cast<std::size_t>(m.size()), 0.0);
    for (auto b : bases) b.for_each([&](int e) { q[e] += 1.0; });
    for (double& v : q) v /= static_cast<double>(bases.size());
    return q;
}

bool on_base_polytope_boundary(const Matroid& m, std::span<const double> q, double tol) {
    require_enumerable(m);
    const std::vector<double> center = barycentric_base_point(m);
    for (int e = 0; e < m.size(); ++e)
        if (q[e] <= tol && center[e] > tol) return true;
    const std::uint64_t limit = std::uint64_t{1} << m.size();
    for (std::uint64_t bits = 1; bits < limit; ++bits) {
        const ElementSet t = ElementSet::from_bits(bits);
        const int r = m.rank(t);
        if (r - sum_over(t, q) <= tol && r - sum_over(t, center) > tol) return true;
    }
    return false;
}

KlProjection solve_kl_projection(const BaseMeasure& base, std::span<const double> q, const DualOptions& options,
                                 double delta) {
    const Matroid& m = base.matroid();
    if (static_cast<int>(q.size()) != m.size()) throw InputError("base point size mismatch");
    const double total = std::accumulate(q.begin(), q.end(), 0.0);
    if (std::abs(total - m.rank()) > 1e-9 * std::max(1, m.size()))
        throw InputError("KL projection target must sum to the matroid rank");

    KlProjection out;
    out.target.assign(q.begin(), q.end());
    if (m.size() <= kMembershipEnumerationLimit && on_base_polytope_boundary(m, q)) {
        const std::vector<double> center = barycentric_base_point(m);
        for (std::size_t e = 0; e < q.size(); ++e) out.target[e] = (1 - delta) * q[e] + delta * center[e];
        out.shrunk = true;
        out.delta = delta;
    }
    // Near the boundary the tilt is large and determinant-based marginals lose digits in 1 - P[e in B];
    // a listed base table sums each side directly.
    OraclePtr oracle = base.oracle();
    try {
        oracle = base.tabulate(kKlTableCap);
    } catch (const TooLargeError&) {
    }
    try {
        out.state = minimize_dual(*oracle, out.target, options);
    } catch (const DivergenceError& err) {
        throw NumericalError(std::string("KL projection diverged") + (out.shrunk ? " after boundary shrink" : "") +
                             ": " + err.what() + " at iteration " + std::to_string(err.state().iterations));
    }
    if (!out.state.converged)
        throw NumericalError("KL projection stopped after " + std::to_string(out.state.iterations) +
                             " iterations with gradient " + std::to_string(inf_norm(out.state.gradient)));
    out.log_w = out.state.theta;
    out.achieved = oracle->marginals(out.log_w);
    return out;
}

std::vector<double> dominating_base_point(const Matroid& m, std::span<const double> x) {
    const int n = m.size();
    if (static_cast<int>(x.size()) != n) throw InputError("activation vector size mismatch");
    for (double v : x)
        if (!(v >= 0.0 && v <= 1.0)) throw InputError("dominating_base_point needs x in [0,1]^E");
    const bool uniform = m.variant() == Matroid::Variant::Uniform;
    if (!uniform) require_enumerable(m);

    auto env = Environment::matroid(std::make_shared<Matroid>(m));
    MembershipReport membership = check_membership(env, x, 1e-12);
    if (membership.status == Membership::Outside)
        throw InputError("x is outside the independence polytope: " + membership.constraint);

    std::vector<double> q(x.begin(), x.end());
    for (int e = 0; e < n; ++e) {
        double slack = uniform ? m.uniform_k() - std::accumulate(q.begin(), q.end(), 0.0)
                               : kernels::min_rank_slack_parallel(m, q, e);
        const double inc = std::min(1.0 - q[e], slack);
        if (inc > 0) q[e] += inc;
    }
    const double total = std::accumulate(q.begin(), q.end(), 0.0);
    if (std::abs(total - m.rank()) > 1e-9 * std::max(1, n))
        throw NumericalError("dominating base point does not reach the rank");
    return q;
}

BasePointCheck check_base_point(const Matroid& m, std::span<const double> q, std::span<const double> x, double tol) {
    BasePointCheck check;
    const int n = m.size();
    for (int e = 0; e < n; ++e)
        if (q[e] < x[e] - tol) check.dominates = false;
    check.sums_to_rank = std::abs(std::accumulate(q.begin(), q.end(), 0.0) - m.rank()) <= tol * std::max(1, n);
    if (m.variant() == Matroid::Variant::Uniform) {
        for (double v : q)
            if (v > 1 + tol || v < -tol) check.rank_feasible = false;
        return check;
    }
    require_enumerable(m);
    for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << n); ++bits) {
        const ElementSet t = ElementSet::from_bits(bits);
        if (sum_over(t, q) > m.rank(t) + tol * std::max(1, t.size())) {
            check.rank_feasible = false;
            break;
        }
    }
    return check;
}

}  // namespace socrs
