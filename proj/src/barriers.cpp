#include "socrs/barriers.hpp"

#include "socrs/alpha.hpp"
#include "socrs/counting.hpp"
#include "socrs/dist.hpp"
#include "socrs/instances.hpp"
#include "socrs/maxent.hpp"
#include "socrs/sampling.hpp"

#include <json.hpp>

#include <cmath>

namespace socrs {

std::vector<HatRow> hat_disconnection(int max_n) {
    std::vector<HatRow> rows;
    for (int n = 1; n <= max_n; ++n) {
        // The terminal edge only serves as the connectivity probe: F + uv is a forest iff u, v are apart in F.
        const Instance hat = hat_graph(n, true);
        const auto m = hat.matroid();
        const int probe = 2 * n;
        const auto env = Environment::matroid(m);
        std::size_t forests = 0, apart = 0;
        for (ElementSet f : enumerate_feasible(env)) {
            if (f.contains(probe)) continue;
            ++forests;
            if (env.can_add(f, probe)) ++apart;
        }
        rows.push_back({n, fraction(static_cast<long>(apart), static_cast<long>(forests)), fraction(3, n + 3), forests});
    }
    return rows;
}

K4PartitionCheck k4_partition_check(int trials, std::uint64_t seed) {
    const Instance k4 = k4_barrier(fraction(1, 10));
    MatchingOracle oracle(k4.environment());
    RngStream rng(seed, 0);
    K4PartitionCheck out;
    for (int i = 0; i < trials; ++i) {
        const Rational t = fraction(1 + static_cast<long>(rng.below(999)), 1 + static_cast<long>(rng.below(97)));
        const Rational s = fraction(1 + static_cast<long>(rng.below(999)), 1 + static_cast<long>(rng.below(97)));
        const std::vector<Rational> w{t, t, t, t, s, s};
        const Rational formula = 1 + 4 * t + 2 * s + 2 * t * t + s * s;
        ++out.trials;
        if (oracle.partition_exact(w) != formula) ++out.mismatches;
    }
    return out;
}

K4Row k4_threshold(double eps, double alpha_tol) {
    const Instance k4 = k4_barrier(exact(eps));
    const Environment env = k4.environment();
    const auto oracle = std::make_shared<MatchingOracle>(env);
    const std::vector<double> x = k4.x();
    DualOptions options;
    options.tol = 1e-13;
    auto solve = [&](double alpha) {
        std::vector<double> p(x.size());
        for (std::size_t e = 0; e < x.size(); ++e) p[e] = alpha * x[e];
        return solve_maxent(env, oracle, p, options);
    };
    // rho_diag <= eps at lo, > eps at hi.
    double lo = 0.0, hi = 1.0;
    while (hi - lo > alpha_tol) {
        const double mid = 0.5 * (lo + hi);
        (solve(mid).rho(4) <= eps ? lo : hi) = mid;
    }
    const GibbsDistribution g = solve(lo);
    K4Row row{eps, lo, g.rho(4), g.weight(0), g.weight(4), 0.0};
    const auto report = verify_stationary_lp(g, std::span<const double>(x), lo, 0.0);
    row.max_cap_excess = report.max_cap_excess;
    return row;
}

BarrierReport run_barriers(std::uint64_t seed) {
    BarrierReport r;
    r.hat = hat_disconnection(6);
    r.partition = k4_partition_check(100, seed);
    for (double eps : {0.1, 0.01, 0.001}) r.k4.push_back(k4_threshold(eps));
    r.limit = k4_alpha_limit();
    r.final_gap = std::abs(r.k4.back().alpha - r.limit);
    r.pass = r.partition.mismatches == 0 && r.final_gap < 5e-3;
    for (const auto& h : r.hat) r.pass = r.pass && h.equal();
    return r;
}

std::string barrier_json(const BarrierReport& r) {
    nlohmann::json doc;
    nlohmann::json hat = nlohmann::json::array();
    for (const auto& h : r.hat)
        hat.push_back({{"n", h.n},
                       {"forests", h.forests},
                       {"disconnected", to_string(h.disconnected)},
                       {"expected", to_string(h.expected)},
                       {"equal", h.equal()}});
    doc["hat_graph"] = hat;
    doc["k4_partition"] = {{"trials", r.partition.trials}, {"mismatches", r.partition.mismatches}};
    nlohmann::json k4 = nlohmann::json::array();
    for (const auto& row : r.k4)
        k4.push_back({{"eps", row.eps},
                      {"alpha", row.alpha},
                      {"rho_diag", row.rho_diag},
                      {"outer_weight", row.outer_weight},
                      {"diag_weight", row.diag_weight},
                      {"max_cap_excess", row.max_cap_excess}});
    doc["k4_threshold"] = k4;
    doc["k4_limit"] = r.limit;
    doc["final_gap"] = r.final_gap;
    doc["pass"] = r.pass;
    return doc.dump(2);
}

}  // namespace socrs
