#include "socrs/lp.hpp"

#include "socrs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace socrs {

LpSolution solve_lp(const LinearProgram& lp) {
    const std::size_t m = lp.a.size();
    const std::size_t n = lp.c.size();
    if (lp.b.size() != m) throw InputError("LP rhs size mismatch");
    for (const auto& row : lp.a)
        if (row.size() != n) throw InputError("LP constraint row size mismatch");
    for (const auto& v : lp.b)
        if (sgn(v) < 0) throw InputError("LP needs b >= 0 for the slack starting basis");

    // Condensed tableau: basic_i = T[i][n] - sum_j T[i][j] * nonbasic_j; objective = z0 + sum_j d_j * nonbasic_j.
    std::vector<std::vector<Rational>> t(m, std::vector<Rational>(n + 1));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t[i][j] = lp.a[i][j];
        t[i][n] = lp.b[i];
    }
    std::vector<Rational> d(lp.c);
    Rational z0 = 0;
    std::vector<std::size_t> nonbasic(n), basic(m);
    for (std::size_t j = 0; j < n; ++j) nonbasic[j] = j;
    for (std::size_t i = 0; i < m; ++i) basic[i] = n + i;

    LpSolution out;
    std::vector<std::size_t> row_nz;
    for (;;) {
        std::size_t s = n;
        for (std::size_t j = 0; j < n; ++j)
            if (sgn(d[j]) > 0 && (s == n || nonbasic[j] < nonbasic[s])) s = j;
        if (s == n) break;

        std::size_t r = m;
        Rational best_ratio;
        for (std::size_t i = 0; i < m; ++i) {
            if (sgn(t[i][s]) <= 0) continue;
            Rational ratio = t[i][n] / t[i][s];
            if (r == m || ratio < best_ratio || (ratio == best_ratio && basic[i] < basic[r])) {
                r = i;
                best_ratio = ratio;
            }
        }
        if (r == m) {
            out.status = LpSolution::Status::Unbounded;
            return out;
        }

        const Rational pivot = t[r][s];
        row_nz.clear();
        for (std::size_t j = 0; j <= n; ++j) {
            if (j == s || sgn(t[r][j]) == 0) continue;
            t[r][j] /= pivot;
            row_nz.push_back(j);
        }
        t[r][s] = 1 / pivot;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || sgn(t[i][s]) == 0) continue;
            const Rational f = t[i][s];
            for (std::size_t j : row_nz) t[i][j] -= f * t[r][j];
            t[i][s] = -f * t[r][s];
        }
        const Rational ds = d[s];
        for (std::size_t j : row_nz) {
            if (j == n)
                z0 += ds * t[r][n];
            else
                d[j] -= ds * t[r][j];
        }
        d[s] = -ds * t[r][s];
        std::swap(nonbasic[s], basic[r]);
        ++out.pivots;
    }

    out.objective = z0;
    out.x.assign(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
        if (basic[i] < n) out.x[basic[i]] = t[i][n];
    return out;
}

StationaryLp solve_stationary_lp_exact(const Environment& env, std::span<const Rational> x, std::size_t budget) {
    const int n = env.size();
    if (static_cast<int>(x.size()) != n) throw InputError("activation vector size mismatch");
    for (const auto& v : x)
        if (sgn(v) <= 0 || v > 1) throw InputError("activation probabilities must lie in (0,1]");
    std::vector<ElementSet> family;
    try {
        family = enumerate_feasible(env, budget);
    } catch (const TooLargeError&) {
        throw TooLargeError("stationary LP budget exceeded: more than " + std::to_string(budget) + " feasible sets");
    }
    std::unordered_map<ElementSet, std::size_t, ElementSetHash> column;
    for (std::size_t i = 0; i < family.size(); ++i) column.emplace(family[i], i + 1);

    // Column 0 is alpha, column i + 1 is mu(family[i]).
    LinearProgram lp;
    const std::size_t cols = family.size() + 1;
    lp.c.assign(cols, Rational(0));
    lp.c[0] = 1;
    auto add_row = [&](std::vector<Rational> row, Rational rhs) {
        lp.a.push_back(std::move(row));
        lp.b.push_back(std::move(rhs));
    };
    {
        std::vector<Rational> row(cols, Rational(0));
        for (std::size_t i = 1; i < cols; ++i) row[i] = 1;
        add_row(std::move(row), 1);
    }
    for (int e = 0; e < n; ++e) {
        std::vector<Rational> row(cols, Rational(0));
        row[0] = x[e];
        for (std::size_t i = 0; i < family.size(); ++i)
            if (family[i].contains(e)) row[i + 1] = -1;
        add_row(std::move(row), 0);
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
        const ElementSet t = family[i];
        for (int e = 0; e < n; ++e) {
            if (t.contains(e) || x[e] == 1) continue;
            auto it = column.find(t.with(e));
            if (it == column.end()) continue;
            std::vector<Rational> row(cols, Rational(0));
            row[it->second] = 1 - x[e];
            row[i + 1] = -x[e];
            add_row(std::move(row), 0);
        }
    }

    LpSolution sol = solve_lp(lp);
    if (sol.status != LpSolution::Status::Optimal) throw NumericalError("stationary LP reported unbounded");

    Rational mass = 0;
    for (std::size_t i = 1; i < cols; ++i) mass += sol.x[i];
    std::vector<RationalDistribution::Entry> entries;
    for (std::size_t i = 0; i < family.size(); ++i) {
        Rational p = sol.x[i + 1];
        if (family[i].empty()) p += 1 - mass;
        entries.emplace_back(family[i], p);
    }
    return StationaryLp{sol.objective, RationalDistribution(env, std::move(entries)), lp.a.size(), sol.pivots};
}

Rational symmetric_uniform_bound(int n, int k, const Rational& q) {
    if (k < 1 || k > n) throw InputError("symmetric bound needs 1 <= k <= n");
    if (sgn(q) < 0 || q > 1) throw InputError("q must lie in [0,1]");
    const Rational p = 1 - q;
    auto binom_pmf = [&](int trials, int j) -> Rational { return binomial(trials, j) * power(q, j) * power(p, trials - j); };
    Rational numerator = 0, denominator = 0;
    for (int j = 0; j < k; ++j) numerator += binom_pmf(n - 1, j);
    for (int j = 0; j <= k; ++j) denominator += binom_pmf(n, j);
    return numerator / denominator;
}

double symmetric_uniform_bound(int n, int k, double q) {
    if (!(q > 0 && q < 1)) return symmetric_uniform_bound(n, k, exact(q)).get_d();
    if (k < 1 || k > n) throw InputError("symmetric bound needs 1 <= k <= n");
    auto log_pmf = [&](int trials, int j) {
        return std::lgamma(trials + 1.0) - std::lgamma(j + 1.0) - std::lgamma(trials - j + 1.0) + j * std::log(q) +
               (trials - j) * std::log1p(-q);
    };
    // Both sums are dominated by their terms near j = k; shift by the j = k term of Bin(n, q).
    const double shift = log_pmf(n, k);
    double numerator = 0, denominator = 0;
    for (int j = 0; j < k; ++j) numerator += std::exp(log_pmf(n - 1, j) - shift);
    for (int j = 0; j <= k; ++j) denominator += std::exp(log_pmf(n, j) - shift);
    return numerator / denominator;
}

}  // namespace socrs
