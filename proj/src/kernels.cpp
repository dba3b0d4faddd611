#include "socrs/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace socrs::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double score(ElementSet s, std::size_t i, std::span<const double> log_mass, std::span<const double> log_w) {
    double v = log_mass.empty() ? 0.0 : log_mass[i];
    s.for_each([&](int e) { v += log_w[e]; });
    return v;
}

inline double finite_or(double v, double fallback) {
    return std::isfinite(v) ? v : fallback;
}

}  // namespace

double enum_log_partition_serial(std::span<const ElementSet> sets, std::span<const double> log_mass,
                                 std::span<const double> log_w) {
    double top = kNegInf;
    for (std::size_t i = 0; i < sets.size(); ++i) top = std::max(top, score(sets[i], i, log_mass, log_w));
    if (top == kNegInf) return kNegInf;
    double sum = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) sum += std::exp(score(sets[i], i, log_mass, log_w) - top);
    return top + std::log(sum);
}

double enum_log_partition_parallel(std::span<const ElementSet> sets, std::span<const double> log_mass,
                                   std::span<const double> log_w) {
    const long count = static_cast<long>(sets.size());
    double top = kNegInf;
#pragma omp parallel for reduction(max : top) schedule(static)
    for (long i = 0; i < count; ++i) top = std::max(top, score(sets[i], static_cast<std::size_t>(i), log_mass, log_w));
    if (top == kNegInf) return kNegInf;
    double sum = 0;
#pragma omp parallel for reduction(+ : sum) schedule(static)
    for (long i = 0; i < count; ++i) sum += std::exp(score(sets[i], static_cast<std::size_t>(i), log_mass, log_w) - top);
    return top + std::log(sum);
}

EnumMarginals enum_marginals_serial(int n, std::span<const ElementSet> sets, std::span<const double> log_mass,
                                    std::span<const double> log_w) {
    EnumMarginals out;
    out.marginals.assign(static_cast<std::size_t>(n), 0.0);
    double top = kNegInf;
    for (std::size_t i = 0; i < sets.size(); ++i) top = std::max(top, score(sets[i], i, log_mass, log_w));
    if (top == kNegInf) {
        out.log_z = kNegInf;
        return out;
    }
    double sum = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const double p = std::exp(score(sets[i], i, log_mass, log_w) - top);
        sum += p;
        sets[i].for_each([&](int e) { out.marginals[e] += p; });
    }
    for (double& m : out.marginals) m /= sum;
    out.log_z = top + std::log(sum);
    return out;
}

EnumMarginals enum_marginals_parallel(int n, std::span<const ElementSet> sets, std::span<const double> log_mass,
                                      std::span<const double> log_w) {
    EnumMarginals out;
    const long count = static_cast<long>(sets.size());
    double top = kNegInf;
#pragma omp parallel for reduction(max : top) schedule(static)
    for (long i = 0; i < count; ++i) top = std::max(top, score(sets[i], static_cast<std::size_t>(i), log_mass, log_w));
    out.marginals.assign(static_cast<std::size_t>(n), 0.0);
    if (top == kNegInf) {
        out.log_z = kNegInf;
        return out;
    }
    double sum = 0;
    double* acc = out.marginals.data();
#pragma omp parallel for reduction(+ : sum) reduction(+ : acc[:n]) schedule(static)
    for (long i = 0; i < count; ++i) {
        const double p = std::exp(score(sets[i], static_cast<std::size_t>(i), log_mass, log_w) - top);
        sum += p;
        sets[i].for_each([&](int e) { acc[e] += p; });
    }
    for (double& m : out.marginals) m /= sum;
    out.log_z = top + std::log(sum);
    return out;
}

namespace {

inline double slack_of(const Matroid& m, std::span<const double> q, std::uint64_t rest, int e) {
    // rest enumerates subsets of E - e; re-insert e at its position.
    const std::uint64_t low = rest & ((std::uint64_t{1} << e) - 1);
    const std::uint64_t high = (rest >> e) << (e + 1);
    const ElementSet t = ElementSet::from_bits(low | high | (std::uint64_t{1} << e));
    double qt = 0;
    t.for_each([&](int f) { qt += q[f]; });
    return m.rank(t) - qt;
}

}  // namespace

double min_rank_slack_serial(const Matroid& m, std::span<const double> q, int e) {
    const std::uint64_t limit = std::uint64_t{1} << (m.size() - 1);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t rest = 0; rest < limit; ++rest) best = std::min(best, slack_of(m, q, rest, e));
    return best;
}

double min_rank_slack_parallel(const Matroid& m, std::span<const double> q, int e) {
    const long long limit = static_cast<long long>(std::uint64_t{1} << (m.size() - 1));
    double best = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : best) schedule(static)
    for (long long rest = 0; rest < limit; ++rest)
        best = std::min(best, slack_of(m, q, static_cast<std::uint64_t>(rest), e));
    return best;
}

}  // namespace socrs::kernels
