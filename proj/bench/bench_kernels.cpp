// Serial vs parallel timings of the data-parallel kernels.
//   bench_kernels [repeats]

#include "socrs/estimate.hpp"
#include "socrs/instances.hpp"
#include "socrs/kernels.hpp"
#include "socrs/pipeline.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

using namespace socrs;

namespace {

template <class F>
double best_ms(int repeats, F&& f) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void row(const char* name, std::size_t size, double serial, double parallel, double diff) {
    std::printf("%-22s %10zu %10.3f %10.3f %7.2fx %10.2e\n", name, size, serial, parallel, serial / parallel, diff);
}

}  // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
    std::printf("threads %d, best of %d\n", omp_get_max_threads(), repeats);
    std::printf("%-22s %10s %10s %10s %8s %10s\n", "kernel", "size", "serial_ms", "par_ms", "speedup", "max_diff");

    // Matchings of a dense random graph: a few hundred thousand feasible sets.
    const Instance g = random_graph(16, 60, 7);
    const Environment env = g.environment();
    const auto sets = enumerate_feasible(env);
    std::vector<double> log_w(static_cast<std::size_t>(env.size()));
    for (int e = 0; e < env.size(); ++e) log_w[e] = 0.1 * (e % 7) - 0.3;

    double zs = 0, zp = 0;
    const double ts = best_ms(repeats, [&] { zs = kernels::enum_log_partition_serial(sets, {}, log_w); });
    const double tp = best_ms(repeats, [&] { zp = kernels::enum_log_partition_parallel(sets, {}, log_w); });
    row("enum_log_partition", sets.size(), ts, tp, std::abs(zs - zp));

    kernels::EnumMarginals ms, mp;
    const double ms_t = best_ms(repeats, [&] { ms = kernels::enum_marginals_serial(env.size(), sets, {}, log_w); });
    const double mp_t = best_ms(repeats, [&] { mp = kernels::enum_marginals_parallel(env.size(), sets, {}, log_w); });
    double diff = 0;
    for (int e = 0; e < env.size(); ++e) diff = std::max(diff, std::abs(ms.marginals[e] - mp.marginals[e]));
    row("enum_marginals", sets.size(), ms_t, mp_t, diff);

    // Subset scan of the dominating base point on a 16-edge graphic matroid.
    const Instance gm = random_graphic_matroid(8, 16, 3);
    const auto m = gm.matroid();
    const auto q = dominating_base_point(*m, gm.x());
    double ss = 0, sp = 0;
    const double rs = best_ms(repeats, [&] {
        ss = 0;
        for (int e = 0; e < m->size(); ++e) ss += kernels::min_rank_slack_serial(*m, q, e);
    });
    const double rp = best_ms(repeats, [&] {
        sp = 0;
        for (int e = 0; e < m->size(); ++e) sp += kernels::min_rank_slack_parallel(*m, q, e);
    });
    row("min_rank_slack", std::size_t{1} << m->size(), rs, rp, std::abs(ss - sp));

    // Monte-Carlo replications of the online policy.
    const Instance small = random_graph(6, 8, 11);
    const GibbsWitness w(maxent_witness(small, 1.0 / 3));
    const auto x = small.x();
    const auto order = OrderStrategy::ascending(small.environment().size());
    const std::size_t n_rep = 50'000;
    std::vector<Replication> a, b;
    const double ps = best_ms(repeats, [&] { a = replicate(w, x, order, n_rep, 5, false); });
    const double pp = best_ms(repeats, [&] { b = replicate(w, x, order, n_rep, 5, true); });
    std::size_t mismatched = 0;
    for (std::size_t r = 0; r < n_rep; ++r) mismatched += a[r].accepted != b[r].accepted;
    row("replicate", n_rep, ps, pp, static_cast<double>(mismatched));
    return 0;
}
