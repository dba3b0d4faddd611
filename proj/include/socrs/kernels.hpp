#pragma once

// Data-parallel kernels with serial twins. The twins are the reference the tests compare against
// and the baseline the bench target times.

#include "socrs/element_set.hpp"
#include "socrs/env.hpp"

#include <span>
#include <vector>

namespace socrs::kernels {

// log sum_S exp(log_mass[S] + sum_{e in S} log_w[e]); an empty log_mass means unit masses.
double enum_log_partition_serial(std::span<const ElementSet> sets, std::span<const double> log_mass,
                                 std::span<const double> log_w);
double enum_log_partition_parallel(std::span<const ElementSet> sets, std::span<const double> log_mass,
                                   std::span<const double> log_w);

struct EnumMarginals {
    double log_z = 0;
    std::vector<double> marginals;
};

EnumMarginals enum_marginals_serial(int n, std::span<const ElementSet> sets, std::span<const double> log_mass,
                                    std::span<const double> log_w);
EnumMarginals enum_marginals_parallel(int n, std::span<const ElementSet> sets, std::span<const double> log_mass,
                                      std::span<const double> log_w);

// min over T containing e of rank(T) - q(T), by scanning all subsets (n <= 20).
double min_rank_slack_serial(const Matroid& m, std::span<const double> q, int e);
double min_rank_slack_parallel(const Matroid& m, std::span<const double> q, int e);

}  // namespace socrs::kernels
