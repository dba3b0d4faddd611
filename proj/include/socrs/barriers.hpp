#pragma once

#include "socrs/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace socrs {

struct HatRow {
    int n = 0;
    Rational disconnected;  // fraction of forests with u, v in different components
    Rational expected;      // 3 / (n + 3)
    std::size_t forests = 0;
    bool equal() const { return disconnected == expected; }
};

// Counts forests of the hat graph by enumeration and checks each against 3 / (n + 3).
std::vector<HatRow> hat_disconnection(int max_n = 6);

// 1 + 4t + 2s + 2t^2 + s^2 against the matching recursion at `trials` random rational (t, s).
struct K4PartitionCheck {
    int trials = 0;
    int mismatches = 0;
};
K4PartitionCheck k4_partition_check(int trials, std::uint64_t seed);

struct K4Row {
    double eps = 0;
    double alpha = 0;      // largest alpha whose max-entropy witness keeps rho_diag <= eps
    double rho_diag = 0;
    double outer_weight = 0;
    double diag_weight = 0;
    // Measured only: the largest cap excess of the max-entropy witness at this alpha.
    double max_cap_excess = 0;
};

// Binary search on alpha for each eps (rho_diag is increasing in alpha).
K4Row k4_threshold(double eps, double alpha_tol = 1e-10);

struct BarrierReport {
    std::vector<HatRow> hat;
    K4PartitionCheck partition;
    std::vector<K4Row> k4;
    double limit = 0;  // (sqrt 3 - 1) / 2
    double final_gap = 0;
    bool pass = false;
};

// hat graph n = 1..6, K4 partition identity, K4 thresholds at eps = 0.1, 0.01, 0.001 (gap < 5e-3 at the last).
BarrierReport run_barriers(std::uint64_t seed = 1);
std::string barrier_json(const BarrierReport& r);

}  // namespace socrs
