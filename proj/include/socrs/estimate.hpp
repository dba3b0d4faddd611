#pragma once

#include "socrs/policy.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace socrs {

enum class Mode { Exact, MonteCarlo };

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::size_t samples = 100'000;
    double tol = 1e-9;
    double alpha = 0.0;
    Mode mode = Mode::MonteCarlo;
    std::string instance_id = "instance";
    bool parallel = true;
};

struct Interval {
    double lo = 0;
    double hi = 1;
};

// Wilson score interval for k successes in n trials.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct ElementMargin {
    int element = 0;
    double x = 0;
    // Monte-Carlo: accepted / active with a Wilson interval. Exact: P[e selected] / x_e, lo = hi = ratio.
    double ratio = 0;
    Interval interval;
    std::size_t active = 0;
    std::size_t accepted = 0;
};

struct ResultRecord {
    std::string instance_id;
    std::string strategy;
    std::string mode;
    double alpha_target = 0;
    double alpha_achieved = 0;  // min over elements of the ratio
    int weakest_element = -1;
    std::vector<ElementMargin> margins;
    std::vector<double> stationarity_tv;
    double stationarity_bound = 0;
    std::vector<std::string> cap_violations;
    std::size_t samples = 0;
    std::size_t atoms = 0;
    double runtime_seconds = 0;
    // Exact: alpha_achieved >= alpha_target - tol. Monte-Carlo: every 3-sigma Wilson upper end reaches the target.
    bool pass = false;
};

struct Replication {
    ElementSet active;
    ElementSet accepted;
    std::vector<TraceRow> trace;
};

// N one-shot runs, replication r drawing from RngStream(seed, r). `keep_traces` retains the event rows.
std::vector<Replication> replicate(const Witness& witness, std::span<const double> x, const OrderStrategy& strategy,
                                   std::size_t samples, std::uint64_t seed, bool parallel, bool keep_traces = false);

// Exact mode expands the output law when it fits in kExactAtomLimit atoms and falls back to Monte-Carlo
// otherwise (recorded in `mode`). A cap violation is reported in the record rather than thrown.
// When `traces` is non-null and the run is Monte-Carlo, the per-replication rows are stored there.
ResultRecord estimate_selectability(const Witness& witness, std::span<const double> x, const OrderStrategy& strategy,
                                    const ExperimentConfig& config, std::vector<Replication>* traces = nullptr);

// Stationarity: the TV from the witness law of the empirical output law under each order.
ResultRecord estimate_stationarity(const Witness& witness, std::span<const double> x,
                                   std::span<const OrderStrategy> orders, const ExperimentConfig& config);

// "replication,element,renewal,active,accepted" rows.
void write_replications(std::ostream& out, std::span<const Replication> reps);
// min over elements of accepted / active recomputed from such a file.
double alpha_from_replications(std::istream& in, int n);

std::string record_json(const ResultRecord& r);
// One flat row: instance,strategy,mode,alpha_target,alpha_achieved,weakest,samples,pass.
std::string record_summary(const ResultRecord& r);

}  // namespace socrs
