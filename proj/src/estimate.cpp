#include "socrs/estimate.hpp"

#include "socrs/errors.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace socrs {

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::vector<Replication> replicate(const Witness& witness, std::span<const double> x, const OrderStrategy& strategy,
                                   std::size_t samples, std::uint64_t seed, bool parallel, bool keep_traces) {
    std::vector<Replication> reps(samples);
    // Errors inside the parallel region are carried out and rethrown in replication order.
    std::vector<std::exception_ptr> errors(samples);
    const long long total = static_cast<long long>(samples);
    auto body = [&](long long r) {
        try {
            RngStream rng(seed, static_cast<std::uint64_t>(r));
            OneShotResult run = run_one_shot(witness, x, strategy, rng);
            Replication& rep = reps[static_cast<std::size_t>(r)];
            for (const auto& row : run.trace)
                if (row.active) rep.active = rep.active.with(row.element);
            rep.accepted = run.accepted;
            if (keep_traces) rep.trace = std::move(run.trace);
        } catch (...) {
            errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 256)
        for (long long r = 0; r < total; ++r) body(r);
    } else {
        for (long long r = 0; r < total; ++r) body(r);
    }
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    return reps;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void finish_min(ResultRecord& rec) {
    rec.alpha_achieved = INFINITY;
    for (const auto& m : rec.margins)
        if (m.ratio < rec.alpha_achieved) {
            rec.alpha_achieved = m.ratio;
            rec.weakest_element = m.element;
        }
    if (rec.margins.empty()) rec.alpha_achieved = 0;
}

}  // namespace

ResultRecord estimate_selectability(const Witness& witness, std::span<const double> x, const OrderStrategy& strategy,
                                    const ExperimentConfig& config, std::vector<Replication>* traces) {
    if (config.samples < 1) throw InputError("samples must be at least 1");
    if (!(config.tol > 0)) throw InputError("tolerance must be positive");
    const auto start = std::chrono::steady_clock::now();
    const int n = witness.size();
    ResultRecord rec;
    rec.instance_id = config.instance_id;
    rec.strategy = strategy.name();
    rec.alpha_target = config.alpha;

    try {
        if (config.mode == Mode::Exact) {
            try {
                const OutputLaw law = exact_output_law(witness, x, strategy);
                rec.mode = "exact";
                rec.atoms = law.atoms;
                for (int e = 0; e < n; ++e) {
                    const double ratio = law.selection[e] / x[e];
                    rec.margins.push_back({e, x[e], ratio, {ratio, ratio}, 0, 0});
                }
                finish_min(rec);
                rec.pass = rec.alpha_achieved >= config.alpha - config.tol;
                rec.runtime_seconds = seconds_since(start);
                return rec;
            } catch (const TooLargeError&) {
                rec.mode = "monte-carlo (exact budget exceeded)";
            }
        } else {
            rec.mode = "monte-carlo";
        }
        std::vector<Replication> reps = replicate(witness, x, strategy, config.samples, config.seed, config.parallel,
                                                  traces != nullptr);
        rec.samples = reps.size();
        std::vector<std::size_t> active(static_cast<std::size_t>(n)), accepted(static_cast<std::size_t>(n));
        for (const auto& rep : reps) {
            rep.active.for_each([&](int e) { ++active[e]; });
            rep.accepted.for_each([&](int e) { ++accepted[e]; });
        }
        rec.pass = true;
        for (int e = 0; e < n; ++e) {
            ElementMargin m{e, x[e], 0.0, wilson_interval(accepted[e], active[e]), active[e], accepted[e]};
            m.ratio = active[e] ? static_cast<double>(accepted[e]) / static_cast<double>(active[e]) : 0.0;
            if (wilson_interval(accepted[e], active[e], 3.0).hi < config.alpha) rec.pass = false;
            rec.margins.push_back(m);
        }
        finish_min(rec);
        if (traces) *traces = std::move(reps);
    } catch (const CapViolationError& err) {
        rec.cap_violations.push_back(err.what());
        rec.pass = false;
    }
    rec.runtime_seconds = seconds_since(start);
    return rec;
}

ResultRecord estimate_stationarity(const Witness& witness, std::span<const double> x,
                                   std::span<const OrderStrategy> orders, const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const ExplicitDistribution reference = witness.law();
    ResultRecord rec;
    rec.instance_id = config.instance_id;
    rec.mode = "monte-carlo";
    rec.strategy = "orders:" + std::to_string(orders.size());
    rec.samples = config.samples;
    rec.stationarity_bound = multinomial_tv_bound(reference, config.samples);
    rec.pass = true;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        // Distinct seeds per order keep the samples independent across orders.
        const auto reps = replicate(witness, x, orders[i], config.samples, config.seed + 7919 * (i + 1), config.parallel);
        std::vector<ElementSet> outputs;
        outputs.reserve(reps.size());
        for (const auto& r : reps) outputs.push_back(r.accepted);
        const double tv = empirical_tv(outputs, reference);
        rec.stationarity_tv.push_back(tv);
        if (tv > rec.stationarity_bound) rec.pass = false;
    }
    rec.runtime_seconds = seconds_since(start);
    return rec;
}

void write_replications(std::ostream& out, std::span<const Replication> reps) {
    out << "replication,element,renewal,active,accepted\n";
    for (std::size_t r = 0; r < reps.size(); ++r)
        for (const auto& row : reps[r].trace)
            out << r << ',' << row.element << ',' << row.renewal << ',' << int(row.active) << ',' << int(row.accepted)
                << '\n';
}

double alpha_from_replications(std::istream& in, int n) {
    std::vector<std::size_t> active(static_cast<std::size_t>(n)), accepted(static_cast<std::size_t>(n));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.starts_with("replication")) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        long long r = 0;
        int e = 0, renewal = 0, a = 0, acc = 0;
        if (!(fields >> r >> e >> renewal >> a >> acc) || e < 0 || e >= n) throw InputError("bad replication row: " + line);
        active[e] += a;
        accepted[e] += acc;
    }
    double best = INFINITY;
    for (int e = 0; e < n; ++e)
        best = std::min(best, active[e] ? static_cast<double>(accepted[e]) / static_cast<double>(active[e]) : 0.0);
    return best;
}

std::string record_json(const ResultRecord& r) {
    nlohmann::json doc;
    doc["instance"] = r.instance_id;
    doc["strategy"] = r.strategy;
    doc["mode"] = r.mode;
    doc["alpha_target"] = r.alpha_target;
    doc["alpha_achieved"] = r.alpha_achieved;
    doc["weakest_element"] = r.weakest_element;
    nlohmann::json margins = nlohmann::json::array();
    for (const auto& m : r.margins)
        margins.push_back({{"element", m.element},
                           {"x", m.x},
                           {"ratio", m.ratio},
                           {"lo", m.interval.lo},
                           {"hi", m.interval.hi},
                           {"active", m.active},
                           {"accepted", m.accepted}});
    doc["margins"] = margins;
    doc["stationarity_tv"] = r.stationarity_tv;
    doc["stationarity_bound"] = r.stationarity_bound;
    doc["cap_violations"] = r.cap_violations;
    doc["samples"] = r.samples;
    doc["atoms"] = r.atoms;
    doc["runtime_seconds"] = r.runtime_seconds;
    doc["pass"] = r.pass;
    return doc.dump(2);
}

std::string record_summary(const ResultRecord& r) {
    std::ostringstream out;
    out.precision(12);
    out << r.instance_id << ',' << r.strategy << ',' << r.mode << ',' << r.alpha_target << ',' << r.alpha_achieved << ','
        << r.weakest_element << ',' << r.samples << ',' << (r.pass ? "pass" : "fail");
    return out.str();
}

}  // namespace socrs
