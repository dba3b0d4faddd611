#include "socrs/alpha.hpp"
#include "socrs/barriers.hpp"
#include "socrs/errors.hpp"
#include "socrs/estimate.hpp"
#include "socrs/instances.hpp"
#include "socrs/lp.hpp"
#include "socrs/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

using namespace socrs;
using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

struct Options {
    std::uint64_t seed = 1;
    std::size_t samples = 100'000;
    std::optional<double> tol;
    std::optional<double> alpha;
    std::string mode = "mc";
    std::string out;

    std::string instance_file;
    std::string generator;
    std::vector<std::string> params;

    std::string witness = "maxent";
    std::string order = "ascending";
    double scale = 1.0;
    double headroom = 1e-9;
    std::string replay;
    std::string trace_out;
    std::string solver_trace;
    std::string q;
    bool stationarity = false;
    bool summary = false;

    std::string gen_name;
    std::string alpha_kind = "all";
    int k = 1;
    int max_edge_size = 2;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream file(o.out);
    if (!file) throw InputError("cannot write '" + o.out + "'");
    file << text;
    if (!text.empty() && text.back() != '\n') file << '\n';
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& raw) {
    std::map<std::string, std::string> out;
    for (const auto& p : raw) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("parameter '" + p + "' is not key=value");
        out[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return out;
}

Instance load_instance(const Options& o) {
    if (!o.instance_file.empty() && !o.generator.empty()) throw InputError("give --instance or --gen, not both");
    if (!o.instance_file.empty()) return instance_from_json(read_file(o.instance_file));
    if (!o.generator.empty()) return gen_instance(o.generator, parse_params(o.params), o.seed);
    throw InputError("an instance is required (--instance FILE or --gen NAME)");
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) out.push_back(parse_rational(item).get_d());
    return out;
}

Mode parse_mode(const std::string& m) {
    if (m == "exact") return Mode::Exact;
    if (m == "mc") return Mode::MonteCarlo;
    throw InputError("--mode must be exact or mc");
}

double alpha_for(const Options& o, const Instance& inst) { return o.alpha ? *o.alpha : default_alpha(inst); }

std::string trace_text(std::span<const TraceRow> rows) {
    std::ostringstream out;
    write_trace(out, rows);
    return out.str();
}

std::vector<TraceRow> load_trace(const std::string& path) {
    std::istringstream in(read_file(path));
    return read_trace(in);
}

// ---------------------------------------------------------------- subcommands

int cmd_gen(const Options& o) {
    const Instance inst = gen_instance(o.gen_name, parse_params(o.params), o.seed);
    const auto m = check_membership(inst.environment(), inst.x());
    emit(o, instance_to_json(inst));
    std::cerr << "membership: " << to_string(m.status) << (m.constraint.empty() ? "" : " (" + m.constraint + ")") << '\n';
    return m.status == Membership::Outside ? kViolation : kPass;
}

int cmd_solve_maxent(const Options& o) {
    const Instance inst = load_instance(o);
    const Environment env = inst.environment();
    const auto oracle = oracle_for(env);
    std::vector<double> p;
    const double alpha = alpha_for(o, inst);
    if (!o.q.empty()) {
        p = parse_list(o.q);
    } else {
        for (double v : inst.x()) p.push_back(alpha * v);
    }
    std::ofstream trace_file;
    DualOptions options;
    if (o.tol) options.tol = *o.tol;
    if (!o.solver_trace.empty()) {
        trace_file.open(o.solver_trace);
        if (!trace_file) throw InputError("cannot write '" + o.solver_trace + "'");
        trace_file << "iteration,grad_inf,step\n";
        options.trace = &trace_file;
    }
    json doc;
    doc["instance"] = inst.name;
    doc["backend"] = std::string(oracle->backend());
    doc["target"] = p;
    try {
        const GibbsDistribution g = solve_maxent(env, oracle, p, options);
        const auto m = g.marginals();
        double residual = 0;
        std::vector<double> rho;
        for (std::size_t e = 0; e < p.size(); ++e) {
            residual = std::max(residual, std::abs(m[e] - p[e]));
            rho.push_back(g.rho(static_cast<int>(e)));
        }
        doc["theta"] = std::vector<double>(g.log_weights().begin(), g.log_weights().end());
        doc["rho"] = rho;
        doc["marginals"] = m;
        doc["max_residual"] = residual;
        doc["log_partition"] = g.log_partition();
        emit(o, doc.dump(2));
        return kPass;
    } catch (const DivergenceError& err) {
        doc["diagnosis"] = "divergence";
        doc["coordinate"] = err.coordinate();
        doc["direction"] = err.direction() > 0 ? "weight to infinity" : "weight to zero";
        doc["message"] = err.what();
        emit(o, doc.dump(2));
        return kViolation;
    }
}

int cmd_dominate(const Options& o) {
    const Instance inst = load_instance(o);
    const auto m = inst.matroid();
    std::vector<double> x = inst.x();
    for (auto& v : x) v /= o.scale;
    const auto q = dominating_base_point(*m, x);
    const auto check = check_base_point(*m, q, x);
    json doc{{"q", q},
             {"dominates", check.dominates},
             {"sums_to_rank", check.sums_to_rank},
             {"rank_feasible", check.rank_feasible},
             {"boundary", on_base_polytope_boundary(*m, q)}};
    emit(o, doc.dump(2));
    return check.ok() ? kPass : kViolation;
}

int cmd_kl_project(const Options& o) {
    const Instance inst = load_instance(o);
    const BaseMeasure base = default_base(inst);
    std::vector<double> q;
    if (!o.q.empty()) {
        q = parse_list(o.q);
    } else {
        std::vector<double> x = inst.x();
        for (auto& v : x) v /= o.scale;
        q = dominating_base_point(base.matroid(), x);
    }
    DualOptions options;
    if (o.tol) options.tol = *o.tol;
    const KlProjection kl = solve_kl_projection(base, q, options);
    double residual = 0;
    for (std::size_t e = 0; e < q.size(); ++e) residual = std::max(residual, std::abs(kl.achieved[e] - kl.target[e]));
    json doc{{"q", q},
             {"target", kl.target},
             {"log_w", kl.log_w},
             {"achieved", kl.achieved},
             {"shrunk", kl.shrunk},
             {"delta", kl.delta},
             {"iterations", kl.state.iterations},
             {"converged", kl.state.converged},
             {"max_residual", residual}};
    emit(o, doc.dump(2));
    return kl.state.converged ? kPass : kViolation;
}

int cmd_build_rayleigh(const Options& o) {
    const Instance inst = load_instance(o);
    RayleighBuildOptions options;
    options.scale = o.scale;
    options.screen_seed = o.seed;
    if (o.tol) options.dual.tol = *o.tol;
    const RayleighWitness w = build_witness(default_base(inst), inst.x(), options);
    const ExplicitDistribution table = materialize(w);
    emit(o, witness_json(w, &table));
    return kPass;
}

int cmd_run_policy(const Options& o) {
    const Instance inst = load_instance(o);
    const auto x = inst.x();
    const WitnessPtr w = make_witness(inst, parse_witness_source(o.witness), alpha_for(o, inst), o.scale);
    RngStream rng(o.seed, 0);
    OneShotResult res;
    if (!o.replay.empty()) {
        // Replays arrival order and activations from a previous trace; coins come from --seed.
        const auto rows = load_trace(o.replay);
        std::vector<int> order;
        ElementSet active;
        for (const auto& r : rows) {
            order.push_back(r.element);
            if (r.active) active = active.with(r.element);
        }
        res = run_one_shot(*w, x, OrderStrategy::fixed(order), rng, active);
    } else {
        res = run_one_shot(*w, x, parse_order(o.order, inst.environment().size(), o.seed), rng);
    }
    emit(o, trace_text(res.trace));
    std::cerr << "accepted " << to_string(res.accepted) << '\n';
    return inst.environment().is_feasible(res.accepted) ? kPass : kViolation;
}

int cmd_run_recurring(const Options& o) {
    if (o.replay.empty()) throw InputError("run-recurring needs --replay with an event file");
    const Instance inst = load_instance(o);
    const Environment env = inst.environment();
    const auto x = inst.x();
    const WitnessPtr w = make_witness(inst, parse_witness_source(o.witness), alpha_for(o, inst), o.scale);
    std::vector<RecurringEvent> events;
    for (const auto& r : load_trace(o.replay)) events.push_back({r.element, r.renewal, r.active});
    RngStream rng(o.seed, 0);
    const auto rows = run_recurring(*w, x, events, rng);
    // An accepted element is held until its next renewal.
    ElementSet held;
    int bad = 0;
    for (const auto& r : rows) {
        held = held.without(r.element);
        if (r.accepted) held = held.with(r.element);
        if (!env.is_feasible(held)) ++bad;
    }
    emit(o, trace_text(rows));
    if (bad) std::cerr << bad << " events left an infeasible held set\n";
    return bad ? kViolation : kPass;
}

int cmd_estimate(const Options& o) {
    const Instance inst = load_instance(o);
    const auto x = inst.x();
    const int n = inst.environment().size();
    const double alpha = alpha_for(o, inst);
    const WitnessPtr w = make_witness(inst, parse_witness_source(o.witness), alpha, o.scale);
    ExperimentConfig config;
    config.seed = o.seed;
    config.samples = o.samples;
    if (o.tol) config.tol = *o.tol;
    config.alpha = alpha;
    config.mode = parse_mode(o.mode);
    config.instance_id = inst.name + "-" + std::to_string(inst.seed);
    if (config.samples < 1) throw InputError("--samples must be at least 1");
    if (!(config.tol > 0)) throw InputError("--tol must be positive");

    ResultRecord rec;
    if (o.stationarity) {
        std::vector<OrderStrategy> orders;
        for (std::uint64_t i = 0; i < 5; ++i) orders.push_back(OrderStrategy::seeded_random(o.seed + i));
        rec = estimate_stationarity(*w, x, orders, config);
    } else {
        std::vector<Replication> reps;
        rec = estimate_selectability(*w, x, parse_order(o.order, n, o.seed), config, o.trace_out.empty() ? nullptr : &reps);
        if (!o.trace_out.empty()) {
            std::ofstream file(o.trace_out);
            if (!file) throw InputError("cannot write '" + o.trace_out + "'");
            write_replications(file, reps);
        }
    }
    emit(o, o.summary ? record_summary(rec) : record_json(rec));
    return rec.pass ? kPass : kViolation;
}

int cmd_verify_lp(const Options& o) {
    const Instance inst = load_instance(o);
    const WitnessSource source = parse_witness_source(o.witness);
    const double alpha = alpha_for(o, inst);
    const bool exact_mode = parse_mode(o.mode) == Mode::Exact;

    if (exact_mode) {
        std::optional<RationalDistribution> dist;
        Rational target = exact(alpha);
        if (source == WitnessSource::MaxEnt) {
            DualOptions options;
            options.tol = o.tol ? *o.tol : 1e-13;
            dist = maxent_witness(inst, alpha, o.headroom, options).materialize_exact();
        } else if (source == WitnessSource::Lp) {
            auto lp = solve_stationary_lp_exact(inst.environment(), inst.x_exact);
            if (!o.alpha) target = lp.alpha;
            dist = std::move(lp.witness);
        } else {
            RayleighBuildOptions options;
            options.scale = o.scale;
            options.dual.tol = 1e-12;
            dist = materialize_exact(build_witness(default_base(inst), inst.x(), options));
        }
        const auto report = verify_stationary_lp(*dist, std::span<const Rational>(inst.x_exact), target);
        emit(o, report_json(report));
        return report.holds() ? kPass : kViolation;
    }
    const WitnessPtr w = make_witness(inst, source, alpha, o.scale);
    const auto x = inst.x();
    const auto report = verify_stationary_lp(w->law(), std::span<const double>(x), alpha, o.tol ? *o.tol : 1e-12);
    emit(o, report_json(report));
    return report.holds() ? kPass : kViolation;
}

int cmd_lp_exact(const Options& o) {
    const Instance inst = load_instance(o);
    const auto lp = solve_stationary_lp_exact(inst.environment(), inst.x_exact);
    json table = json::array();
    for (const auto& [s, p] : lp.witness.entries()) table.push_back({{"set", to_string(s)}, {"p", to_string(p)}});
    json doc{{"instance", inst.name},
             {"alpha", to_string(lp.alpha)},
             {"alpha_double", lp.alpha.get_d()},
             {"constraints", lp.constraints},
             {"pivots", lp.pivots},
             {"witness", table}};
    emit(o, doc.dump(2));
    return kPass;
}

int cmd_alpha_table(const Options& o) {
    std::ostringstream out;
    out << "kind,params,value\n" << std::setprecision(12);
    for (const auto& row : alpha_table(o.alpha_kind, o.k, o.scale, o.max_edge_size))
        out << row.kind << ",\"" << row.params << "\"," << row.value << '\n';
    emit(o, out.str());
    return kPass;
}

int cmd_barriers(const Options& o) {
    const BarrierReport r = run_barriers(o.seed);
    emit(o, barrier_json(r));
    return r.pass ? kPass : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stationary online contention resolution: witnesses, policies, and verification"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    int code = kPass;

    app.add_option("--seed", o.seed, "Random seed");
    app.add_option("--samples", o.samples, "Monte-Carlo replications")->check(CLI::PositiveNumber);
    app.add_option("--tol", o.tol, "Tolerance (solver or check, per subcommand)")->check(CLI::PositiveNumber);
    app.add_option("--alpha", o.alpha, "Target selectability; defaults to the closed form for the instance kind")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--mode", o.mode, "exact | mc")->check(CLI::IsMember({"exact", "mc"}));
    app.add_option("--out", o.out, "Output file (default stdout)");
    app.add_option("--instance", o.instance_file, "Instance document")->check(CLI::ExistingFile);
    app.add_option("--gen", o.generator, "Named generator used as the instance source");
    app.add_option("--param", o.params, "Generator parameter key=value (repeatable)");
    app.add_option("--witness", o.witness, "maxent | lp | rayleigh")->check(CLI::IsMember({"maxent", "lp", "rayleigh"}));
    app.add_option("--order", o.order, "ascending | descending | random | chase | greedy-blocker | target-last:E | fixed:E,...");
    app.add_option("--scale", o.scale, "Activation scale b")->check(CLI::PositiveNumber);
    app.add_option("--replay", o.replay, "Trace file to replay (element,renewal,active,accepted)")->check(CLI::ExistingFile);

    auto run = [&](CLI::App* sub, auto fn) { sub->callback([&, fn] { code = fn(o); }); };

    auto* gen = app.add_subcommand("gen", "Generate a named instance");
    gen->add_option("name", o.gen_name, "Generator name")->required();
    run(gen, cmd_gen);

    auto* maxent = app.add_subcommand("solve-maxent", "Max-entropy witness with marginals alpha x");
    maxent->add_option("--p", o.q, "Explicit target marginals, comma separated");
    maxent->add_option("--solver-trace", o.solver_trace, "Write iteration,grad_inf,step rows");
    run(maxent, cmd_solve_maxent);

    auto* kl = app.add_subcommand("kl-project", "Tilt the base measure toward a base point");
    kl->add_option("--q", o.q, "Base point, comma separated (default: dominating point of x / b)");
    run(kl, cmd_kl_project);

    run(app.add_subcommand("dominate", "Greedy base point dominating x / b"), cmd_dominate);
    run(app.add_subcommand("build-rayleigh", "Thinned tilted-base witness for a matroid instance"), cmd_build_rayleigh);
    run(app.add_subcommand("run-policy", "One online run; writes the trace"), cmd_run_policy);
    run(app.add_subcommand("run-recurring", "Replay a renewal event file"), cmd_run_recurring);

    auto* est = app.add_subcommand("estimate", "Selectability (or stationarity) of the policy");
    est->add_flag("--stationarity", o.stationarity, "TV of the output law under 5 seeded random orders");
    est->add_option("--trace-out", o.trace_out, "Write per-replication rows");
    est->add_flag("--summary", o.summary, "One flat row instead of the full record");
    run(est, cmd_estimate);

    auto* verify = app.add_subcommand("verify-lp", "Check marginals and caps of a witness");
    verify->add_option("--headroom", o.headroom, "Relative marginal headroom for exact max-entropy checks");
    run(verify, cmd_verify_lp);

    run(app.add_subcommand("lp-exact", "Exact stationary LP optimum"), cmd_lp_exact);

    auto* table = app.add_subcommand("alpha-table", "Closed-form selectability constants");
    table->add_option("--kind", o.alpha_kind, "uniform | bipartite | hypergraph | matching | rayleigh | greedy | all");
    table->add_option("--k", o.k, "Uniform rank")->check(CLI::PositiveNumber);
    table->add_option("--L", o.max_edge_size, "Max hyperedge size")->check(CLI::PositiveNumber);
    run(table, cmd_alpha_table);

    run(app.add_subcommand("barriers", "Hat-graph and K4 barrier checks"), cmd_barriers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const TooLargeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const CapViolationError& e) {
        std::cerr << e.what() << '\n';
        return kViolation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kViolation;
    }
    return code;
}
