#include "socrs/pipeline.hpp"

#include "socrs/alpha.hpp"
#include "socrs/errors.hpp"
#include "socrs/lp.hpp"

namespace socrs {

double default_alpha(const Instance& inst) {
    if (inst.kind == "general-matching") return kGeneralMatchingAlpha;
    if (inst.kind == "bipartite-matching") return bipartite_alpha();
    if (inst.kind == "hypergraph-matching") return hypergraph_alpha(inst.environment().rank_bound());
    if (inst.kind == "k-uniform") return uniform_alpha(inst.k);
    return rayleigh_alpha();
}

GibbsDistribution maxent_witness(const Instance& inst, double alpha, double headroom, const DualOptions& options) {
    if (!(alpha > 0 && alpha <= 1)) throw InputError("alpha must lie in (0, 1]");
    const Environment env = inst.environment();
    const std::vector<double> x = inst.x();
    std::vector<double> p(x.size());
    for (std::size_t e = 0; e < x.size(); ++e) p[e] = alpha * x[e] * (1.0 + headroom);
    return solve_maxent(env, oracle_for(env), p, options);
}

BaseMeasure default_base(const Instance& inst) {
    if (inst.kind == "graphic-matroid") return BaseMeasure::uniform_spanning_tree(inst.matroid());
    if (inst.kind == "linear-matroid") return BaseMeasure::determinantal(inst.matrix);
    throw InputError("no base measure for instance kind '" + inst.kind + "'");
}

WitnessSource parse_witness_source(const std::string& name) {
    if (name == "maxent") return WitnessSource::MaxEnt;
    if (name == "lp") return WitnessSource::Lp;
    if (name == "rayleigh") return WitnessSource::Rayleigh;
    throw InputError("unknown witness source '" + name + "' (maxent | lp | rayleigh)");
}

WitnessPtr make_witness(const Instance& inst, WitnessSource source, double alpha, double scale) {
    switch (source) {
        case WitnessSource::MaxEnt: return std::make_shared<GibbsWitness>(maxent_witness(inst, alpha));
        case WitnessSource::Lp: {
            const auto lp = solve_stationary_lp_exact(inst.environment(), inst.x_exact);
            return std::make_shared<ExplicitWitness>(to_double(lp.witness));
        }
        case WitnessSource::Rayleigh: {
            RayleighBuildOptions options;
            options.scale = scale;
            options.dual.tol = 1e-12;
            return std::make_shared<RayleighPolicyWitness>(build_witness(default_base(inst), inst.x(), options));
        }
    }
    throw InputError("unknown witness source");
}

}  // namespace socrs
