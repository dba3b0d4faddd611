#pragma once

#include "socrs/instances.hpp"
#include "socrs/maxent.hpp"
#include "socrs/policy.hpp"
#include "socrs/rayleigh.hpp"

#include <string>

namespace socrs {

// Closed-form selectability for the instance kind: 1/3 for graphs, the bipartite constant, 1/(L+1)
// for hypergraphs, alpha_k for k-uniform, 1/2 for matroids.
double default_alpha(const Instance& inst);

// Max-entropy law with marginals alpha x (1 + headroom). A small headroom lets the exact check pass
// at alpha despite the solver's residual.
GibbsDistribution maxent_witness(const Instance& inst, double alpha, double headroom = 0.0,
                                 const DualOptions& options = {});

// Uniform spanning trees for graphic matroids, the determinantal measure for linear ones.
BaseMeasure default_base(const Instance& inst);

enum class WitnessSource { MaxEnt, Lp, Rayleigh };

WitnessSource parse_witness_source(const std::string& name);

// maxent: Gibbs witness at alpha. lp: the exact LP optimum (alpha ignored). rayleigh: thinned tilted bases
// at the given scale (alpha ignored).
WitnessPtr make_witness(const Instance& inst, WitnessSource source, double alpha, double scale = 1.0);

}  // namespace socrs
