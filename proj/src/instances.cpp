#include "socrs/instances.hpp"

#include "socrs/errors.hpp"
#include "socrs/sampling.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <set>

namespace socrs {

using nlohmann::json;

Environment Instance::environment() const {
    if (kind == "general-matching") return Environment::general_matching(vertices, edges);
    if (kind == "bipartite-matching") return Environment::bipartite_matching(vertices, edges, side);
    if (kind == "hypergraph-matching") return Environment::hypergraph_matching(vertices, hyperedges);
    if (kind == "k-uniform") return Environment::k_uniform(n, k);
    if (kind == "graphic-matroid" || kind == "linear-matroid") return Environment::matroid(matroid());
    throw InputError("unknown instance kind '" + kind + "'");
}

std::shared_ptr<const Matroid> Instance::matroid() const {
    if (kind == "graphic-matroid") return std::make_shared<Matroid>(Matroid::graphic(vertices, edges));
    if (kind == "linear-matroid") return std::make_shared<Matroid>(Matroid::linear(matrix));
    throw InputError("instance kind '" + kind + "' is not a matroid");
}

// ---------------------------------------------------------------- documents

std::string instance_to_json(const Instance& inst) {
    json doc;
    doc["name"] = inst.name;
    doc["kind"] = inst.kind;
    if (inst.vertices) doc["vertices"] = inst.vertices;
    if (!inst.edges.empty()) {
        json edges = json::array();
        for (const auto& [u, v] : inst.edges) edges.push_back({u, v});
        doc["edges"] = edges;
    }
    if (!inst.side.empty()) doc["side"] = inst.side;
    if (!inst.hyperedges.empty()) doc["hyperedges"] = inst.hyperedges;
    if (inst.kind == "k-uniform") {
        doc["n"] = inst.n;
        doc["k"] = inst.k;
    }
    if (!inst.matrix.empty()) doc["matrix"] = inst.matrix;
    json x = json::array();
    for (const auto& v : inst.x_exact) x.push_back(to_string(v));
    doc["x"] = x;
    if (!inst.params.empty()) doc["params"] = inst.params;
    doc["seed"] = inst.seed;
    return doc.dump(2);
}

Instance instance_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& err) {
        throw InputError(std::string("instance document is not valid JSON: ") + err.what());
    }
    if (!doc.is_object()) throw InputError("instance document must be an object");
    static const std::set<std::string> known = {"name", "kind",   "vertices", "edges", "side", "hyperedges",
                                                "n",    "k",      "matrix",   "x",     "params", "seed"};
    for (const auto& [key, value] : doc.items())
        if (!known.count(key)) throw InputError("unknown field '" + key + "' in instance document");
    Instance inst;
    try {
        inst.name = doc.value("name", std::string("unnamed"));
        inst.kind = doc.at("kind").get<std::string>();
        inst.vertices = doc.value("vertices", 0);
        if (doc.contains("edges"))
            for (const auto& e : doc["edges"]) {
                if (!e.is_array() || e.size() != 2) throw InputError("edges must be vertex pairs");
                inst.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
            }
        if (doc.contains("side")) inst.side = doc["side"].get<std::vector<int>>();
        if (doc.contains("hyperedges")) inst.hyperedges = doc["hyperedges"].get<std::vector<std::vector<int>>>();
        inst.n = doc.value("n", 0);
        inst.k = doc.value("k", 0);
        if (doc.contains("matrix")) inst.matrix = doc["matrix"].get<RealMatrix>();
        for (const auto& v : doc.at("x")) {
            if (v.is_string()) inst.x_exact.push_back(parse_rational(v.get<std::string>()));
            else if (v.is_number()) inst.x_exact.push_back(exact(v.get<double>()));
            else throw InputError("x entries must be numbers or \"p/q\" strings");
        }
        if (doc.contains("params"))
            for (const auto& [key, value] : doc["params"].items())
                inst.params[key] = value.is_string() ? value.get<std::string>() : value.dump();
        inst.seed = doc.value("seed", std::uint64_t{0});
    } catch (const json::exception& err) {
        throw InputError(std::string("malformed instance document: ") + err.what());
    }
    const Environment env = inst.environment();
    if (static_cast<int>(inst.x_exact.size()) != env.size())
        throw InputError("x has " + std::to_string(inst.x_exact.size()) + " entries for " + std::to_string(env.size()) +
                         " elements");
    for (const auto& v : inst.x_exact)
        if (sgn(v) <= 0 || v > 1) throw InputError("x entries must lie in (0, 1]");
    return inst;
}

// ---------------------------------------------------------------- named instances

Instance bipartite_impossibility(int n) {
    if (n < 2) throw InputError("bipartite-impossibility needs n >= 2");
    Instance inst;
    inst.name = "bipartite-impossibility-" + std::to_string(n);
    inst.kind = "bipartite-matching";
    // a = 0, u_i = i, v_i = n + i.
    inst.vertices = 2 * n + 1;
    inst.side.assign(static_cast<std::size_t>(inst.vertices), 1);
    for (int i = 0; i <= n; ++i) inst.side[i] = 0;
    const Rational eps = fraction(1, n);
    for (int i = 1; i <= n; ++i) inst.edges.emplace_back(0, n + i);
    for (int i = 1; i <= n; ++i) inst.edges.emplace_back(i, n + i);
    inst.x_exact.assign(static_cast<std::size_t>(n), eps);
    inst.x_exact.resize(static_cast<std::size_t>(2 * n), 1 - eps);
    inst.params = {{"n", std::to_string(n)}, {"eps", to_string(eps)}};
    return inst;
}

Instance k4_barrier(const Rational& eps) {
    if (sgn(eps) <= 0 || eps >= fraction(1, 2)) throw InputError("K4-barrier needs eps in (0, 1/2)");
    Instance inst;
    inst.name = "K4-barrier";
    inst.kind = "general-matching";
    inst.vertices = 4;
    inst.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}};
    const Rational outer = (1 - eps) / 2;
    inst.x_exact = {outer, outer, outer, outer, eps, eps};
    inst.params = {{"eps", to_string(eps)}};
    return inst;
}

Instance hat_graph(int n, bool terminal_edge, const Rational& terminal_x) {
    if (n < 1) throw InputError("hat-graph needs n >= 1");
    Instance inst;
    inst.name = "hat-graph-" + std::to_string(n);
    inst.kind = "graphic-matroid";
    inst.vertices = n + 2;
    for (int i = 0; i < n; ++i) {
        inst.edges.emplace_back(0, 2 + i);
        inst.edges.emplace_back(2 + i, 1);
    }
    inst.x_exact.assign(static_cast<std::size_t>(2 * n), fraction(1, 2));
    if (terminal_edge) {
        inst.edges.emplace_back(0, 1);
        inst.x_exact.push_back(terminal_x);
    }
    inst.params = {{"n", std::to_string(n)}, {"terminal_edge", terminal_edge ? "1" : "0"}};
    return inst;
}

Instance symmetric_uniform(int n, int k) {
    if (k < 1 || n < k) throw InputError("symmetric-uniform needs 1 <= k <= n");
    Instance inst;
    inst.name = "symmetric-uniform-" + std::to_string(n) + "-" + std::to_string(k);
    inst.kind = "k-uniform";
    inst.n = n;
    inst.k = k;
    inst.x_exact.assign(static_cast<std::size_t>(n), fraction(k, n));
    inst.params = {{"n", std::to_string(n)}, {"k", std::to_string(k)}};
    return inst;
}

// ---------------------------------------------------------------- random instances

namespace {

std::vector<Edge> random_pairs(int vertices, int edges, RngStream& rng, const std::vector<int>* side = nullptr) {
    std::vector<Edge> pool;
    for (int u = 0; u < vertices; ++u)
        for (int v = u + 1; v < vertices; ++v)
            if (!side || (*side)[u] != (*side)[v]) pool.emplace_back(u, v);
    if (edges > static_cast<int>(pool.size())) throw InputError("more edges requested than vertex pairs available");
    for (int i = 0; i < edges; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    pool.resize(static_cast<std::size_t>(edges));
    std::sort(pool.begin(), pool.end());
    return pool;
}

// Greedy maximal feasible set along a random order, optionally seeded with one element.
ElementSet random_maximal(const Environment& env, RngStream& rng, int first) {
    std::vector<int> order(static_cast<std::size_t>(env.size()));
    std::iota(order.begin(), order.end(), 0);
    for (int i = env.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    ElementSet s;
    if (first >= 0) s = ElementSet::single(first);
    for (int e : order)
        if (!s.contains(e) && env.can_add(s, e)) s = s.with(e);
    return s;
}

// x = s * sum_j lambda_j 1[M_j], one maximal set through each element plus a few free ones.
void fill_convex_x(Instance& inst, RngStream& rng, double scale_lo) {
    const Environment env = inst.environment();
    const int n = env.size();
    std::vector<ElementSet> sets;
    for (int e = 0; e < n; ++e) sets.push_back(random_maximal(env, rng, e));
    for (int j = 0; j < 3; ++j) sets.push_back(random_maximal(env, rng, -1));
    std::vector<long> weight;
    long total = 0;
    for (std::size_t j = 0; j < sets.size(); ++j) {
        weight.push_back(1 + static_cast<long>(rng.below(9)));
        total += weight.back();
    }
    const long lo = std::lround(std::clamp(scale_lo, 0.01, 1.0) * 100);
    const Rational scale = fraction(lo + static_cast<long>(rng.below(static_cast<std::uint64_t>(101 - lo))), 100);
    inst.x_exact.assign(static_cast<std::size_t>(n), Rational(0));
    for (std::size_t j = 0; j < sets.size(); ++j)
        sets[j].for_each([&](int e) { inst.x_exact[e] += fraction(weight[j], total); });
    for (auto& v : inst.x_exact) v *= scale;
    inst.params["scale"] = to_string(scale);
}

}  // namespace

Instance random_graph(int vertices, int edges, std::uint64_t seed, double scale_lo) {
    RngStream rng(seed, 0);
    Instance inst;
    inst.name = "random-graph";
    inst.kind = "general-matching";
    inst.vertices = vertices;
    inst.edges = random_pairs(vertices, edges, rng);
    inst.seed = seed;
    inst.params = {{"vertices", std::to_string(vertices)}, {"edges", std::to_string(edges)}};
    fill_convex_x(inst, rng, scale_lo);
    return inst;
}

Instance random_bipartite(int left, int right, int edges, std::uint64_t seed, double scale_lo) {
    RngStream rng(seed, 0);
    Instance inst;
    inst.name = "random-bipartite";
    inst.kind = "bipartite-matching";
    inst.vertices = left + right;
    inst.side.assign(static_cast<std::size_t>(left), 0);
    inst.side.resize(static_cast<std::size_t>(left + right), 1);
    inst.edges = random_pairs(inst.vertices, edges, rng, &inst.side);
    inst.seed = seed;
    inst.params = {{"left", std::to_string(left)}, {"right", std::to_string(right)}, {"edges", std::to_string(edges)}};
    fill_convex_x(inst, rng, scale_lo);
    return inst;
}

Instance random_hypergraph(int vertices, int edges, int max_edge_size, std::uint64_t seed, double scale_lo) {
    if (max_edge_size < 2 || max_edge_size > vertices) throw InputError("hyperedge size must lie in [2, vertices]");
    RngStream rng(seed, 0);
    Instance inst;
    inst.name = "random-hypergraph";
    inst.kind = "hypergraph-matching";
    inst.vertices = vertices;
    std::set<std::vector<int>> seen;
    int attempts = 0;
    while (static_cast<int>(inst.hyperedges.size()) < edges) {
        if (++attempts > 1000 * edges) throw InputError("could not draw enough distinct hyperedges");
        const int size = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_edge_size - 1)));
        std::vector<int> all(static_cast<std::size_t>(vertices));
        std::iota(all.begin(), all.end(), 0);
        for (int i = 0; i < size; ++i) std::swap(all[i], all[i + rng.below(all.size() - i)]);
        std::vector<int> h(all.begin(), all.begin() + size);
        std::sort(h.begin(), h.end());
        if (seen.insert(h).second) inst.hyperedges.push_back(h);
    }
    inst.seed = seed;
    inst.params = {{"vertices", std::to_string(vertices)}, {"edges", std::to_string(edges)}, {"L", std::to_string(max_edge_size)}};
    fill_convex_x(inst, rng, scale_lo);
    return inst;
}

Instance graphic_with_random_x(int vertices, std::vector<Edge> edges, std::uint64_t seed, double scale_lo) {
    RngStream rng(seed, 0);
    Instance inst;
    inst.name = "graphic";
    inst.kind = "graphic-matroid";
    inst.vertices = vertices;
    inst.edges = std::move(edges);
    inst.seed = seed;
    fill_convex_x(inst, rng, scale_lo);
    return inst;
}

Instance random_graphic_matroid(int vertices, int edges, std::uint64_t seed, double scale_lo) {
    RngStream rng(seed, 1);
    auto inst = graphic_with_random_x(vertices, random_pairs(vertices, edges, rng), seed, scale_lo);
    inst.name = "random-graphic-matroid";
    inst.params["vertices"] = std::to_string(vertices);
    inst.params["edges"] = std::to_string(edges);
    return inst;
}

Instance gen_instance(const std::string& name, const std::map<std::string, std::string>& params, std::uint64_t seed) {
    auto get = [&](const std::string& key, const std::string& fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    auto get_int = [&](const std::string& key, int fallback) {
        const std::string v = get(key, std::to_string(fallback));
        try {
            std::size_t used = 0;
            const int out = std::stoi(v, &used);
            if (used != v.size()) throw InputError("");
            return out;
        } catch (const std::exception&) {
            throw InputError("parameter '" + key + "' must be an integer, got '" + v + "'");
        }
    };
    const double scale_lo = parse_rational(get("scale_lo", "1/2")).get_d();
    if (name == "bipartite-impossibility") return bipartite_impossibility(get_int("n", 5));
    if (name == "K4-barrier") return k4_barrier(parse_rational(get("eps", "1/10")));
    if (name == "hat-graph")
        return hat_graph(get_int("n", 3), get_int("terminal_edge", 0) != 0, parse_rational(get("terminal_x", "1/1000")));
    if (name == "symmetric-uniform") return symmetric_uniform(get_int("n", 6), get_int("k", 2));
    if (name == "random-graph") return random_graph(get_int("vertices", 5), get_int("edges", 6), seed, scale_lo);
    if (name == "random-bipartite")
        return random_bipartite(get_int("left", 3), get_int("right", 3), get_int("edges", 6), seed, scale_lo);
    if (name == "random-hypergraph")
        return random_hypergraph(get_int("vertices", 6), get_int("edges", 6), get_int("L", 3), seed, scale_lo);
    if (name == "random-graphic-matroid") return random_graphic_matroid(get_int("vertices", 4), get_int("edges", 5), seed, scale_lo);
    throw InputError("unknown generator '" + name + "'");
}

}  // namespace socrs
