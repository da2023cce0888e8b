#include "efx/generate.hpp"

#include <algorithm>
#include <numeric>

#include "efx/rng.hpp"

namespace efx {

const char* family_name(Family f) {
    switch (f) {
        case Family::Bipartite: return "bipartite";
        case Family::Bounded: return "bounded";
        case Family::Girth6: return "girth6";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "bipartite") return Family::Bipartite;
    if (name == "bounded") return Family::Bounded;
    if (name == "girth6") return Family::Girth6;
    throw InputError("unknown family '" + name + "' (expected bipartite|bounded|girth6)");
}

Regime regime_of(Family f) {
    switch (f) {
        case Family::Bipartite: return Regime::Bipartite;
        case Family::Bounded: return Regime::BoundedNeighbors;
        case Family::Girth6: return Regime::Girth6;
    }
    throw InputError("unknown family");
}

ValuationFamily valuation_family_from_name(const std::string& name) {
    if (name == "additive") return ValuationFamily::Additive;
    if (name == "monotone") return ValuationFamily::Monotone;
    throw InputError("unknown valuation family '" + name + "' (expected additive|monotone)");
}

const char* valuation_family_name(ValuationFamily f) {
    return f == ValuationFamily::Additive ? "additive" : "monotone";
}

namespace {

using PairList = std::vector<std::pair<VertexId, VertexId>>;

// Expand chosen vertex pairs into parallel edges within the budget.
PairList with_multiplicities(const PairList& chosen, const GenParams& params, Rng& rng) {
    PairList edges;
    for (auto [a, b] : chosen) {
        int mult = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(params.max_multiplicity)));
        for (int k = 0; k < mult && static_cast<int>(edges.size()) < params.max_edges; ++k)
            edges.emplace_back(a, b);
    }
    return edges;
}

PairList bipartite_pairs(const GenParams& params, Rng& rng) {
    int n = params.n;
    int side_a = (n + 1) / 2;
    if (n < 2) throw InputError("bipartite family needs n >= 2");
    PairList chosen;
    auto add = [&](VertexId a, VertexId b) {
        if (!std::count(chosen.begin(), chosen.end(), std::make_pair(a, b)))
            chosen.emplace_back(a, b);
    };
    for (VertexId b = side_a; b < n; ++b)
        add(static_cast<VertexId>(rng.below(side_a)), b);
    for (VertexId a = 0; a < side_a; ++a) {
        bool connected = false;
        for (auto [x, y] : chosen)
            if (x == a) connected = true;
        if (!connected && n > side_a)
            add(a, side_a + static_cast<VertexId>(rng.below(n - side_a)));
    }
    int extras = static_cast<int>(rng.below(static_cast<std::uint64_t>(n) + 1));
    for (int k = 0; k < extras; ++k)
        add(static_cast<VertexId>(rng.below(side_a)),
            side_a + static_cast<VertexId>(rng.below(std::max(1, n - side_a))));
    return chosen;
}

PairList bounded_pairs(const GenParams& params, Rng& rng) {
    int n = params.n;
    bool relaxed = params.max_multiplicity <= 2;
    int bound = relaxed ? n / 4 : (n + 3) / 4 - 1;
    if (params.neighbors > bound)
        throw InputError("bounded family: " + std::to_string(params.neighbors) +
                         " neighbors exceed the bound " + std::to_string(bound) + " for n = " +
                         std::to_string(n) +
                         (relaxed ? " (floor(n/4), max multiplicity 2)" : " (ceil(n/4)-1)"));
    if (params.neighbors < 1) throw InputError("bounded family: neighbor cap must be >= 1");
    std::vector<int> degree(n, 0);
    PairList chosen;
    // A shuffled near-perfect matching seeds one neighbor per vertex, then
    // extra pairs fill in while the caps allow.
    std::vector<VertexId> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int k = n - 1; k > 0; --k)
        std::swap(order[k], order[rng.below(static_cast<std::uint64_t>(k) + 1)]);
    for (int k = 0; k + 1 < n; k += 2) {
        auto [a, b] = std::minmax(order[k], order[k + 1]);
        chosen.emplace_back(a, b);
        degree[a]++;
        degree[b]++;
    }
    int attempts = 4 * n;
    while (attempts-- > 0) {
        VertexId a = static_cast<VertexId>(rng.below(n));
        VertexId b = static_cast<VertexId>(rng.below(n));
        if (a == b) continue;
        auto key = std::minmax(a, b);
        if (std::count(chosen.begin(), chosen.end(), std::make_pair(key.first, key.second))) continue;
        if (degree[a] >= params.neighbors || degree[b] >= params.neighbors) continue;
        chosen.emplace_back(key.first, key.second);
        degree[a]++;
        degree[b]++;
    }
    return chosen;
}

PairList girth6_pairs(const GenParams& params, Rng& rng) {
    int n = params.n;
    if (n < 2) throw InputError("girth6 family needs n >= 2");
    PairList chosen;
    bool use_cycle = n >= 6 && rng.below(2) == 0;
    std::vector<VertexId> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int k = n - 1; k > 0; --k)
        std::swap(order[k], order[rng.below(static_cast<std::uint64_t>(k) + 1)]);
    if (use_cycle) {
        for (int k = 0; k < n; ++k) {
            auto [a, b] = std::minmax(order[k], order[(k + 1) % n]);
            chosen.emplace_back(a, b);
        }
    } else {
        // Random tree: simple girth is infinite.
        for (int k = 1; k < n; ++k) {
            auto [a, b] = std::minmax(order[k], order[rng.below(static_cast<std::uint64_t>(k))]);
            chosen.emplace_back(a, b);
        }
    }
    return chosen;
}

}  // namespace

MultigraphInstance generate_instance(Family family, const GenParams& params, std::uint64_t seed) {
    if (params.n < 1) throw InputError("n must be positive");
    if (params.max_multiplicity < 1) throw InputError("max multiplicity must be >= 1");
    Rng rng(Rng::mix(seed, 0x696e7374ULL));
    PairList chosen;
    switch (family) {
        case Family::Bipartite: chosen = bipartite_pairs(params, rng); break;
        case Family::Bounded: chosen = bounded_pairs(params, rng); break;
        case Family::Girth6: chosen = girth6_pairs(params, rng); break;
    }
    PairList edges = with_multiplicities(chosen, params, rng);
    MultigraphInstance inst = build_instance(params.n, edges);
    RegimeReport report = detect_regimes(inst);
    if (!report.applies(regime_of(family)))
        throw InvariantError(std::string("generated instance does not satisfy the ") +
                             family_name(family) + " regime");
    return inst;
}

ValuationProfile generate_valuation(const MultigraphInstance& inst, ValuationFamily family,
                                    std::uint64_t seed, Value scale) {
    if (family == ValuationFamily::Additive) return make_seeded_additive(inst, seed, scale);
    return make_seeded_monotone(inst, seed, scale);
}

}  // namespace efx
