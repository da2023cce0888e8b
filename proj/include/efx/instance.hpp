#pragma once

#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "efx/types.hpp"

namespace efx {

struct Edge {
    VertexId a = -1;
    VertexId b = -1;
    bool dummy = false;
};

// All edges sharing the same unordered endpoint pair.
struct PairClass {
    VertexId u = -1;  // u < v
    VertexId v = -1;
    std::vector<EdgeId> edge_ids;  // ascending; includes the dummy if one was inserted
    int real_count = 0;
};

// Immutable after build_instance. Dummy edges are materialized with real ids
// so every nonempty pair class has at least two edges; they are stripped from
// reported allocations. Vertices with no incident real edge are excluded from
// the pipeline and merged back with an empty bundle.
struct MultigraphInstance {
    int n = 0;
    std::vector<Edge> edges;  // input-order real edges first, then dummies
    int real_edge_count = 0;
    std::vector<PairClass> pairs;                  // ascending (u, v)
    std::vector<std::vector<VertexId>> adjacency;  // sorted distinct neighbors
    std::vector<std::vector<int>> incident_pairs;  // per vertex, indices into pairs
    std::vector<EdgeMask> relevant;                // per vertex, incident edges incl. dummies
    std::vector<EdgeMask> relevant_real;
    std::vector<VertexId> isolated;  // no incident real edge

    int pair_index(VertexId u, VertexId v) const {
        auto it = pair_lookup.find(u < v ? std::make_pair(u, v) : std::make_pair(v, u));
        return it == pair_lookup.end() ? -1 : it->second;
    }
    int total_edges() const { return static_cast<int>(edges.size()); }
    EdgeMask dummy_mask() const;

    std::map<std::pair<VertexId, VertexId>, int> pair_lookup;
};

MultigraphInstance build_instance(int n, const std::vector<std::pair<VertexId, VertexId>>& raw_edges);

enum class Regime { Bipartite, Girth6, BoundedNeighbors };

const char* regime_name(Regime r);

constexpr int kGirthInfinity = std::numeric_limits<int>::max();

struct RegimeReport {
    bool is_bipartite = false;
    std::vector<int> coloring;  // 2-coloring witness when bipartite (-1 on isolated ok)
    int max_neighbors = 0;
    int neighbor_bound = 0;  // floor(n/4) when all classes have <= 2 real edges, else ceil(n/4)-1
    bool neighbor_bound_ok = false;
    int simple_girth = kGirthInfinity;  // shortest cycle of the simple projection
    bool girth_ok = false;              // simple_girth >= 6
    std::vector<Regime> applicable;     // in solve priority order

    bool applies(Regime r) const {
        for (Regime a : applicable)
            if (a == r) return true;
        return false;
    }
};

RegimeReport detect_regimes(const MultigraphInstance& inst);

}  // namespace efx
