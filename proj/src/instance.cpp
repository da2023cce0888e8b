#include "efx/instance.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace efx {

EdgeMask mask_of(const std::vector<EdgeId>& edges) {
    EdgeMask m = 0;
    for (EdgeId e : edges) m |= edge_bit(e);
    return m;
}

std::vector<EdgeId> edges_of(EdgeMask mask) {
    std::vector<EdgeId> out;
    for (EdgeId e = 0; mask; ++e, mask >>= 1)
        if (mask & 1) out.push_back(e);
    return out;
}

EdgeMask MultigraphInstance::dummy_mask() const {
    EdgeMask m = 0;
    for (int e = 0; e < total_edges(); ++e)
        if (edges[e].dummy) m |= edge_bit(e);
    return m;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Bipartite: return "bipartite";
        case Regime::Girth6: return "girth6";
        case Regime::BoundedNeighbors: return "bounded";
    }
    return "?";
}

MultigraphInstance build_instance(int n, const std::vector<std::pair<VertexId, VertexId>>& raw_edges) {
    if (n < 0) throw InputError("vertex count must be nonnegative");
    MultigraphInstance inst;
    inst.n = n;
    for (std::size_t idx = 0; idx < raw_edges.size(); ++idx) {
        auto [a, b] = raw_edges[idx];
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw InputError("edge " + std::to_string(idx) + ": endpoint out of range");
        if (a == b)
            throw InputError("edge " + std::to_string(idx) + ": self-loop not allowed");
        inst.edges.push_back({a, b, false});
    }
    inst.real_edge_count = static_cast<int>(inst.edges.size());

    std::map<std::pair<VertexId, VertexId>, std::vector<EdgeId>> classes;
    for (int e = 0; e < inst.real_edge_count; ++e) {
        auto [a, b] = std::minmax(inst.edges[e].a, inst.edges[e].b);
        classes[{a, b}].push_back(e);
    }
    // Singleton classes get a dummy partner so every pair class can be
    // bipartitioned into two nonempty bundles.
    for (auto& [key, ids] : classes) {
        if (ids.size() == 1) {
            EdgeId d = static_cast<EdgeId>(inst.edges.size());
            inst.edges.push_back({key.first, key.second, true});
            ids.push_back(d);
        }
    }
    if (inst.edges.size() > static_cast<std::size_t>(kMaxEdges))
        throw InputError("too many edges: " + std::to_string(inst.edges.size()) +
                         " (limit " + std::to_string(kMaxEdges) + " including dummies)");

    inst.adjacency.assign(n, {});
    inst.incident_pairs.assign(n, {});
    inst.relevant.assign(n, 0);
    inst.relevant_real.assign(n, 0);
    for (auto& [key, ids] : classes) {
        PairClass pc;
        pc.u = key.first;
        pc.v = key.second;
        pc.edge_ids = ids;
        std::sort(pc.edge_ids.begin(), pc.edge_ids.end());
        for (EdgeId e : pc.edge_ids)
            if (!inst.edges[e].dummy) pc.real_count++;
        int pi = static_cast<int>(inst.pairs.size());
        inst.pair_lookup[key] = pi;
        inst.incident_pairs[pc.u].push_back(pi);
        inst.incident_pairs[pc.v].push_back(pi);
        inst.adjacency[pc.u].push_back(pc.v);
        inst.adjacency[pc.v].push_back(pc.u);
        for (EdgeId e : pc.edge_ids) {
            inst.relevant[pc.u] |= edge_bit(e);
            inst.relevant[pc.v] |= edge_bit(e);
            if (!inst.edges[e].dummy) {
                inst.relevant_real[pc.u] |= edge_bit(e);
                inst.relevant_real[pc.v] |= edge_bit(e);
            }
        }
        inst.pairs.push_back(std::move(pc));
    }
    for (int v = 0; v < n; ++v) {
        std::sort(inst.adjacency[v].begin(), inst.adjacency[v].end());
        if (inst.adjacency[v].empty()) inst.isolated.push_back(v);
    }
    return inst;
}

namespace {

// Girth of the simple projection via BFS from every vertex: for the root on a
// shortest cycle the two arms are vertex-disjoint, so the minimum over roots
// of depth(u) + depth(w) + 1 across non-tree edges is exact.
int simple_girth(const MultigraphInstance& inst) {
    int best = kGirthInfinity;
    for (VertexId root = 0; root < inst.n; ++root) {
        std::vector<int> dist(inst.n, -1), parent(inst.n, -1);
        std::deque<VertexId> queue{root};
        dist[root] = 0;
        while (!queue.empty()) {
            VertexId u = queue.front();
            queue.pop_front();
            for (VertexId w : inst.adjacency[u]) {
                if (dist[w] == -1) {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if (w != parent[u] && u < w) {
                    best = std::min(best, dist[u] + dist[w] + 1);
                }
            }
        }
    }
    return best;
}

}  // namespace

RegimeReport detect_regimes(const MultigraphInstance& inst) {
    RegimeReport rep;
    rep.coloring.assign(inst.n, -1);
    rep.is_bipartite = true;
    for (VertexId root = 0; root < inst.n; ++root) {
        if (rep.coloring[root] != -1 || inst.adjacency[root].empty()) continue;
        rep.coloring[root] = 0;
        std::deque<VertexId> queue{root};
        while (!queue.empty()) {
            VertexId u = queue.front();
            queue.pop_front();
            for (VertexId w : inst.adjacency[u]) {
                if (rep.coloring[w] == -1) {
                    rep.coloring[w] = 1 - rep.coloring[u];
                    queue.push_back(w);
                } else if (rep.coloring[w] == rep.coloring[u]) {
                    rep.is_bipartite = false;
                }
            }
        }
    }

    for (VertexId v = 0; v < inst.n; ++v)
        rep.max_neighbors = std::max(rep.max_neighbors, static_cast<int>(inst.adjacency[v].size()));
    bool at_most_two_parallel = true;
    for (const PairClass& pc : inst.pairs)
        if (pc.real_count > 2) at_most_two_parallel = false;
    // The two-bundles-per-pair special case admits the relaxed bound.
    rep.neighbor_bound = at_most_two_parallel ? inst.n / 4 : (inst.n + 3) / 4 - 1;
    rep.neighbor_bound_ok = rep.max_neighbors <= rep.neighbor_bound;

    rep.simple_girth = simple_girth(inst);
    rep.girth_ok = rep.simple_girth >= 6;

    if (rep.is_bipartite) rep.applicable.push_back(Regime::Bipartite);
    if (rep.girth_ok) rep.applicable.push_back(Regime::Girth6);
    if (rep.neighbor_bound_ok) rep.applicable.push_back(Regime::BoundedNeighbors);
    return rep;
}

}  // namespace efx
