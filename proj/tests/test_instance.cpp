#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <set>

#include "efx/generate.hpp"
#include "efx/instance.hpp"
#include "efx/rng.hpp"

using namespace efx;

namespace {

// Exhaustive shortest-cycle search on the simple projection, used as the
// oracle for the BFS girth.
int brute_girth(const MultigraphInstance& inst) {
    int best = kGirthInfinity;
    std::vector<char> visited(inst.n, 0);
    std::function<void(VertexId, VertexId, VertexId, int)> dfs =
        [&](VertexId start, VertexId current, VertexId previous, int length) {
            for (VertexId w : inst.adjacency[current]) {
                if (w == previous) continue;
                if (w == start && length >= 2) best = std::min(best, length + 1);
                if (w > start && !visited[w]) {
                    visited[w] = 1;
                    dfs(start, w, current, length + 1);
                    visited[w] = 0;
                }
            }
        };
    for (VertexId start = 0; start < inst.n; ++start) {
        visited[start] = 1;
        dfs(start, start, -1, 0);
        visited[start] = 0;
    }
    return best;
}

bool brute_bipartite(const MultigraphInstance& inst) {
    for (int colors = 0; colors < (1 << inst.n); ++colors) {
        bool ok = true;
        for (const PairClass& pc : inst.pairs)
            if (((colors >> pc.u) & 1) == ((colors >> pc.v) & 1)) ok = false;
        if (ok) return true;
    }
    return false;
}

MultigraphInstance random_instance(std::uint64_t seed, int max_n, int max_m) {
    Rng rng(seed);
    int n = 2 + static_cast<int>(rng.below(max_n - 1));
    int m = static_cast<int>(rng.below(max_m + 1));
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (int e = 0; e < m; ++e) {
        VertexId a = static_cast<VertexId>(rng.below(n));
        VertexId b = static_cast<VertexId>(rng.below(n));
        if (a == b) continue;
        edges.emplace_back(a, b);
    }
    return build_instance(n, edges);
}

}  // namespace

TEST_CASE("dummy insertion pads singleton pair classes") {
    auto inst = build_instance(2, {{0, 1}});
    REQUIRE(inst.pairs.size() == 1);
    CHECK(inst.pairs[0].edge_ids.size() == 2);
    CHECK(inst.real_edge_count == 1);
    CHECK(inst.edges[0].dummy == false);
    CHECK(inst.edges[1].dummy == true);
    CHECK(inst.pairs[0].real_count == 1);
}

TEST_CASE("no dummies when every class already has two edges") {
    auto inst = build_instance(3, {{0, 1}, {0, 1}, {1, 2}, {1, 2}});
    REQUIRE(inst.pairs.size() == 2);
    CHECK(inst.total_edges() == 4);
    for (const PairClass& pc : inst.pairs) {
        CHECK(pc.edge_ids.size() == 2);
        CHECK(pc.real_count == 2);
    }
}

TEST_CASE("self-loops and bad endpoints are rejected") {
    CHECK_THROWS_AS(build_instance(2, {{0, 0}}), InputError);
    CHECK_THROWS_AS(build_instance(2, {{0, 2}}), InputError);
    CHECK_THROWS_AS(build_instance(2, {{-1, 0}}), InputError);
}

TEST_CASE("pair classes partition the edge set") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto inst = random_instance(seed, 8, 12);
        std::set<EdgeId> seen;
        for (const PairClass& pc : inst.pairs)
            for (EdgeId e : pc.edge_ids) CHECK(seen.insert(e).second);
        CHECK(static_cast<int>(seen.size()) == inst.total_edges());
        for (VertexId v : inst.isolated) CHECK(inst.adjacency[v].empty());
    }
}

TEST_CASE("regime report on a two-vertex class of three edges") {
    auto inst = build_instance(2, {{0, 1}, {0, 1}, {0, 1}});
    auto rep = detect_regimes(inst);
    CHECK(rep.is_bipartite);
    CHECK(rep.simple_girth == kGirthInfinity);
    CHECK(rep.girth_ok);
    CHECK(rep.neighbor_bound == 0);  // ceil(2/4)-1, class has 3 real edges
    CHECK(rep.max_neighbors == 1);
    CHECK_FALSE(rep.neighbor_bound_ok);
}

TEST_CASE("triangle with doubled classes fails bipartite and girth gates") {
    auto inst = build_instance(3, {{0, 1}, {0, 1}, {1, 2}, {1, 2}, {0, 2}, {0, 2}});
    auto rep = detect_regimes(inst);
    CHECK_FALSE(rep.is_bipartite);
    CHECK(rep.simple_girth == 3);
    CHECK_FALSE(rep.girth_ok);
}

TEST_CASE("six-cycle with tripled classes is bipartite with girth six") {
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (int k = 0; k < 6; ++k)
        for (int copy = 0; copy < 3; ++copy) edges.emplace_back(k, (k + 1) % 6);
    auto inst = build_instance(6, edges);
    auto rep = detect_regimes(inst);
    CHECK(rep.is_bipartite);
    CHECK(rep.simple_girth == 6);
    CHECK(rep.girth_ok);
    // classes of size 3 use the strict bound
    CHECK(rep.neighbor_bound == (6 + 3) / 4 - 1);
}

TEST_CASE("relaxed neighbor bound applies only with at most two parallel edges") {
    auto doubled = build_instance(8, {{0, 1}, {0, 1}, {2, 3}, {2, 3}, {4, 5}, {4, 5}, {6, 7}, {6, 7}});
    CHECK(detect_regimes(doubled).neighbor_bound == 2);  // floor(8/4)
    auto tripled = build_instance(8, {{0, 1}, {0, 1}, {0, 1}, {2, 3}, {4, 5}, {6, 7}});
    CHECK(detect_regimes(tripled).neighbor_bound == 1);  // ceil(8/4)-1
}

TEST_CASE("BFS girth matches exhaustive cycle search") {
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        auto inst = random_instance(seed, 8, 14);
        CHECK(detect_regimes(inst).simple_girth == brute_girth(inst));
    }
}

TEST_CASE("bipartite flag matches exhaustive 2-coloring") {
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        auto inst = random_instance(seed, 8, 14);
        auto rep = detect_regimes(inst);
        CHECK(rep.is_bipartite == brute_bipartite(inst));
        if (rep.is_bipartite)
            for (const PairClass& pc : inst.pairs)
                CHECK(rep.coloring[pc.u] != rep.coloring[pc.v]);
    }
}

TEST_CASE("generated instances satisfy their requested regime") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        GenParams params;
        params.n = 4 + static_cast<int>(seed % 5);
        auto bip = generate_instance(Family::Bipartite, params, seed);
        CHECK(detect_regimes(bip).applies(Regime::Bipartite));
        auto girth = generate_instance(Family::Girth6, params, seed);
        CHECK(detect_regimes(girth).applies(Regime::Girth6));
        GenParams bparams;
        bparams.n = 8;
        bparams.neighbors = 1;
        auto bounded = generate_instance(Family::Bounded, bparams, seed);
        CHECK(detect_regimes(bounded).applies(Regime::BoundedNeighbors));
        CHECK(detect_regimes(bounded).max_neighbors <= 1);
    }
}

TEST_CASE("generation is deterministic in the seed") {
    GenParams params;
    params.n = 7;
    auto a = generate_instance(Family::Girth6, params, 42);
    auto b = generate_instance(Family::Girth6, params, 42);
    REQUIRE(a.total_edges() == b.total_edges());
    for (int e = 0; e < a.total_edges(); ++e) {
        CHECK(a.edges[e].a == b.edges[e].a);
        CHECK(a.edges[e].b == b.edges[e].b);
    }
}

TEST_CASE("infeasible bounded parameters are rejected with the violated bound") {
    GenParams params;
    params.n = 3;
    params.neighbors = 2;
    CHECK_THROWS_WITH_AS(generate_instance(Family::Bounded, params, 1),
                         doctest::Contains("exceed the bound 0"), InputError);
}
