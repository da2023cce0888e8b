#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "efx/generate.hpp"
#include "efx/pipeline.hpp"
#include "efx/rng.hpp"
#include "efx/verify.hpp"

using namespace efx;

TEST_CASE("single contested good: both owners are EFX") {
    auto inst = build_instance(2, {{0, 1}});
    auto profile = make_additive(inst, {{{0, 1}}, {{0, 1}}});
    auto oracle = brute_force_efx(profile, inst);
    REQUIRE_FALSE(oracle.capped);
    CHECK(oracle.enumerated == 2);
    CHECK(oracle.efx_owner_vectors.size() == 2);
}

TEST_CASE("oracle refuses when the search space exceeds the cap") {
    auto inst = build_instance(4, {{0, 1}, {0, 1}, {1, 2}, {1, 2}, {2, 3}, {2, 3}});
    auto profile = make_seeded_additive(inst, 1, 5);
    auto oracle = brute_force_efx(profile, inst, 100);
    CHECK(oracle.capped);
    CHECK(oracle.efx_owner_vectors.empty());
}

TEST_CASE("parallel enumeration matches sequential") {
    auto inst = build_instance(3, {{0, 1}, {0, 1}, {1, 2}, {1, 2}, {0, 2}});
    auto profile = make_seeded_monotone(inst, 9, 7);
    auto seq = brute_force_efx(profile, inst, kDefaultOracleCap, 1);
    auto par = brute_force_efx(profile, inst, kDefaultOracleCap, 4);
    CHECK(seq.enumerated == par.enumerated);
    CHECK(seq.efx_owner_vectors == par.efx_owner_vectors);
}

TEST_CASE("accepted tiny instances always have a nonempty EFX set holding the solver's output") {
    int ran = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (Family family : {Family::Bipartite, Family::Bounded, Family::Girth6}) {
            GenParams params;
            params.n = 4;
            params.max_multiplicity = 2;
            params.neighbors = 1;
            params.max_edges = 6;
            auto inst = generate_instance(family, params, seed);
            auto profile = seed % 2 ? make_seeded_monotone(inst, seed, 8)
                                    : make_seeded_additive(inst, seed, 8);
            auto oracle = brute_force_efx(profile, inst);
            REQUIRE_FALSE(oracle.capped);
            CHECK_FALSE(oracle.efx_owner_vectors.empty());
            auto result = solve(profile, inst, regime_of(family));
            auto owners = owners_of(inst, result.allocation);
            CHECK(std::count(oracle.efx_owner_vectors.begin(), oracle.efx_owner_vectors.end(),
                             owners) == 1);
            ++ran;
        }
    }
    CHECK(ran == 60);
}

TEST_CASE("the independent EFX test agrees with the solver-side checker on 10k allocations") {
    // Random edge-to-anyone allocations, compared through a singleton-bundle
    // table so the state checker can evaluate the same assignment.
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        Rng rng(Rng::mix(seed, 0xabc));
        auto inst = build_instance(3, {{0, 1}, {0, 1}, {1, 2}, {1, 2}, {0, 2}, {0, 2}});
        auto profile = make_seeded_monotone(inst, seed, 6);

        BundleTable table;
        table.family.assign(inst.n, {});
        for (std::size_t pi = 0; pi < inst.pairs.size(); ++pi) {
            PairPartition pp;
            pp.pair = static_cast<int>(pi);
            for (EdgeId e : inst.pairs[pi].edge_ids) {
                BundleId id = static_cast<BundleId>(table.bundles.size());
                table.bundles.push_back({id, static_cast<int>(pi), {e}});
                pp.bundles.push_back(id);
            }
            table.partitions.push_back(pp);
        }
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<std::vector<EdgeId>> alloc(inst.n);
            for (int e = 0; e < inst.real_edge_count; ++e)
                alloc[rng.below(inst.n)].push_back(e);
            AllocationState state = AllocationState::empty(inst.n);
            for (VertexId v = 0; v < inst.n; ++v)
                for (EdgeId e : alloc[v])
                    for (const Bundle& b : table.bundles)
                        if (b.edges == std::vector<EdgeId>{e}) state.holdings[v].push_back(b.id);
            bool via_state = efx_violations(profile, table, state).empty();
            bool via_verify = allocation_is_efx(profile, inst, alloc);
            CHECK(via_state == via_verify);
        }
    }
}

TEST_CASE("moving one edge to a worse holder is caught with a witness") {
    auto inst = build_instance(2, {{0, 1}, {0, 1}, {0, 1}});
    auto profile = make_additive(inst, {{{0, 5}, {1, 4}, {2, 1}}, {{0, 1}, {1, 2}, {2, 6}}});
    std::vector<std::vector<EdgeId>> good = {{0, 1}, {2}};
    REQUIRE(verify_allocation(profile, inst, good).pass);
    std::vector<std::vector<EdgeId>> bad = {{2}, {0, 1}};  // vertex 0 now envies past any removal
    auto report = verify_allocation(profile, inst, bad);
    CHECK_FALSE(report.pass);
    bool has_witness = false;
    for (const auto& line : report.lines)
        if (line.find("efx fail") != std::string::npos) has_witness = true;
    CHECK(has_witness);
}

TEST_CASE("incomplete allocations fail verification") {
    auto inst = build_instance(2, {{0, 1}, {0, 1}});
    auto profile = make_seeded_additive(inst, 3, 5);
    auto report = verify_allocation(profile, inst, {{0}, {}});
    CHECK_FALSE(report.pass);
}

TEST_CASE("solver traces audit clean on every regime") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        for (Family family : {Family::Bipartite, Family::Bounded, Family::Girth6}) {
            GenParams params;
            params.n = family == Family::Bounded ? 8 : 6;
            params.neighbors = 1;
            auto inst = generate_instance(family, params, seed);
            auto profile = seed % 2 ? make_seeded_monotone(inst, seed, 8)
                                    : make_seeded_additive(inst, seed, 8);
            auto result = solve(profile, inst, regime_of(family));
            auto parsed = parse_trace(write_trace(result.trace));
            auto report = audit_trace(profile, inst, parsed);
            if (!report.pass)
                for (const auto& line : report.lines) MESSAGE(line);
            CHECK(report.pass);
        }
    }
}

TEST_CASE("a park rerouted to an endpoint fails the audit") {
    GenParams params;
    params.n = 6;
    auto inst = generate_instance(Family::Bipartite, params, 3);
    auto profile = make_seeded_additive(inst, 3, 9);
    auto result = solve(profile, inst, Regime::Bipartite);
    auto parsed = parse_trace(write_trace(result.trace));
    REQUIRE_FALSE(parsed.stages[3].parks.empty());
    ParkRecord& park = parsed.stages[3].parks.front();
    auto& holdings = parsed.stages[3].holdings;
    auto& from = holdings[park.target];
    from.erase(std::remove(from.begin(), from.end(), park.bundle), from.end());
    park.target = park.endpoint_u;
    holdings[park.endpoint_u].push_back(park.bundle);
    std::sort(holdings[park.endpoint_u].begin(), holdings[park.endpoint_u].end());
    auto report = audit_trace(profile, inst, parsed);
    CHECK_FALSE(report.pass);
}

TEST_CASE("dropping a holding from the reduction stage fails its re-checks") {
    GenParams params;
    params.n = 6;
    auto inst = generate_instance(Family::Bipartite, params, 7);
    auto profile = make_seeded_additive(inst, 7, 9);
    auto result = solve(profile, inst, Regime::Bipartite);
    auto parsed = parse_trace(write_trace(result.trace));
    VertexId victim = -1;
    for (VertexId v = 0; v < inst.n && victim == -1; ++v)
        if (!parsed.stages[2].holdings[v].empty() &&
            profile.value(v, mask_of(parsed.stages[2].bundles[parsed.stages[2].holdings[v][0]])) > 0)
            victim = v;
    REQUIRE(victim != -1);
    parsed.stages[2].holdings[victim].erase(parsed.stages[2].holdings[victim].begin());
    auto report = audit_trace(profile, inst, parsed);
    CHECK_FALSE(report.pass);
    bool prop_failure = false;
    for (const auto& line : report.lines)
        if (line.find("fail") != std::string::npos &&
            (line.find("no-preferred") != std::string::npos ||
             line.find("nonenvied-holds-per-neighbor") != std::string::npos ||
             line.find("park-replay") != std::string::npos))
            prop_failure = true;
    CHECK(prop_failure);
}

TEST_CASE("truncated traces raise a parse error with a line number") {
    GenParams params;
    params.n = 4;
    auto inst = generate_instance(Family::Girth6, params, 2);
    auto profile = make_seeded_additive(inst, 2, 5);
    auto result = solve(profile, inst, Regime::Girth6);
    std::string text = write_trace(result.trace);
    std::string truncated = text.substr(0, text.size() / 2);
    CHECK_THROWS_AS(parse_trace(truncated), ParseError);
}
