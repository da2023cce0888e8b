#pragma once

#include <optional>
#include <string>
#include <vector>

#include "efx/state.hpp"

namespace efx {

// Bipartite vertex-to-bundle preference structure: every pipeline vertex
// links to its most and second most valued family bundle (weights 1 and 0).
// Each bundle can be linked only by its pair's endpoints, so components are
// paths and cycles and an all-vertices matching always exists.
struct PreferenceGraph {
    std::vector<VertexId> vertices;        // pipeline vertices (with >= 1 neighbor)
    std::vector<BundleId> first_choice;    // per inst vertex; -1 for inactive
    std::vector<BundleId> second_choice;
};

PreferenceGraph build_preference_graph(const ValuationProfile& profile,
                                       const MultigraphInstance& inst, const BundleTable& table);

struct Matching {
    std::vector<BundleId> assigned;  // per vertex; -1 for inactive
    int weight = 0;                  // number of first choices granted
};

// Maximum-weight matching covering every active vertex, solved exhaustively
// per path/cycle component; ties resolved to the lexicographically smallest
// assignment vector.
Matching max_weight_assignment(const PreferenceGraph& graph, const MultigraphInstance& inst,
                               const BundleTable& table);

AllocationState step1_bipartite(const ValuationProfile& profile, const MultigraphInstance& inst,
                                const BundleTable& table, const RegimeReport& report);

AllocationState step1_bounded(const ValuationProfile& profile, const MultigraphInstance& inst,
                              const BundleTable& table);

struct GirthInitResult {
    AllocationState state;
    BundleTable final_table;                          // one cut kept per pair
    std::vector<std::vector<BundleId>> aux_universe;  // offerable sets at termination, per vertex
    int repairs = 0;                                  // envied vertices converted and locked
};

GirthInitResult step1_girth(const ValuationProfile& profile, const MultigraphInstance& inst,
                            const BundleTable& aux_table);

struct Step2Stats {
    int envied_rounds = 0;     // outer envied-vertex rounds
    int reassignments = 0;     // total holdings rewrites
};

AllocationState step2_reduce_envy(const ValuationProfile& profile, const MultigraphInstance& inst,
                                  const BundleTable& table, AllocationState state,
                                  Step2Stats* stats = nullptr);

struct ParkRecord {
    BundleId bundle;
    VertexId endpoint_u, endpoint_v;
    VertexId target;
    bool constructive;  // true when the regime's constructive candidate was used
};

AllocationState step3_finalize(const ValuationProfile& profile, const MultigraphInstance& inst,
                               const BundleTable& table, AllocationState state, Regime regime,
                               std::vector<ParkRecord>* parks = nullptr);

struct StageSnapshot {
    std::string name;
    BundleTable table;
    AllocationState state;
    std::vector<std::pair<std::string, bool>> properties;
    std::vector<ParkRecord> parks;
};

struct PipelineTrace {
    Regime regime;
    int n = 0;
    int total_edges = 0;
    std::vector<std::string> notes;
    std::vector<StageSnapshot> stages;
};

struct SolveResult {
    std::vector<std::vector<EdgeId>> allocation;  // real edges per vertex, dummies stripped
    PipelineTrace trace;
    Step2Stats step2;
    int parked = 0;
};

// The full three-step construction. Regime priority when several apply:
// bipartite, then girth6, then bounded. Throws RegimeError when no regime
// (or a forced one) applies, InvariantError when a guaranteed check
// fails mid-pipeline.
SolveResult solve(const ValuationProfile& profile, const MultigraphInstance& inst,
                  std::optional<Regime> forced = std::nullopt);

}  // namespace efx
