#pragma once

#include <optional>
#include <string>
#include <vector>

#include "efx/cuts.hpp"

namespace efx {

// Holdings are bundle ids; everything else (unallocated set, envy, values)
// is derived on demand. Snapshots are cheap at desk scale.
struct AllocationState {
    std::vector<std::vector<BundleId>> holdings;  // per vertex, sorted

    static AllocationState empty(int n) {
        AllocationState s;
        s.holdings.assign(n, {});
        return s;
    }
};

EdgeMask holdings_mask(const BundleTable& table, const AllocationState& state, VertexId i);
Value holdings_value(const ValuationProfile& profile, const BundleTable& table,
                     const AllocationState& state, VertexId i);

// -1 when nobody holds the bundle.
std::vector<VertexId> holder_of(const BundleTable& table, const AllocationState& state);

std::vector<BundleId> unallocated_bundles(const BundleTable& table, const AllocationState& state);
// UB_i: unallocated bundles of vertex i's family.
std::vector<BundleId> unallocated_for(const BundleTable& table, const AllocationState& state, VertexId i);

struct EnvyReport {
    std::vector<std::pair<VertexId, VertexId>> envies;  // (envier, envied)
    std::vector<char> is_envied;
    std::vector<std::vector<VertexId>> enviers;  // per vertex, ascending

    // The single envier of an envied vertex in an EFX orientation; empty when
    // the vertex is not envied or has several enviers.
    std::optional<VertexId> unique_envier(VertexId i) const {
        if (enviers[i].size() == 1) return enviers[i][0];
        return std::nullopt;
    }
    int envied_count() const {
        int c = 0;
        for (char e : is_envied) c += e != 0;
        return c;
    }
};

EnvyReport envy_report(const ValuationProfile& profile, const BundleTable& table,
                       const AllocationState& state);

struct EfxViolation {
    VertexId envier;
    VertexId owner;
    EdgeId removed;
};

std::vector<EfxViolation> efx_violations(const ValuationProfile& profile, const BundleTable& table,
                                         const AllocationState& state);

// The most valued selection of pairwise non-parallel bundles a vertex could
// take: an envied vertex draws from its unallocated family bundles plus the
// bundle its envier holds on their shared pair; a non-envied vertex draws
// from its unallocated family bundles plus its own holdings. Ties prefer
// more bundles, then the lexicographically smallest id sequence.
struct Selection {
    std::vector<BundleId> bundles;
    Value value = 0;
};

Selection preferred_selection(const ValuationProfile& profile, const MultigraphInstance& inst,
                              const BundleTable& table, const AllocationState& state,
                              const EnvyReport& envy, VertexId i);

enum class StageProperty {
    EfxOrientation,        // (1) partial EFX orientation, holdings within families
    NoPreferredUnallocated,// (2) nobody prefers an unallocated family bundle
    NoAdjacentEnvied,      // (3.1)
    EnviedAtMostHalf,      // (3.2)
    SafeVertexNearEnvier,  // (3.3) envier or one of its neighbors is non-envied
    NoPreferredSelection,  // (4) holdings beat the preferred selection
};

const char* property_name(StageProperty p);

struct PropertyResult {
    bool pass = true;
    std::string witness;  // empty on pass
};

// For NoPreferredUnallocated an explicit per-vertex offer universe may be
// supplied (the girth initial allocation checks against its candidate-cut
// sets); by default the finalized families are used.
PropertyResult check_property(const ValuationProfile& profile, const MultigraphInstance& inst,
                              const BundleTable& table, const AllocationState& state,
                              StageProperty which,
                              const std::vector<std::vector<BundleId>>* offer_universe = nullptr);

}  // namespace efx
