#pragma once

#include <string>
#include <vector>

#include "efx/io.hpp"

namespace efx {

// Exhaustive enumeration of complete allocations (each real edge to any
// vertex, not only endpoints) filtered by an EFX test implemented apart from
// the solver's checkers.
struct OracleResult {
    bool capped = false;         // n^m exceeded the cap; nothing enumerated
    long long enumerated = 0;
    std::vector<std::vector<VertexId>> efx_owner_vectors;  // owner per real edge
};

constexpr long long kDefaultOracleCap = 10'000'000;

OracleResult brute_force_efx(const ValuationProfile& profile, const MultigraphInstance& inst,
                             long long cap = kDefaultOracleCap, int jobs = 1);

// Independent edge-level EFX test (shared with nothing in state/pipeline).
bool allocation_is_efx(const ValuationProfile& profile, const MultigraphInstance& inst,
                       const std::vector<std::vector<EdgeId>>& allocation,
                       std::string* witness = nullptr);

std::vector<VertexId> owners_of(const MultigraphInstance& inst,
                                const std::vector<std::vector<EdgeId>>& allocation);

struct VerifyReport {
    bool pass = true;
    std::vector<std::string> lines;  // "check <name> pass|fail [witness]"

    void add(const std::string& name, bool ok, const std::string& witness = "");
};

// Completeness over the real edges plus the independent EFX test.
VerifyReport verify_allocation(const ValuationProfile& profile, const MultigraphInstance& inst,
                               const std::vector<std::vector<EdgeId>>& allocation);

// Re-checks every stage of a solver trace from raw holdings: structural
// consistency of partitions and families, every claimed property, the park
// replay of the final stage, completeness and EFX of the result.
VerifyReport audit_trace(const ValuationProfile& profile, const MultigraphInstance& inst,
                         const ParsedTrace& trace);

}  // namespace efx
