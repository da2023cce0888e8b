#pragma once

#include <vector>

#include "efx/instance.hpp"
#include "efx/types.hpp"

namespace efx {

enum class ValuationKind { Additive, Table, SeededMonotone };

// Per-vertex monotone set valuation over that vertex's relevant real edges.
// Irrelevant edges (including all dummies) are projected away on every query,
// so zero marginal value for them holds structurally.
struct VertexValuation {
    ValuationKind kind = ValuationKind::Additive;
    std::vector<EdgeId> support;  // sorted real relevant edge ids
    std::vector<Value> weights;   // Additive: aligned with support
    std::vector<Value> table;     // Table kinds: size 1 << support.size()
};

struct ValuationProfile {
    std::vector<VertexValuation> vertex;

    Value value(VertexId i, EdgeMask goods) const;
    Value value(VertexId i, const std::vector<EdgeId>& goods) const {
        return value(i, mask_of(goods));
    }
};

// The audit cap bounds the power-set size a table vertex may have.
constexpr int kDefaultAuditCap = 16;

// weights[i] holds (edge, weight) entries for vertex i's relevant real edges;
// missing edges default to weight 0. Negative weights are rejected.
ValuationProfile make_additive(const MultigraphInstance& inst,
                               const std::vector<std::vector<std::pair<EdgeId, Value>>>& weights);

// entries[i] holds (edge set, value) rows; missing subsets default to the
// maximum over covered subsets, which keeps the closure monotone.
ValuationProfile make_table(const MultigraphInstance& inst,
                            const std::vector<std::vector<std::pair<std::vector<EdgeId>, Value>>>& entries,
                            int cap = kDefaultAuditCap);

// Random monotone tables: v(empty) = 0 and each set's value is the maximum
// over its one-smaller subsets plus a fresh increment in [0, scale].
ValuationProfile make_seeded_monotone(const MultigraphInstance& inst, std::uint64_t seed,
                                      Value scale, int cap = kDefaultAuditCap);

ValuationProfile make_seeded_additive(const MultigraphInstance& inst, std::uint64_t seed, Value scale);

struct MonotonicityViolation {
    VertexId vertex;
    EdgeMask subset;    // S
    EdgeMask superset;  // T with S subset of T and v(S) > v(T)
    Value value_subset;
    Value value_superset;
};

struct AuditReport {
    std::vector<MonotonicityViolation> violations;
    bool exhaustive = true;  // false when some vertex exceeded the cap and was sampled
};

AuditReport audit_monotone(const ValuationProfile& profile, const MultigraphInstance& inst,
                           int cap = kDefaultAuditCap);

}  // namespace efx
