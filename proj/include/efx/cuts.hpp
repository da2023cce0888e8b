#pragma once

#include <array>
#include <optional>
#include <vector>

#include "efx/instance.hpp"
#include "efx/valuation.hpp"

namespace efx {

// Largest pair class an exhaustive cut search will accept.
constexpr int kMaxCutClassSize = 12;

// An EFX-cut: a bipartition of a pair class such that the cutter is
// EFX-satisfied holding either part against the other. part1 contains the
// smallest edge id of the class.
struct Cut {
    std::vector<EdgeId> part1;
    std::vector<EdgeId> part2;
};

// v(hold) >= v(other \ {g}) for every g in other.
bool efx_satisfied_holding(const ValuationProfile& profile, VertexId v, EdgeMask hold, EdgeMask other);

bool is_efx_cut_for(const ValuationProfile& profile, VertexId v, EdgeMask part1, EdgeMask part2);

// Deterministic: among all valid cuts, the one whose part1 (which always
// carries the smallest edge id) is lexicographically smallest as a sorted id
// sequence. Exhaustive over nonempty bipartitions; a monotone valuation
// always admits one, so exhaustion failing means the profile is broken.
Cut efx_cut(const ValuationProfile& profile, VertexId cutter, const std::vector<EdgeId>& class_edges);

// Chooser's pick between the two parts of the cutter's EFX-cut (tie: part1),
// and the remainder left to the cutter.
struct ChoiceSplit {
    std::vector<EdgeId> choice;     // what the chooser takes
    std::vector<EdgeId> remainder;  // what the cutter keeps
};

ChoiceSplit choose_bundles(const ValuationProfile& profile, VertexId chooser, VertexId cutter,
                           const std::vector<EdgeId>& class_edges);

// First bipartition (same lexicographic order as efx_cut) that is an EFX-cut
// for both endpoints; empty when the pair admits none.
std::optional<Cut> find_common_cut(const ValuationProfile& profile, VertexId u, VertexId v,
                                   const std::vector<EdgeId>& class_edges);

// Three-way partition for a pair with no common cut, built from one
// endpoint's EFX-cut so that the two endpoints have distinct most valued
// parts under the fixed lexicographic tie rule.
struct ThreeParts {
    std::array<std::vector<EdgeId>, 3> parts;
};

ThreeParts three_partition(const ValuationProfile& profile, VertexId i, VertexId j,
                           const std::vector<EdgeId>& class_edges);

enum class PartitionKind { Oriented2, Common2, ThreePart, AuxBoth };

const char* partition_kind_name(PartitionKind k);

struct Bundle {
    BundleId id = -1;
    int pair = -1;  // index into MultigraphInstance::pairs
    std::vector<EdgeId> edges;
};

struct PairPartition {
    int pair = -1;
    PartitionKind kind = PartitionKind::Oriented2;
    VertexId cutter = -1;              // Oriented2 only
    std::vector<BundleId> bundles;     // Oriented2/Common2: 2, ThreePart: 3,
                                       // AuxBoth: 4 as [u-cut part1, u-cut part2,
                                       //                v-cut part1, v-cut part2]
};

// Finalized (or, for the girth regime, candidate) partitions of every pair
// class plus the per-vertex bundle families.
struct BundleTable {
    std::vector<Bundle> bundles;
    std::vector<PairPartition> partitions;        // one per instance pair, same order
    std::vector<std::vector<BundleId>> family;    // per vertex, sorted

    EdgeMask edges_mask(BundleId b) const { return mask_of(bundles[b].edges); }
    EdgeMask edges_mask(const std::vector<BundleId>& ids) const {
        EdgeMask m = 0;
        for (BundleId b : ids) m |= edges_mask(b);
        return m;
    }
    int pair_of(BundleId b) const { return bundles[b].pair; }
};

BundleTable build_bundle_table(const ValuationProfile& profile, const MultigraphInstance& inst,
                               Regime regime, const RegimeReport& report);

}  // namespace efx
