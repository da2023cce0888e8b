#include "efx/cuts.hpp"

#include <algorithm>

namespace efx {

const char* partition_kind_name(PartitionKind k) {
    switch (k) {
        case PartitionKind::Oriented2: return "oriented2";
        case PartitionKind::Common2: return "common2";
        case PartitionKind::ThreePart: return "threepart";
        case PartitionKind::AuxBoth: return "auxboth";
    }
    return "?";
}

bool efx_satisfied_holding(const ValuationProfile& profile, VertexId v, EdgeMask hold, EdgeMask other) {
    Value own = profile.value(v, hold);
    for (EdgeMask rest = other; rest;) {
        EdgeMask bit = rest & (~rest + 1);
        rest ^= bit;
        if (own < profile.value(v, other ^ bit)) return false;
    }
    return true;
}

bool is_efx_cut_for(const ValuationProfile& profile, VertexId v, EdgeMask part1, EdgeMask part2) {
    return efx_satisfied_holding(profile, v, part1, part2) &&
           efx_satisfied_holding(profile, v, part2, part1);
}

namespace {

// Enumerates nonempty bipartitions (P1, P2) with the smallest edge id pinned
// to P1, in lexicographic order of P1's sorted id sequence, until the visitor
// returns true.
template <typename Visit>
bool enumerate_bipartitions(const std::vector<EdgeId>& edges, Visit&& visit) {
    std::vector<EdgeId> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    int k = static_cast<int>(sorted.size());
    EdgeMask all = mask_of(sorted);
    std::vector<int> picked{0};  // indices into sorted; position 0 is pinned
    while (true) {
        EdgeMask p1 = 0;
        for (int idx : picked) p1 |= edge_bit(sorted[idx]);
        EdgeMask p2 = all ^ p1;
        if (p2 != 0 && visit(p1, p2)) return true;
        // Advance in subset-sequence lexicographic order: descend first,
        // otherwise increment the tail element.
        if (picked.back() + 1 < k) {
            picked.push_back(picked.back() + 1);
        } else {
            picked.pop_back();
            if (picked.empty()) return false;
            if (picked.size() == 1) return false;  // position 0 never advances
            picked.back()++;
        }
    }
}

Cut to_cut(EdgeMask p1, EdgeMask p2) { return {edges_of(p1), edges_of(p2)}; }

}  // namespace

Cut efx_cut(const ValuationProfile& profile, VertexId cutter, const std::vector<EdgeId>& class_edges) {
    if (class_edges.empty()) throw InputError("efx_cut: empty pair class");
    if (class_edges.size() > kMaxCutClassSize)
        throw InputError("efx_cut: pair class larger than the search cap of " +
                         std::to_string(kMaxCutClassSize));
    if (class_edges.size() == 1)
        throw InputError("efx_cut: cannot bipartition a single edge (dummy missing?)");
    Cut result;
    bool found = enumerate_bipartitions(class_edges, [&](EdgeMask p1, EdgeMask p2) {
        if (!is_efx_cut_for(profile, cutter, p1, p2)) return false;
        result = to_cut(p1, p2);
        return true;
    });
    if (!found)
        throw InputError("efx_cut: no valid cut found; the valuation of vertex " +
                         std::to_string(cutter) + " is not monotone");
    return result;
}

ChoiceSplit choose_bundles(const ValuationProfile& profile, VertexId chooser, VertexId cutter,
                           const std::vector<EdgeId>& class_edges) {
    Cut cut = efx_cut(profile, cutter, class_edges);
    Value v1 = profile.value(chooser, cut.part1);
    Value v2 = profile.value(chooser, cut.part2);
    // Tie goes to part1, which is lexicographically smaller by construction.
    if (v1 >= v2) return {cut.part1, cut.part2};
    return {cut.part2, cut.part1};
}

std::optional<Cut> find_common_cut(const ValuationProfile& profile, VertexId u, VertexId v,
                                   const std::vector<EdgeId>& class_edges) {
    if (class_edges.empty()) throw InputError("find_common_cut: empty pair class");
    if (class_edges.size() > kMaxCutClassSize)
        throw InputError("find_common_cut: pair class larger than the search cap");
    std::optional<Cut> result;
    enumerate_bipartitions(class_edges, [&](EdgeMask p1, EdgeMask p2) {
        if (!is_efx_cut_for(profile, u, p1, p2) || !is_efx_cut_for(profile, v, p1, p2)) return false;
        result = to_cut(p1, p2);
        return true;
    });
    return result;
}

namespace {

// Index of the most valued part, ties to the lexicographically smallest
// (sorted edge sequence) among the tied parts.
int lex_argmax(const ValuationProfile& profile, VertexId who,
               const std::array<std::vector<EdgeId>, 3>& parts) {
    int best = 0;
    Value bv = profile.value(who, parts[0]);
    for (int k = 1; k < 3; ++k) {
        Value v = profile.value(who, parts[k]);
        if (v > bv || (v == bv && parts[k] < parts[best])) {
            best = k;
            bv = v;
        }
    }
    return best;
}

}  // namespace

namespace {

// Candidates from one EFX-cut of `cutter`: detach a good g from the part the
// other endpoint is not EFX-satisfied against, so that the kept part tops the
// cutter's ranking and cannot top the other's. Returns true when a candidate
// also separated the lexicographic argmaxes and was written to `out`.
bool detach_candidates(const ValuationProfile& profile, VertexId cutter, VertexId other,
                       VertexId i, VertexId j, EdgeMask m1, EdgeMask m2, bool& any_candidate,
                       ThreeParts& out) {
    // The detached good comes out of the part `other` prefers; on a tie the
    // part holding the smallest edge id plays that role first.
    std::array<std::pair<EdgeMask, EdgeMask>, 2> labelings;  // (P1, P2)
    if (profile.value(other, m2) > profile.value(other, m1)) {
        labelings = {{{m1, m2}, {m2, m1}}};
    } else {
        labelings = {{{m2, m1}, {m1, m2}}};
    }
    for (auto [p1, p2] : labelings) {
        Value cutter_p1 = profile.value(cutter, p1);
        for (EdgeId g : edges_of(p2)) {
            EdgeMask trimmed = p2 ^ edge_bit(g);
            if (profile.value(other, trimmed) <= profile.value(other, p1)) continue;
            if (profile.value(cutter, trimmed) > cutter_p1) continue;
            if (profile.value(cutter, edge_bit(g)) > cutter_p1) continue;
            any_candidate = true;
            ThreeParts candidate{{edges_of(p1), edges_of(trimmed), {g}}};
            if (lex_argmax(profile, i, candidate.parts) != lex_argmax(profile, j, candidate.parts)) {
                out = candidate;
                return true;
            }
        }
    }
    return false;
}

}  // namespace

ThreeParts three_partition(const ValuationProfile& profile, VertexId i, VertexId j,
                           const std::vector<EdgeId>& class_edges) {
    {
        Cut canonical = efx_cut(profile, i, class_edges);
        if (is_efx_cut_for(profile, j, mask_of(canonical.part1), mask_of(canonical.part2)))
            throw InputError("three_partition: the pair admits a common EFX-cut");
    }
    // The first candidate examined is the canonical one (i's lexicographically
    // first cut, smallest qualifying g). When valuation ties make both
    // endpoints' tie-broken argmaxes land on the same part, the search widens
    // deterministically: further EFX-cuts of i, then the mirrored
    // construction from j's cuts.
    bool any_candidate = false;
    ThreeParts out;
    bool found = false;
    for (auto [cutter, other] : {std::pair<VertexId, VertexId>{i, j}, {j, i}}) {
        enumerate_bipartitions(class_edges, [&](EdgeMask p1, EdgeMask p2) {
            if (!is_efx_cut_for(profile, cutter, p1, p2)) return false;
            return found = detach_candidates(profile, cutter, other, i, j, p1, p2, any_candidate, out);
        });
        if (found) return out;
    }
    if (any_candidate)
        throw InvariantError("three_partition: no candidate partition separates the argmaxes");
    throw InputError("three_partition: no qualifying good; pair admits a common cut or the "
                     "profile is not monotone");
}

namespace {

BundleId push_bundle(BundleTable& table, int pair, std::vector<EdgeId> edges) {
    BundleId id = static_cast<BundleId>(table.bundles.size());
    std::sort(edges.begin(), edges.end());
    table.bundles.push_back({id, pair, std::move(edges)});
    return id;
}

}  // namespace

BundleTable build_bundle_table(const ValuationProfile& profile, const MultigraphInstance& inst,
                               Regime regime, const RegimeReport& report) {
    if (!report.applies(regime))
        throw RegimeError(std::string("regime ") + regime_name(regime) + " is not applicable");
    BundleTable table;
    table.family.assign(inst.n, {});
    for (std::size_t pi = 0; pi < inst.pairs.size(); ++pi) {
        const PairClass& pc = inst.pairs[pi];
        PairPartition part;
        part.pair = static_cast<int>(pi);
        switch (regime) {
            case Regime::Bipartite: {
                part.kind = PartitionKind::Oriented2;
                part.cutter = report.coloring[pc.u] == 1 ? pc.u : pc.v;
                Cut cut = efx_cut(profile, part.cutter, pc.edge_ids);
                part.bundles.push_back(push_bundle(table, part.pair, cut.part1));
                part.bundles.push_back(push_bundle(table, part.pair, cut.part2));
                break;
            }
            case Regime::BoundedNeighbors: {
                if (auto common = find_common_cut(profile, pc.u, pc.v, pc.edge_ids)) {
                    part.kind = PartitionKind::Common2;
                    part.bundles.push_back(push_bundle(table, part.pair, common->part1));
                    part.bundles.push_back(push_bundle(table, part.pair, common->part2));
                } else {
                    part.kind = PartitionKind::ThreePart;
                    ThreeParts three = three_partition(profile, pc.u, pc.v, pc.edge_ids);
                    for (auto& p : three.parts)
                        part.bundles.push_back(push_bundle(table, part.pair, p));
                }
                break;
            }
            case Regime::Girth6: {
                part.kind = PartitionKind::AuxBoth;
                Cut by_u = efx_cut(profile, pc.u, pc.edge_ids);
                Cut by_v = efx_cut(profile, pc.v, pc.edge_ids);
                part.bundles.push_back(push_bundle(table, part.pair, by_u.part1));
                part.bundles.push_back(push_bundle(table, part.pair, by_u.part2));
                part.bundles.push_back(push_bundle(table, part.pair, by_v.part1));
                part.bundles.push_back(push_bundle(table, part.pair, by_v.part2));
                break;
            }
        }
        for (BundleId b : part.bundles) {
            table.family[pc.u].push_back(b);
            table.family[pc.v].push_back(b);
        }
        table.partitions.push_back(std::move(part));
    }
    for (auto& fam : table.family) std::sort(fam.begin(), fam.end());
    return table;
}

}  // namespace efx
