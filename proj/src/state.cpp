#include "efx/state.hpp"

#include <algorithm>
#include <map>

namespace efx {

EdgeMask holdings_mask(const BundleTable& table, const AllocationState& state, VertexId i) {
    return table.edges_mask(state.holdings[i]);
}

Value holdings_value(const ValuationProfile& profile, const BundleTable& table,
                     const AllocationState& state, VertexId i) {
    return profile.value(i, holdings_mask(table, state, i));
}

std::vector<VertexId> holder_of(const BundleTable& table, const AllocationState& state) {
    std::vector<VertexId> holder(table.bundles.size(), -1);
    for (VertexId v = 0; v < static_cast<VertexId>(state.holdings.size()); ++v)
        for (BundleId b : state.holdings[v]) {
            if (holder[b] != -1)
                throw InvariantError("bundle " + std::to_string(b) + " held twice");
            holder[b] = v;
        }
    return holder;
}

std::vector<BundleId> unallocated_bundles(const BundleTable& table, const AllocationState& state) {
    std::vector<char> active(table.bundles.size(), 0);
    for (const auto& fam : table.family)
        for (BundleId b : fam) active[b] = 1;
    std::vector<VertexId> holder = holder_of(table, state);
    std::vector<BundleId> out;
    for (BundleId b = 0; b < static_cast<BundleId>(table.bundles.size()); ++b)
        if (active[b] && holder[b] == -1) out.push_back(b);
    return out;
}

std::vector<BundleId> unallocated_for(const BundleTable& table, const AllocationState& state,
                                      VertexId i) {
    std::vector<VertexId> holder = holder_of(table, state);
    std::vector<BundleId> out;
    for (BundleId b : table.family[i])
        if (holder[b] == -1) out.push_back(b);
    return out;
}

EnvyReport envy_report(const ValuationProfile& profile, const BundleTable& table,
                       const AllocationState& state) {
    int n = static_cast<int>(state.holdings.size());
    EnvyReport rep;
    rep.is_envied.assign(n, 0);
    rep.enviers.assign(n, {});
    std::vector<EdgeMask> mask(n);
    std::vector<Value> own(n);
    for (VertexId v = 0; v < n; ++v) {
        mask[v] = holdings_mask(table, state, v);
        own[v] = profile.value(v, mask[v]);
    }
    for (VertexId i = 0; i < n; ++i)
        for (VertexId j = 0; j < n; ++j) {
            if (i == j) continue;
            if (own[i] < profile.value(i, mask[j])) {
                rep.envies.emplace_back(i, j);
                rep.is_envied[j] = 1;
                rep.enviers[j].push_back(i);
            }
        }
    return rep;
}

std::vector<EfxViolation> efx_violations(const ValuationProfile& profile, const BundleTable& table,
                                         const AllocationState& state) {
    int n = static_cast<int>(state.holdings.size());
    std::vector<EfxViolation> out;
    std::vector<EdgeMask> mask(n);
    for (VertexId v = 0; v < n; ++v) mask[v] = holdings_mask(table, state, v);
    for (VertexId i = 0; i < n; ++i) {
        Value own = profile.value(i, mask[i]);
        for (VertexId j = 0; j < n; ++j) {
            if (i == j) continue;
            for (EdgeMask rest = mask[j]; rest;) {
                EdgeMask bit = rest & (~rest + 1);
                rest ^= bit;
                if (own < profile.value(i, mask[j] ^ bit))
                    out.push_back({i, j, edges_of(bit)[0]});
            }
        }
    }
    return out;
}

namespace {

struct SelectionCandidate {
    Value value = -1;
    std::vector<BundleId> bundles;

    bool better_than(const SelectionCandidate& other) const {
        if (value != other.value) return value > other.value;
        if (bundles.size() != other.bundles.size()) return bundles.size() > other.bundles.size();
        return bundles < other.bundles;
    }
};

void search_groups(const ValuationProfile& profile, const BundleTable& table, VertexId who,
                   const std::vector<std::vector<BundleId>>& groups, std::size_t at, EdgeMask mask,
                   std::vector<BundleId>& chosen, SelectionCandidate& best) {
    if (at == groups.size()) {
        SelectionCandidate cand{profile.value(who, mask), chosen};
        std::sort(cand.bundles.begin(), cand.bundles.end());
        if (cand.better_than(best)) best = std::move(cand);
        return;
    }
    search_groups(profile, table, who, groups, at + 1, mask, chosen, best);  // take none
    for (BundleId b : groups[at]) {
        chosen.push_back(b);
        search_groups(profile, table, who, groups, at + 1, mask | table.edges_mask(b), chosen, best);
        chosen.pop_back();
    }
}

}  // namespace

Selection preferred_selection(const ValuationProfile& profile, const MultigraphInstance& inst,
                              const BundleTable& table, const AllocationState& state,
                              const EnvyReport& envy, VertexId i) {
    // Pool grouped per pair class; a valid selection takes at most one bundle
    // from each group.
    std::map<int, std::vector<BundleId>> pool;
    for (BundleId b : unallocated_for(table, state, i)) pool[table.pair_of(b)].push_back(b);
    if (envy.is_envied[i]) {
        auto p = envy.unique_envier(i);
        if (!p)
            throw InputError("preferred_selection: envied vertex " + std::to_string(i) +
                             " has no unique envier; state is not an EFX orientation");
        int shared = inst.pair_index(i, *p);
        if (shared >= 0)
            for (BundleId b : state.holdings[*p])
                if (table.pair_of(b) == shared) pool[shared].push_back(b);
    } else {
        for (BundleId b : state.holdings[i]) pool[table.pair_of(b)].push_back(b);
    }
    std::vector<std::vector<BundleId>> groups;
    for (auto& [pair, ids] : pool) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        groups.push_back(ids);
    }
    SelectionCandidate best;
    std::vector<BundleId> chosen;
    search_groups(profile, table, i, groups, 0, 0, chosen, best);
    return {best.bundles, best.value};
}

const char* property_name(StageProperty p) {
    switch (p) {
        case StageProperty::EfxOrientation: return "efx-orientation";
        case StageProperty::NoPreferredUnallocated: return "no-preferred-unallocated";
        case StageProperty::NoAdjacentEnvied: return "no-adjacent-envied";
        case StageProperty::EnviedAtMostHalf: return "envied-at-most-half";
        case StageProperty::SafeVertexNearEnvier: return "safe-vertex-near-envier";
        case StageProperty::NoPreferredSelection: return "no-preferred-selection";
    }
    return "?";
}

namespace {

PropertyResult fail(std::string witness) { return {false, std::move(witness)}; }

PropertyResult check_orientation(const ValuationProfile& profile, const MultigraphInstance& inst,
                                 const BundleTable& table, const AllocationState& state) {
    std::vector<VertexId> holder = holder_of(table, state);  // also rejects double holding
    for (VertexId v = 0; v < inst.n; ++v) {
        std::vector<int> pair_seen;
        for (BundleId b : state.holdings[v]) {
            const PairClass& pc = inst.pairs[table.pair_of(b)];
            if (pc.u != v && pc.v != v)
                return fail("vertex " + std::to_string(v) + " holds bundle " + std::to_string(b) +
                            " of a pair it is not an endpoint of");
            if (std::count(pair_seen.begin(), pair_seen.end(), table.pair_of(b)))
                return fail("vertex " + std::to_string(v) + " holds two bundles of pair class " +
                            std::to_string(table.pair_of(b)));
            pair_seen.push_back(table.pair_of(b));
            if (!std::count(table.family[v].begin(), table.family[v].end(), b))
                return fail("vertex " + std::to_string(v) + " holds bundle " + std::to_string(b) +
                            " outside its family");
        }
    }
    auto violations = efx_violations(profile, table, state);
    if (!violations.empty()) {
        const auto& v = violations.front();
        return fail("EFX violated: vertex " + std::to_string(v.envier) + " against vertex " +
                    std::to_string(v.owner) + " after removing edge " + std::to_string(v.removed));
    }
    return {};
}

}  // namespace

PropertyResult check_property(const ValuationProfile& profile, const MultigraphInstance& inst,
                              const BundleTable& table, const AllocationState& state,
                              StageProperty which,
                              const std::vector<std::vector<BundleId>>* offer_universe) {
    EnvyReport envy = envy_report(profile, table, state);
    switch (which) {
        case StageProperty::EfxOrientation:
            return check_orientation(profile, inst, table, state);
        case StageProperty::NoPreferredUnallocated: {
            std::vector<VertexId> holder = holder_of(table, state);
            for (VertexId i = 0; i < inst.n; ++i) {
                Value own = holdings_value(profile, table, state, i);
                std::vector<BundleId> offers =
                    offer_universe ? (*offer_universe)[i] : unallocated_for(table, state, i);
                for (BundleId b : offers) {
                    if (holder[b] != -1) continue;
                    if (profile.value(i, table.edges_mask(b)) > own)
                        return fail("vertex " + std::to_string(i) + " prefers unallocated bundle " +
                                    std::to_string(b));
                }
            }
            return {};
        }
        case StageProperty::NoAdjacentEnvied: {
            for (const PairClass& pc : inst.pairs)
                if (envy.is_envied[pc.u] && envy.is_envied[pc.v])
                    return fail("adjacent envied vertices " + std::to_string(pc.u) + " and " +
                                std::to_string(pc.v));
            return {};
        }
        case StageProperty::EnviedAtMostHalf: {
            int count = envy.envied_count();
            if (count > inst.n / 2)
                return fail(std::to_string(count) + " envied vertices exceed floor(n/2) = " +
                            std::to_string(inst.n / 2));
            return {};
        }
        case StageProperty::SafeVertexNearEnvier: {
            for (VertexId i = 0; i < inst.n; ++i) {
                if (!envy.is_envied[i]) continue;
                auto p = envy.unique_envier(i);
                if (!p) return fail("envied vertex " + std::to_string(i) + " lacks a unique envier");
                if (!envy.is_envied[*p]) continue;
                bool ok = false;
                for (VertexId w : inst.adjacency[*p])
                    if (!envy.is_envied[w]) ok = true;
                if (!ok)
                    return fail("envier " + std::to_string(*p) + " of vertex " + std::to_string(i) +
                                " and all its neighbors are envied");
            }
            return {};
        }
        case StageProperty::NoPreferredSelection: {
            for (VertexId i = 0; i < inst.n; ++i) {
                Selection sel = preferred_selection(profile, inst, table, state, envy, i);
                if (sel.value > holdings_value(profile, table, state, i))
                    return fail("vertex " + std::to_string(i) + " prefers selection worth " +
                                std::to_string(sel.value));
            }
            return {};
        }
    }
    return fail("unknown property");
}

}  // namespace efx
