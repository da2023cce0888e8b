#include "efx/pipeline.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>

namespace efx {

namespace {

constexpr int kLoopCap = 200000;  // backs the termination proofs; breach is a bug

std::vector<BundleId> sorted(std::vector<BundleId> ids) {
    std::sort(ids.begin(), ids.end());
    return ids;
}

// Most valued unallocated family bundle, ties to the smallest id.
BundleId best_unallocated(const ValuationProfile& profile, const BundleTable& table,
                          const AllocationState& state, VertexId i) {
    BundleId best = -1;
    Value bv = -1;
    for (BundleId b : unallocated_for(table, state, i)) {
        Value v = profile.value(i, table.edges_mask(b));
        if (v > bv) {
            best = b;
            bv = v;
        }
    }
    return best;
}

}  // namespace

AllocationState step1_bipartite(const ValuationProfile& profile, const MultigraphInstance& inst,
                                const BundleTable& table, const RegimeReport& report) {
    AllocationState state = AllocationState::empty(inst.n);
    for (int side = 0; side <= 1; ++side) {
        for (VertexId v = 0; v < inst.n; ++v) {
            if (inst.adjacency[v].empty() || report.coloring[v] != side) continue;
            BundleId pick = best_unallocated(profile, table, state, v);
            if (pick == -1)
                throw InvariantError("bipartite initial allocation: no bundle left for vertex " +
                                     std::to_string(v));
            state.holdings[v] = {pick};
        }
    }
    return state;
}

PreferenceGraph build_preference_graph(const ValuationProfile& profile,
                                       const MultigraphInstance& inst, const BundleTable& table) {
    PreferenceGraph g;
    g.first_choice.assign(inst.n, -1);
    g.second_choice.assign(inst.n, -1);
    for (VertexId v = 0; v < inst.n; ++v) {
        if (inst.adjacency[v].empty()) continue;
        g.vertices.push_back(v);
        BundleId first = -1, second = -1;
        Value fv = -1, sv = -1;
        for (BundleId b : table.family[v]) {
            Value val = profile.value(v, table.edges_mask(b));
            if (val > fv) {
                second = first;
                sv = fv;
                first = b;
                fv = val;
            } else if (val > sv) {
                second = b;
                sv = val;
            }
        }
        if (first == -1 || second == -1)
            throw InvariantError("preference graph: vertex " + std::to_string(v) +
                                 " has fewer than two family bundles");
        g.first_choice[v] = first;
        g.second_choice[v] = second;
    }
    return g;
}

namespace {

struct ComponentBest {
    int weight = -1;
    std::vector<BundleId> assignment;
};

void enumerate_component(const PreferenceGraph& g, const std::vector<VertexId>& members,
                         std::size_t at, std::vector<char>& bundle_used,
                         std::vector<BundleId>& assignment, int weight, ComponentBest& best) {
    if (at == members.size()) {
        if (weight > best.weight ||
            (weight == best.weight && (best.assignment.empty() || assignment < best.assignment))) {
            best.weight = weight;
            best.assignment = assignment;
        }
        return;
    }
    VertexId v = members[at];
    for (BundleId b : {g.first_choice[v], g.second_choice[v]}) {
        if (bundle_used[b]) continue;
        bundle_used[b] = 1;
        assignment.push_back(b);
        enumerate_component(g, members, at + 1, bundle_used, assignment,
                            weight + (b == g.first_choice[v] ? 1 : 0), best);
        assignment.pop_back();
        bundle_used[b] = 0;
    }
}

}  // namespace

Matching max_weight_assignment(const PreferenceGraph& graph, const MultigraphInstance& inst,
                               const BundleTable& table) {
    Matching m;
    m.assigned.assign(inst.n, -1);
    // Components of the vertex-bundle graph: vertices sharing a candidate
    // bundle are connected. Degrees are at most two on both sides, so each
    // component is a path or cycle; exhaustive search per component is exact.
    std::map<BundleId, VertexId> seen;
    std::vector<int> parent(inst.n);
    for (VertexId v : graph.vertices) parent[v] = v;
    std::function<VertexId(VertexId)> find = [&](VertexId x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (VertexId v : graph.vertices)
        for (BundleId b : {graph.first_choice[v], graph.second_choice[v]}) {
            auto [it, fresh] = seen.try_emplace(b, v);
            if (!fresh) parent[find(v)] = find(it->second);
        }
    std::map<VertexId, std::vector<VertexId>> components;
    for (VertexId v : graph.vertices) components[find(v)].push_back(v);

    std::vector<char> bundle_used(table.bundles.size(), 0);
    for (auto& [root, members] : components) {
        std::sort(members.begin(), members.end());
        ComponentBest best;
        std::vector<BundleId> assignment;
        enumerate_component(graph, members, 0, bundle_used, assignment, 0, best);
        if (best.weight < 0)
            throw InvariantError("no all-vertices matching in the preference graph");
        for (std::size_t k = 0; k < members.size(); ++k) {
            m.assigned[members[k]] = best.assignment[k];
            bundle_used[best.assignment[k]] = 1;  // keep cross-component exclusion
        }
        m.weight += best.weight;
    }

    int active = static_cast<int>(graph.vertices.size());
    if (m.weight < (active + 1) / 2)
        throw InvariantError("matching weight " + std::to_string(m.weight) +
                             " below ceil(active/2) = " + std::to_string((active + 1) / 2));
    return m;
}

AllocationState step1_bounded(const ValuationProfile& profile, const MultigraphInstance& inst,
                              const BundleTable& table) {
    PreferenceGraph g = build_preference_graph(profile, inst, table);
    Matching m = max_weight_assignment(g, inst, table);
    AllocationState state = AllocationState::empty(inst.n);
    for (VertexId v : g.vertices) state.holdings[v] = {m.assigned[v]};
    return state;
}

// ---------------------------------------------------------------------------
// Girth initial allocation: both candidate cuts per pair stay on offer, the
// endpoints are prioritized for the bundle they would choose, and converting
// an envied vertex into a non-envied one locks its pairs to its own cuts.

namespace {

class AuxUniverse {
public:
    AuxUniverse(const MultigraphInstance& inst, const BundleTable& table)
        : inst_(inst), table_(table), family_(table.family) {}

    std::array<BundleId, 2> cut_of(int pair, VertexId cutter) const {
        const PairPartition& pp = table_.partitions[pair];
        const PairClass& pc = inst_.pairs[pair];
        if (cutter == pc.u) return {pp.bundles[0], pp.bundles[1]};
        return {pp.bundles[2], pp.bundles[3]};
    }

    bool cut_live(int pair, VertexId cutter) const {
        auto cut = cut_of(pair, cutter);
        const auto& fam = family_[inst_.pairs[pair].u];
        bool a = std::count(fam.begin(), fam.end(), cut[0]) > 0;
        bool b = std::count(fam.begin(), fam.end(), cut[1]) > 0;
        if (a != b) throw InvariantError("aux cut partially removed");
        return a;
    }

    // The offerable unallocated bundles of one pair: with nothing allocated
    // every live candidate is on offer; once one bundle of some cut is held,
    // only that cut's partner remains offerable; a fully allocated pair
    // offers nothing.
    std::vector<BundleId> pair_offerable(int pair, const std::vector<VertexId>& holder) const {
        const PairClass& pc = inst_.pairs[pair];
        std::vector<BundleId> live;
        for (VertexId c : {pc.u, pc.v})
            if (cut_live(pair, c)) {
                auto cut = cut_of(pair, c);
                for (BundleId b : cut)
                    if (!std::count(live.begin(), live.end(), b)) live.push_back(b);
            }
        std::vector<BundleId> held;
        for (BundleId b : live)
            if (holder[b] != -1) held.push_back(b);
        if (held.empty()) return sorted(live);
        int held_pair_cut = -1;  // which cut the held bundles belong to (0 = u, 1 = v)
        for (BundleId h : held)
            for (int c = 0; c < 2; ++c) {
                auto cut = cut_of(pair, c == 0 ? pc.u : pc.v);
                if ((cut[0] == h || cut[1] == h) && cut_live(pair, c == 0 ? pc.u : pc.v)) {
                    if (held_pair_cut != -1 && held_pair_cut != c)
                        throw InvariantError("pair holds bundles from both candidate cuts");
                    held_pair_cut = c;
                }
            }
        if (held.size() >= 2) return {};
        auto cut = cut_of(pair, held_pair_cut == 0 ? pc.u : pc.v);
        BundleId partner = cut[0] == held[0] ? cut[1] : cut[0];
        return {partner};
    }

    std::vector<BundleId> offerable_for(VertexId i, const std::vector<VertexId>& holder) const {
        std::vector<BundleId> out;
        for (int pair : inst_.incident_pairs[i])
            for (BundleId b : pair_offerable(pair, holder)) out.push_back(b);
        return sorted(out);
    }

    // Keep only `keeper`'s cuts on every pair incident to it.
    void lock_to_own_cuts(VertexId keeper, const std::vector<VertexId>& holder) {
        for (int pair : inst_.incident_pairs[keeper]) {
            const PairClass& pc = inst_.pairs[pair];
            VertexId other = pc.u == keeper ? pc.v : pc.u;
            if (!cut_live(pair, other)) continue;
            for (BundleId b : cut_of(pair, other)) {
                if (holder[b] != -1)
                    throw InvariantError("locking would drop an allocated bundle");
                drop(pc.u, b);
                drop(pc.v, b);
            }
        }
    }

    void drop_cut(int pair, VertexId cutter) {
        const PairClass& pc = inst_.pairs[pair];
        if (!cut_live(pair, cutter)) return;
        for (BundleId b : cut_of(pair, cutter)) {
            drop(pc.u, b);
            drop(pc.v, b);
        }
    }

    const std::vector<std::vector<BundleId>>& family() const { return family_; }

private:
    void drop(VertexId v, BundleId b) {
        auto& fam = family_[v];
        fam.erase(std::remove(fam.begin(), fam.end(), b), fam.end());
    }

    const MultigraphInstance& inst_;
    const BundleTable& table_;
    std::vector<std::vector<BundleId>> family_;
};

// One pass of the offer loop; returns false at the fixed point.
bool girth_offer_round(const ValuationProfile& profile, const MultigraphInstance& inst,
                       const BundleTable& table, const AuxUniverse& aux, AllocationState& state) {
    std::vector<VertexId> holder = holder_of(table, state);
    for (VertexId i = 0; i < inst.n; ++i) {
        for (VertexId j : inst.adjacency[i]) {
            int pair = inst.pair_index(i, j);
            if (!aux.cut_live(pair, j)) continue;
            auto jcut = aux.cut_of(pair, j);
            std::vector<BundleId> offerable = aux.pair_offerable(pair, holder);
            Value vi_own = holdings_value(profile, table, state, i);
            Value vj_own = holdings_value(profile, table, state, j);
            // i's pick between the two parts of j's cut; ties to the part
            // holding the smallest edge id (the first bundle).
            BundleId my_choice =
                profile.value(i, table.edges_mask(jcut[1])) > profile.value(i, table.edges_mask(jcut[0]))
                    ? jcut[1]
                    : jcut[0];
            for (BundleId s : jcut) {
                if (!std::count(offerable.begin(), offerable.end(), s)) continue;
                Value vi_s = profile.value(i, table.edges_mask(s));
                Value vj_s = profile.value(j, table.edges_mask(s));
                if (vi_s <= vi_own && vj_s <= vj_own) continue;
                bool choice_offerable = std::count(offerable.begin(), offerable.end(), my_choice) > 0;
                if (choice_offerable &&
                    profile.value(i, table.edges_mask(my_choice)) > vi_own) {
                    state.holdings[i] = {my_choice};
                } else {
                    if (vj_s <= vj_own)
                        throw InvariantError("girth offer loop: handing a bundle to vertex " +
                                             std::to_string(j) + " would not improve it");
                    state.holdings[j] = {s};
                }
                return true;
            }
        }
    }
    return false;
}

void girth_offer_loop(const ValuationProfile& profile, const MultigraphInstance& inst,
                      const BundleTable& table, const AuxUniverse& aux, AllocationState& state) {
    for (int guard = 0;; ++guard) {
        if (guard > kLoopCap) throw InvariantError("girth offer loop exceeded its iteration cap");
        if (!girth_offer_round(profile, inst, table, aux, state)) return;
    }
}

}  // namespace

GirthInitResult step1_girth(const ValuationProfile& profile, const MultigraphInstance& inst,
                            const BundleTable& aux_table) {
    AuxUniverse aux(inst, aux_table);
    AllocationState state = AllocationState::empty(inst.n);
    GirthInitResult result;
    girth_offer_loop(profile, inst, aux_table, aux, state);

    for (int guard = 0;; ++guard) {
        if (guard > inst.n + 1)
            throw InvariantError("girth repair loop ran more rounds than vertices");
        EnvyReport envy = envy_report(profile, aux_table, state);
        VertexId locked = -1;
        for (VertexId a = 0; a < inst.n && locked == -1; ++a) {
            if (!envy.is_envied[a]) continue;
            auto p = envy.unique_envier(a);
            if (!p)
                throw InvariantError("envied vertex without a unique envier in an orientation");
            if (!envy.is_envied[*p]) continue;
            bool has_safe_neighbor = false;
            for (VertexId w : inst.adjacency[*p])
                if (!envy.is_envied[w]) has_safe_neighbor = true;
            if (has_safe_neighbor) continue;
            // Vertex *p and its whole neighborhood are envied; make *p
            // non-envied for good by clearing it and locking its pairs to
            // its own cuts.
            VertexId b = *p;
            if (!envy.unique_envier(b))
                throw InvariantError("locked vertex has no unique envier");
            state.holdings[b].clear();
            aux.lock_to_own_cuts(b, holder_of(aux_table, state));
            locked = b;
        }
        if (locked == -1) break;
        result.repairs++;
        girth_offer_loop(profile, inst, aux_table, aux, state);
    }

    std::vector<VertexId> holder = holder_of(aux_table, state);
    result.aux_universe.assign(inst.n, {});
    for (VertexId v = 0; v < inst.n; ++v) result.aux_universe[v] = aux.offerable_for(v, holder);

    // Finalize: keep for every pair the cut that got allocated, otherwise
    // the lower endpoint's cut; the other candidate partition is dropped.
    for (VertexId i = 0; i < inst.n; ++i)
        for (VertexId j : inst.adjacency[i]) {
            int pair = inst.pair_index(i, j);
            if (!aux.cut_live(pair, i)) continue;
            auto icut = aux.cut_of(pair, i);
            bool icut_allocated = holder[icut[0]] != -1 || holder[icut[1]] != -1;
            bool all_free = true;
            for (VertexId c : {i, j}) {
                if (!aux.cut_live(pair, c)) all_free = false;
                else
                    for (BundleId b : aux.cut_of(pair, c))
                        if (holder[b] != -1) all_free = false;
            }
            if (icut_allocated || all_free) aux.drop_cut(pair, j);
        }

    result.final_table.bundles = aux_table.bundles;
    result.final_table.family.assign(inst.n, {});
    for (std::size_t pi = 0; pi < inst.pairs.size(); ++pi) {
        const PairClass& pc = inst.pairs[pi];
        PairPartition part;
        part.pair = static_cast<int>(pi);
        part.kind = PartitionKind::Oriented2;
        int live_cuts = aux.cut_live(pi, pc.u) + aux.cut_live(pi, pc.v);
        if (live_cuts != 1)
            throw InvariantError("pair " + std::to_string(pi) + " kept " +
                                 std::to_string(live_cuts) + " candidate cuts after cleanup");
        part.cutter = aux.cut_live(pi, pc.u) ? pc.u : pc.v;
        auto cut = aux.cut_of(pi, part.cutter);
        part.bundles = {cut[0], cut[1]};
        result.final_table.partitions.push_back(part);
        for (BundleId b : part.bundles) {
            result.final_table.family[pc.u].push_back(b);
            result.final_table.family[pc.v].push_back(b);
        }
    }
    for (auto& fam : result.final_table.family) std::sort(fam.begin(), fam.end());
    for (VertexId v = 0; v < inst.n; ++v)
        for (BundleId b : state.holdings[v])
            if (!std::count(result.final_table.family[v].begin(), result.final_table.family[v].end(), b))
                throw InvariantError("finalized family dropped an allocated bundle");
    result.state = std::move(state);
    return result;
}

// ---------------------------------------------------------------------------
// Step 2: envy reduction.

namespace {

// Non-envied vertices keep taking their preferred selection while it beats
// their holdings in value or, at equal value, in bundle count.
void nonenvied_sweep(const ValuationProfile& profile, const MultigraphInstance& inst,
                     const BundleTable& table, AllocationState& state, Step2Stats* stats) {
    for (int guard = 0;; ++guard) {
        if (guard > kLoopCap) throw InvariantError("step 2 non-envied sweep exceeded its cap");
        EnvyReport envy = envy_report(profile, table, state);
        bool fired = false;
        for (VertexId k = 0; k < inst.n && !fired; ++k) {
            if (envy.is_envied[k] || inst.adjacency[k].empty()) continue;
            Selection sel = preferred_selection(profile, inst, table, state, envy, k);
            Value own = holdings_value(profile, table, state, k);
            if (sel.value > own ||
                (sel.value == own && sel.bundles.size() > state.holdings[k].size())) {
                state.holdings[k] = sel.bundles;
                if (stats) stats->reassignments++;
                fired = true;
            }
        }
        if (!fired) return;
    }
}

void offer_released_bundles(const ValuationProfile& profile, const MultigraphInstance& inst,
                            const BundleTable& table, AllocationState& state, Step2Stats* stats) {
    for (int guard = 0;; ++guard) {
        if (guard > kLoopCap) throw InvariantError("step 2 offer loop exceeded its cap");
        bool fired = false;
        for (VertexId j = 0; j < inst.n && !fired; ++j) {
            Value own = holdings_value(profile, table, state, j);
            for (BundleId s : unallocated_for(table, state, j)) {
                if (profile.value(j, table.edges_mask(s)) > own) {
                    state.holdings[j] = {s};
                    if (stats) stats->reassignments++;
                    fired = true;
                    break;
                }
            }
        }
        if (!fired) return;
    }
}

}  // namespace

AllocationState step2_reduce_envy(const ValuationProfile& profile, const MultigraphInstance& inst,
                                  const BundleTable& table, AllocationState state,
                                  Step2Stats* stats) {
    nonenvied_sweep(profile, inst, table, state, stats);
    for (int round = 0;; ++round) {
        if (round > inst.n)
            throw InvariantError("step 2 envied loop ran more rounds than vertices");
        EnvyReport envy = envy_report(profile, table, state);
        VertexId chosen = -1;
        Selection sel;
        for (VertexId i = 0; i < inst.n && chosen == -1; ++i) {
            if (!envy.is_envied[i]) continue;
            Selection s = preferred_selection(profile, inst, table, state, envy, i);
            if (s.value > holdings_value(profile, table, state, i)) {
                chosen = i;
                sel = s;
            }
        }
        if (chosen == -1) break;
        if (stats) stats->envied_rounds++;
        VertexId envier = *envy.unique_envier(chosen);
        // The bundle the envier holds on the shared pair; if the selection
        // takes it, the envier releases its holdings entirely and re-enters
        // through the offer loop.
        int shared = inst.pair_index(chosen, envier);
        BundleId taken_from_envier = -1;
        for (BundleId b : state.holdings[envier])
            if (table.pair_of(b) == shared) taken_from_envier = b;
        if (taken_from_envier != -1 &&
            std::count(sel.bundles.begin(), sel.bundles.end(), taken_from_envier)) {
            state.holdings[envier].clear();
        }
        state.holdings[chosen] = sel.bundles;
        if (stats) stats->reassignments++;
        offer_released_bundles(profile, inst, table, state, stats);
        nonenvied_sweep(profile, inst, table, state, stats);
    }
    return state;
}

// ---------------------------------------------------------------------------
// Step 3: park every unallocated bundle on a safe vertex.

namespace {

bool park_acceptable(const ValuationProfile& profile, const MultigraphInstance& inst,
                     const BundleTable& table, const AllocationState& state, const EnvyReport& envy,
                     BundleId s, VertexId k) {
    const PairClass& pc = inst.pairs[table.pair_of(s)];
    if (k == pc.u || k == pc.v) return false;
    if (envy.is_envied[k]) return false;
    for (BundleId held : state.holdings[k])
        if (table.pair_of(held) == table.pair_of(s)) return false;
    EdgeMask grown = holdings_mask(table, state, k) | table.edges_mask(s);
    for (VertexId endpoint : {pc.u, pc.v})
        if (holdings_value(profile, table, state, endpoint) < profile.value(endpoint, grown))
            return false;
    return true;
}

void append_chain(const MultigraphInstance& inst, const EnvyReport& envy, VertexId anchor,
                  std::vector<VertexId>& out) {
    // The anchor if it is non-envied, then its non-envied neighbors.
    if (anchor < 0) return;
    if (!envy.is_envied[anchor]) out.push_back(anchor);
    for (VertexId w : inst.adjacency[anchor])
        if (!envy.is_envied[w]) out.push_back(w);
}

std::vector<VertexId> constructive_candidates(const MultigraphInstance& inst,
                                              const BundleTable& table, const EnvyReport& envy,
                                              Regime regime, BundleId s) {
    const PairClass& pc = inst.pairs[table.pair_of(s)];
    std::vector<VertexId> endpoints_envied;
    for (VertexId e : {pc.u, pc.v})
        if (envy.is_envied[e]) endpoints_envied.push_back(e);
    std::vector<VertexId> out;
    switch (regime) {
        case Regime::Bipartite: {
            if (endpoints_envied.size() != 1)
                throw InvariantError("bipartite step 3: unallocated bundle without exactly one "
                                     "envied endpoint");
            auto p = envy.unique_envier(endpoints_envied[0]);
            if (p) out.push_back(*p);
            break;
        }
        case Regime::BoundedNeighbors: {
            for (VertexId k = 0; k < inst.n; ++k) {
                if (envy.is_envied[k] || k == pc.u || k == pc.v) continue;
                if (std::count(inst.adjacency[pc.u].begin(), inst.adjacency[pc.u].end(), k)) continue;
                if (std::count(inst.adjacency[pc.v].begin(), inst.adjacency[pc.v].end(), k)) continue;
                out.push_back(k);
            }
            break;
        }
        case Regime::Girth6: {
            if (endpoints_envied.empty())
                throw InvariantError("girth step 3: unallocated bundle with no envied endpoint");
            for (VertexId i : endpoints_envied) {
                VertexId j = i == pc.u ? pc.v : pc.u;
                auto p = envy.unique_envier(i);
                if (!p) continue;
                if (j == *p) {
                    // The envy runs along this very pair; walk one step
                    // further down the envy chain.
                    auto pj = envy.unique_envier(j);
                    if (pj) append_chain(inst, envy, *pj, out);
                } else {
                    append_chain(inst, envy, *p, out);
                }
            }
            break;
        }
    }
    return out;
}

}  // namespace

AllocationState step3_finalize(const ValuationProfile& profile, const MultigraphInstance& inst,
                               const BundleTable& table, AllocationState state, Regime regime,
                               std::vector<ParkRecord>* parks) {
    for (int guard = 0;; ++guard) {
        if (guard > static_cast<int>(table.bundles.size()) + 1)
            throw InvariantError("step 3 parked more bundles than exist");
        std::vector<BundleId> unallocated = unallocated_bundles(table, state);
        if (unallocated.empty()) break;
        BundleId s = unallocated.front();
        const PairClass& pc = inst.pairs[table.pair_of(s)];
        EnvyReport envy = envy_report(profile, table, state);
        VertexId target = -1;
        bool constructive = false;
        for (VertexId k : constructive_candidates(inst, table, envy, regime, s)) {
            if (park_acceptable(profile, inst, table, state, envy, s, k)) {
                target = k;
                constructive = true;
                break;
            }
        }
        if (target == -1) {
            for (VertexId k = 0; k < inst.n && target == -1; ++k)
                if (!envy.is_envied[k] && park_acceptable(profile, inst, table, state, envy, s, k))
                    target = k;
        }
        if (target == -1)
            throw InvariantError("step 3: no safe vertex for bundle " + std::to_string(s) +
                                 " between " + std::to_string(pc.u) + " and " + std::to_string(pc.v));
        state.holdings[target] = sorted([&] {
            auto h = state.holdings[target];
            h.push_back(s);
            return h;
        }());
        if (parks) parks->push_back({s, pc.u, pc.v, target, constructive});
    }
    return state;
}

// ---------------------------------------------------------------------------
// Full pipeline.

namespace {

void require(const ValuationProfile& profile, const MultigraphInstance& inst,
             const BundleTable& table, const AllocationState& state, StageSnapshot& snap,
             StageProperty prop, const std::vector<std::vector<BundleId>>* universe = nullptr) {
    PropertyResult r = check_property(profile, inst, table, state, prop, universe);
    snap.properties.emplace_back(property_name(prop), r.pass);
    if (!r.pass)
        throw InvariantError(std::string("stage ") + snap.name + ": property " +
                             property_name(prop) + " failed: " + r.witness);
}

void require_named(StageSnapshot& snap, const std::string& name, bool pass,
                   const std::string& witness) {
    snap.properties.emplace_back(name, pass);
    if (!pass)
        throw InvariantError("stage " + snap.name + ": check " + name + " failed: " + witness);
}

StageProperty regime_p3(Regime regime) {
    switch (regime) {
        case Regime::Bipartite: return StageProperty::NoAdjacentEnvied;
        case Regime::BoundedNeighbors: return StageProperty::EnviedAtMostHalf;
        case Regime::Girth6: return StageProperty::SafeVertexNearEnvier;
    }
    throw InvariantError("unknown regime");
}

// Per-pair unallocated bundles bounded by (partition size) + (envied
// endpoints) - 2; every unallocated bundle of a two-bundle pair has an
// envied endpoint.
void check_pair_bounds(const ValuationProfile& profile, const MultigraphInstance& inst,
                       const BundleTable& table, const AllocationState& state,
                       StageSnapshot& snap) {
    EnvyReport envy = envy_report(profile, table, state);
    std::vector<int> unallocated_per_pair(inst.pairs.size(), 0);
    for (BundleId b : unallocated_bundles(table, state))
        unallocated_per_pair[table.pair_of(b)]++;
    bool ok = true;
    std::string witness;
    for (std::size_t pi = 0; pi < inst.pairs.size() && ok; ++pi) {
        const PairClass& pc = inst.pairs[pi];
        int size = static_cast<int>(table.partitions[pi].bundles.size());
        int q = (envy.is_envied[pc.u] ? 1 : 0) + (envy.is_envied[pc.v] ? 1 : 0);
        if (unallocated_per_pair[pi] > size + q - 2) {
            ok = false;
            witness = "pair " + std::to_string(pi) + " has " +
                      std::to_string(unallocated_per_pair[pi]) + " unallocated bundles, bound " +
                      std::to_string(size + q - 2);
        }
        if (size == 2 && unallocated_per_pair[pi] > 0 && q == 0) {
            ok = false;
            witness = "pair " + std::to_string(pi) +
                      " has an unallocated bundle but no envied endpoint";
        }
    }
    require_named(snap, "pair-unallocated-bound", ok, witness);

    // Every non-envied pipeline vertex holds one bundle per incident pair.
    bool cover_ok = true;
    std::string cover_witness;
    for (VertexId v = 0; v < inst.n && cover_ok; ++v) {
        if (envy.is_envied[v]) continue;
        for (int pi : inst.incident_pairs[v]) {
            bool has = false;
            for (BundleId b : state.holdings[v])
                if (table.pair_of(b) == pi) has = true;
            if (!has) {
                cover_ok = false;
                cover_witness = "non-envied vertex " + std::to_string(v) +
                                " holds no bundle of pair " + std::to_string(pi);
            }
        }
    }
    require_named(snap, "nonenvied-holds-per-neighbor", cover_ok, cover_witness);
}

}  // namespace

SolveResult solve(const ValuationProfile& profile, const MultigraphInstance& inst,
                  std::optional<Regime> forced) {
    RegimeReport report = detect_regimes(inst);
    Regime regime;
    if (forced) {
        if (!report.applies(*forced))
            throw RegimeError(std::string("forced regime ") + regime_name(*forced) +
                              " does not apply (bipartite=" + (report.is_bipartite ? "yes" : "no") +
                              ", girth=" + (report.girth_ok ? "ok" : "short") + ", neighbors=" +
                              std::to_string(report.max_neighbors) + " bound " +
                              std::to_string(report.neighbor_bound) + ")");
        regime = *forced;
    } else {
        if (report.applicable.empty())
            throw RegimeError("no applicable regime: not bipartite, simple girth " +
                              (report.simple_girth == kGirthInfinity
                                   ? std::string("inf")
                                   : std::to_string(report.simple_girth)) +
                              " < 6, max neighbors " + std::to_string(report.max_neighbors) +
                              " > bound " + std::to_string(report.neighbor_bound));
        regime = report.applicable.front();
    }

    SolveResult result;
    PipelineTrace& trace = result.trace;
    trace.regime = regime;
    trace.n = inst.n;
    trace.total_edges = inst.total_edges();
    trace.notes.push_back("inner offer loop reads unallocated bundles of the receiving vertex");
    trace.notes.push_back("aux offer membership tested on the scanned endpoint; sets stay "
                          "pair-symmetric");

    BundleTable table = build_bundle_table(profile, inst, regime, report);
    AllocationState state = AllocationState::empty(inst.n);

    {
        StageSnapshot snap;
        snap.name = "bundle-table";
        snap.table = table;
        snap.state = state;
        trace.stages.push_back(std::move(snap));
    }

    std::vector<std::vector<BundleId>> aux_universe;
    switch (regime) {
        case Regime::Bipartite:
            state = step1_bipartite(profile, inst, table, report);
            break;
        case Regime::BoundedNeighbors:
            state = step1_bounded(profile, inst, table);
            break;
        case Regime::Girth6: {
            GirthInitResult init = step1_girth(profile, inst, table);
            state = std::move(init.state);
            table = std::move(init.final_table);
            aux_universe = std::move(init.aux_universe);
            break;
        }
    }

    EnvyReport envy_after_1 = envy_report(profile, table, state);
    {
        StageSnapshot snap;
        snap.name = "initial-allocation";
        snap.table = table;
        snap.state = state;
        require(profile, inst, table, state, snap, StageProperty::EfxOrientation);
        require(profile, inst, table, state, snap, StageProperty::NoPreferredUnallocated);
        if (regime == Regime::Girth6) {
            // Offer fixed point against the candidate-cut universe; internal
            // only, since an auditor cannot reconstruct aux liveness.
            PropertyResult aux_p2 = check_property(profile, inst, table, state,
                                                   StageProperty::NoPreferredUnallocated,
                                                   &aux_universe);
            if (!aux_p2.pass)
                throw InvariantError("girth initial allocation left a preferred candidate bundle: " +
                                     aux_p2.witness);
        }
        require(profile, inst, table, state, snap, regime_p3(regime));
        trace.stages.push_back(std::move(snap));
    }

    state = step2_reduce_envy(profile, inst, table, state, &result.step2);
    {
        StageSnapshot snap;
        snap.name = "envy-reduction";
        snap.table = table;
        snap.state = state;
        require(profile, inst, table, state, snap, StageProperty::EfxOrientation);
        require(profile, inst, table, state, snap, StageProperty::NoPreferredUnallocated);
        require(profile, inst, table, state, snap, regime_p3(regime));
        require(profile, inst, table, state, snap, StageProperty::NoPreferredSelection);
        EnvyReport envy_after_2 = envy_report(profile, table, state);
        bool preserved = true;
        std::string witness;
        for (VertexId v = 0; v < inst.n; ++v)
            if (!envy_after_1.is_envied[v] && envy_after_2.is_envied[v]) {
                preserved = false;
                witness = "vertex " + std::to_string(v) + " became envied during step 2";
            }
        require_named(snap, "nonenvied-preserved", preserved, witness);
        check_pair_bounds(profile, inst, table, state, snap);
        trace.stages.push_back(std::move(snap));
    }

    std::vector<ParkRecord> parks;
    AllocationState before_step3 = state;
    state = step3_finalize(profile, inst, table, state, regime, &parks);
    result.parked = static_cast<int>(parks.size());
    {
        StageSnapshot snap;
        snap.name = "final-allocation";
        snap.table = table;
        snap.state = state;
        snap.parks = parks;
        for (VertexId v = 0; v < inst.n; ++v)
            for (BundleId b : before_step3.holdings[v])
                if (!std::count(state.holdings[v].begin(), state.holdings[v].end(), b))
                    throw InvariantError("step 3 moved an existing holding");
        EdgeMask covered = 0;
        bool disjoint = true;
        for (VertexId v = 0; v < inst.n; ++v) {
            EdgeMask m = holdings_mask(table, state, v);
            if (covered & m) disjoint = false;
            covered |= m;
        }
        EdgeMask all = 0;
        for (int e = 0; e < inst.total_edges(); ++e) all |= edge_bit(e);
        require_named(snap, "complete", disjoint && covered == all,
                      "final allocation does not partition the edge set");
        auto violations = efx_violations(profile, table, state);
        require_named(snap, "efx", violations.empty(),
                      violations.empty() ? ""
                                         : "vertex " + std::to_string(violations[0].envier) +
                                               " vs " + std::to_string(violations[0].owner));
        trace.stages.push_back(std::move(snap));
    }

    result.allocation.assign(inst.n, {});
    for (VertexId v = 0; v < inst.n; ++v) {
        for (EdgeId e : edges_of(holdings_mask(table, state, v)))
            if (!inst.edges[e].dummy) result.allocation[v].push_back(e);
        std::sort(result.allocation[v].begin(), result.allocation[v].end());
    }
    return result;
}

}  // namespace efx
