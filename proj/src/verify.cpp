#include "efx/verify.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <set>

namespace efx {

namespace {

bool efx_pair_ok(const ValuationProfile& profile, VertexId i, EdgeMask own, EdgeMask other) {
    Value mine = profile.value(i, own);
    for (EdgeMask rest = other; rest;) {
        EdgeMask bit = rest & (~rest + 1);
        rest ^= bit;
        if (mine < profile.value(i, other ^ bit)) return false;
    }
    return true;
}

void enumerate_owners(const ValuationProfile& profile, const MultigraphInstance& inst,
                      std::vector<VertexId>& owner, int at, OracleResult& out) {
    int m = inst.real_edge_count;
    if (at == m) {
        out.enumerated++;
        std::vector<EdgeMask> mask(inst.n, 0);
        for (int e = 0; e < m; ++e) mask[owner[e]] |= edge_bit(e);
        for (VertexId i = 0; i < inst.n; ++i)
            for (VertexId j = 0; j < inst.n; ++j)
                if (i != j && !efx_pair_ok(profile, i, mask[i], mask[j])) return;
        out.efx_owner_vectors.push_back(owner);
        return;
    }
    for (VertexId v = 0; v < inst.n; ++v) {
        owner[at] = v;
        enumerate_owners(profile, inst, owner, at + 1, out);
    }
}

}  // namespace

OracleResult brute_force_efx(const ValuationProfile& profile, const MultigraphInstance& inst,
                             long long cap, int jobs) {
    OracleResult out;
    int m = inst.real_edge_count;
    long long total = 1;
    for (int e = 0; e < m; ++e) {
        total *= inst.n;
        if (total > cap || total < 0) {
            out.capped = true;
            return out;
        }
    }
    if (m == 0) {
        out.enumerated = 1;
        out.efx_owner_vectors.push_back({});
        return out;
    }
    if (jobs <= 1 || inst.n <= 1) {
        std::vector<VertexId> owner(m, 0);
        enumerate_owners(profile, inst, owner, 0, out);
        return out;
    }
    // Workers split on the first edge's owner; results merge in owner order
    // so the output is independent of scheduling.
    std::vector<std::future<OracleResult>> futures;
    for (VertexId first = 0; first < inst.n; ++first) {
        futures.push_back(std::async(std::launch::async, [&, first] {
            OracleResult part;
            std::vector<VertexId> owner(m, 0);
            owner[0] = first;
            enumerate_owners(profile, inst, owner, 1, part);
            return part;
        }));
    }
    for (auto& f : futures) {
        OracleResult part = f.get();
        out.enumerated += part.enumerated;
        for (auto& v : part.efx_owner_vectors) out.efx_owner_vectors.push_back(std::move(v));
    }
    return out;
}

std::vector<VertexId> owners_of(const MultigraphInstance& inst,
                                const std::vector<std::vector<EdgeId>>& allocation) {
    std::vector<VertexId> owner(inst.real_edge_count, -1);
    for (VertexId v = 0; v < static_cast<VertexId>(allocation.size()); ++v)
        for (EdgeId e : allocation[v]) {
            if (e < 0 || e >= inst.real_edge_count)
                throw InputError("allocation references unknown edge " + std::to_string(e));
            if (owner[e] != -1)
                throw InputError("edge " + std::to_string(e) + " allocated twice");
            owner[e] = v;
        }
    return owner;
}

bool allocation_is_efx(const ValuationProfile& profile, const MultigraphInstance& inst,
                       const std::vector<std::vector<EdgeId>>& allocation, std::string* witness) {
    std::vector<EdgeMask> mask(inst.n, 0);
    for (VertexId v = 0; v < inst.n && v < static_cast<VertexId>(allocation.size()); ++v)
        mask[v] = mask_of(allocation[v]);
    for (VertexId i = 0; i < inst.n; ++i) {
        Value own = profile.value(i, mask[i]);
        for (VertexId j = 0; j < inst.n; ++j) {
            if (i == j) continue;
            for (EdgeMask rest = mask[j]; rest;) {
                EdgeMask bit = rest & (~rest + 1);
                rest ^= bit;
                if (own < profile.value(i, mask[j] ^ bit)) {
                    if (witness)
                        *witness = "vertex " + std::to_string(i) + " envies vertex " +
                                   std::to_string(j) + " even after removing edge " +
                                   std::to_string(edges_of(bit)[0]);
                    return false;
                }
            }
        }
    }
    return true;
}

void VerifyReport::add(const std::string& name, bool ok, const std::string& witness) {
    lines.push_back("check " + name + (ok ? " pass" : " fail") +
                    (ok || witness.empty() ? "" : " " + witness));
    pass = pass && ok;
}

VerifyReport verify_allocation(const ValuationProfile& profile, const MultigraphInstance& inst,
                               const std::vector<std::vector<EdgeId>>& allocation) {
    VerifyReport report;
    if (static_cast<int>(allocation.size()) != inst.n) {
        report.add("vertex-count", false,
                   "allocation lists " + std::to_string(allocation.size()) + " vertices, instance has " +
                       std::to_string(inst.n));
        return report;
    }
    try {
        std::vector<VertexId> owner = owners_of(inst, allocation);
        bool complete = std::count(owner.begin(), owner.end(), -1) == 0;
        report.add("complete", complete, complete ? "" : "some edge is unallocated");
    } catch (const InputError& err) {
        report.add("complete", false, err.what());
        return report;
    }
    std::string witness;
    bool efx = allocation_is_efx(profile, inst, allocation, &witness);
    report.add("efx", efx, witness);
    return report;
}

// ---------------------------------------------------------------------------
// Trace auditing. Everything below recomputes from raw holdings with local
// code; it deliberately shares no logic with the state or pipeline modules.

namespace {

struct StageView {
    const TraceStage* stage = nullptr;
    std::vector<EdgeMask> bundle_mask;      // by bundle id (holes allowed)
    std::vector<int> bundle_pair;           // pair partition index per bundle, -1 unknown
    std::vector<EdgeMask> held;             // per vertex
    std::vector<Value> own;                 // per vertex
    std::vector<VertexId> holder;           // per bundle
};

StageView view_of(const ValuationProfile& profile, const MultigraphInstance& inst,
                  const TraceStage& stage) {
    StageView v;
    v.stage = &stage;
    BundleId max_id = -1;
    for (const auto& [id, edges] : stage.bundles) max_id = std::max(max_id, id);
    v.bundle_mask.assign(max_id + 1, 0);
    v.bundle_pair.assign(max_id + 1, -1);
    for (const auto& [id, edges] : stage.bundles) v.bundle_mask[id] = mask_of(edges);
    for (std::size_t p = 0; p < stage.partitions.size(); ++p)
        for (BundleId b : stage.partitions[p].bundles) v.bundle_pair[b] = stage.partitions[p].pair;
    v.holder.assign(max_id + 1, -1);
    v.held.assign(inst.n, 0);
    v.own.assign(inst.n, 0);
    for (VertexId i = 0; i < inst.n; ++i) {
        for (BundleId b : stage.holdings[i]) {
            if (b > max_id || v.bundle_mask[b] == 0)
                throw InputError("stage " + stage.name + ": holding references bundle " +
                                 std::to_string(b) + " with no definition");
            if (v.holder[b] != -1)
                throw InputError("stage " + stage.name + ": bundle " + std::to_string(b) +
                                 " held twice");
            v.holder[b] = i;
            v.held[i] |= v.bundle_mask[b];
        }
        v.own[i] = profile.value(i, v.held[i]);
    }
    return v;
}

std::vector<char> envied_flags(const ValuationProfile& profile, const MultigraphInstance& inst,
                               const StageView& v, std::vector<std::vector<VertexId>>* enviers) {
    std::vector<char> envied(inst.n, 0);
    if (enviers) enviers->assign(inst.n, {});
    for (VertexId i = 0; i < inst.n; ++i)
        for (VertexId j = 0; j < inst.n; ++j) {
            if (i == j) continue;
            if (v.own[i] < profile.value(i, v.held[j])) {
                envied[j] = 1;
                if (enviers) (*enviers)[j].push_back(i);
            }
        }
    return envied;
}

std::vector<BundleId> stage_unallocated(const StageView& v) {
    std::vector<BundleId> out;
    for (std::size_t b = 0; b < v.bundle_mask.size(); ++b) {
        if (v.bundle_pair[b] == -1) continue;  // not part of this stage's universe
        bool in_family = false;
        for (const auto& fam : v.stage->family)
            if (std::count(fam.begin(), fam.end(), static_cast<BundleId>(b))) in_family = true;
        if (in_family && v.holder[b] == -1) out.push_back(static_cast<BundleId>(b));
    }
    return out;
}

// Best non-parallel selection by take/skip over the pool, used to re-check
// the step-2 exit property without the solver's search code.
struct AuditSelection {
    Value value = -1;
    std::size_t count = 0;
};

void audit_select(const ValuationProfile& profile, const StageView& v, VertexId who,
                  const std::vector<BundleId>& pool, std::size_t at, EdgeMask mask,
                  std::vector<int>& pairs_taken, std::size_t taken, AuditSelection& best) {
    if (at == pool.size()) {
        Value val = profile.value(who, mask);
        if (val > best.value || (val == best.value && taken > best.count)) {
            best.value = val;
            best.count = taken;
        }
        return;
    }
    BundleId b = pool[at];
    audit_select(profile, v, who, pool, at + 1, mask, pairs_taken, taken, best);
    if (!std::count(pairs_taken.begin(), pairs_taken.end(), v.bundle_pair[b])) {
        pairs_taken.push_back(v.bundle_pair[b]);
        audit_select(profile, v, who, pool, at + 1, mask | v.bundle_mask[b], pairs_taken, taken + 1,
                     best);
        pairs_taken.pop_back();
    }
}

AuditSelection audit_preferred(const ValuationProfile& profile, const MultigraphInstance& inst,
                               const StageView& v, VertexId who, const std::vector<char>& envied,
                               const std::vector<std::vector<VertexId>>& enviers) {
    std::vector<BundleId> pool;
    for (BundleId b : stage_unallocated(v)) {
        bool relevant = false;
        for (BundleId fb : v.stage->family[who])
            if (fb == b) relevant = true;
        if (relevant) pool.push_back(b);
    }
    if (envied[who]) {
        if (enviers[who].size() == 1) {
            VertexId p = enviers[who][0];
            int shared = inst.pair_index(who, p);
            for (BundleId b : v.stage->holdings[p])
                if (v.bundle_pair[b] == shared) pool.push_back(b);
        }
    } else {
        for (BundleId b : v.stage->holdings[who]) pool.push_back(b);
    }
    AuditSelection best;
    std::vector<int> pairs_taken;
    audit_select(profile, v, who, pool, 0, 0, pairs_taken, 0, best);
    return best;
}

bool stage_efx_ok(const ValuationProfile& profile, const MultigraphInstance& inst,
                  const StageView& v, std::string& witness) {
    for (VertexId i = 0; i < inst.n; ++i)
        for (VertexId j = 0; j < inst.n; ++j) {
            if (i == j) continue;
            for (EdgeMask rest = v.held[j]; rest;) {
                EdgeMask bit = rest & (~rest + 1);
                rest ^= bit;
                if (v.own[i] < profile.value(i, v.held[j] ^ bit)) {
                    witness = "vertex " + std::to_string(i) + " not EFX against " + std::to_string(j);
                    return false;
                }
            }
        }
    return true;
}

}  // namespace

VerifyReport audit_trace(const ValuationProfile& profile, const MultigraphInstance& inst,
                         const ParsedTrace& trace) {
    VerifyReport report;
    report.add("header-n", trace.n == inst.n);
    report.add("header-edges", trace.total_edges == inst.total_edges());
    std::vector<std::string> expected_stages = {"bundle-table", "initial-allocation",
                                                "envy-reduction", "final-allocation"};
    bool stages_ok = trace.stages.size() == expected_stages.size();
    for (std::size_t k = 0; stages_ok && k < trace.stages.size(); ++k)
        stages_ok = trace.stages[k].name == expected_stages[k];
    report.add("stage-order", stages_ok);
    if (!report.pass) return report;

    for (const TraceStage& stage : trace.stages) {
        StageView v;
        try {
            v = view_of(profile, inst, stage);
        } catch (const InputError& err) {
            report.add("stage-" + stage.name + "-structure", false, err.what());
            return report;
        }
        // Partitions must tile their pair classes; every bundle must sit in
        // exactly its endpoints' families.
        bool structure_ok = true;
        std::string structure_witness;
        for (const PairPartition& pp : stage.partitions) {
            if (pp.pair < 0 || pp.pair >= static_cast<int>(inst.pairs.size())) {
                structure_ok = false;
                structure_witness = "partition references unknown pair";
                break;
            }
            const PairClass& pc = inst.pairs[pp.pair];
            EdgeMask class_mask = mask_of(pc.edge_ids);
            auto check_tiles = [&](const std::vector<BundleId>& ids) {
                EdgeMask seen = 0;
                for (BundleId b : ids) {
                    EdgeMask m = v.bundle_mask[b];
                    if (m == 0 || (m & ~class_mask) || (seen & m)) return false;
                    seen |= m;
                }
                return seen == class_mask;
            };
            bool tiles = pp.kind == PartitionKind::AuxBoth
                             ? pp.bundles.size() == 4 &&
                                   check_tiles({pp.bundles[0], pp.bundles[1]}) &&
                                   check_tiles({pp.bundles[2], pp.bundles[3]})
                             : check_tiles(pp.bundles);
            if (!tiles) {
                structure_ok = false;
                structure_witness = "pair " + std::to_string(pp.pair) + " bundles do not tile it";
                break;
            }
            for (BundleId b : pp.bundles) {
                for (VertexId w = 0; w < inst.n; ++w) {
                    bool member = std::count(stage.family[w].begin(), stage.family[w].end(), b) > 0;
                    bool endpoint = w == pc.u || w == pc.v;
                    if (member && !endpoint) {
                        structure_ok = false;
                        structure_witness = "bundle " + std::to_string(b) + " in a stranger's family";
                    }
                }
            }
        }
        report.add("stage-" + stage.name + "-structure", structure_ok, structure_witness);

        std::vector<std::vector<VertexId>> enviers;
        std::vector<char> envied = envied_flags(profile, inst, v, &enviers);

        for (const auto& [prop, claimed_pass] : stage.properties) {
            bool actual = true;
            std::string witness;
            if (prop == "efx-orientation") {
                for (VertexId i = 0; i < inst.n && actual; ++i) {
                    std::set<int> pairs_held;
                    for (BundleId b : stage.holdings[i]) {
                        int pr = v.bundle_pair[b];
                        const PairClass& pc = inst.pairs[pr];
                        if (pc.u != i && pc.v != i) actual = false;
                        if (!pairs_held.insert(pr).second) actual = false;
                        if (!std::count(stage.family[i].begin(), stage.family[i].end(), b))
                            actual = false;
                    }
                }
                if (actual) actual = stage_efx_ok(profile, inst, v, witness);
            } else if (prop == "no-preferred-unallocated") {
                for (VertexId i = 0; i < inst.n && actual; ++i)
                    for (BundleId b : stage_unallocated(v))
                        if (std::count(stage.family[i].begin(), stage.family[i].end(), b) &&
                            profile.value(i, v.bundle_mask[b]) > v.own[i])
                            actual = false;
            } else if (prop == "no-adjacent-envied") {
                for (const PairClass& pc : inst.pairs)
                    if (envied[pc.u] && envied[pc.v]) actual = false;
            } else if (prop == "envied-at-most-half") {
                actual = std::count(envied.begin(), envied.end(), 1) <= inst.n / 2;
            } else if (prop == "safe-vertex-near-envier") {
                for (VertexId i = 0; i < inst.n && actual; ++i) {
                    if (!envied[i]) continue;
                    if (enviers[i].size() != 1) {
                        actual = false;
                        break;
                    }
                    VertexId p = enviers[i][0];
                    if (!envied[p]) continue;
                    bool safe = false;
                    for (VertexId w : inst.adjacency[p])
                        if (!envied[w]) safe = true;
                    actual = safe;
                }
            } else if (prop == "no-preferred-selection") {
                for (VertexId i = 0; i < inst.n && actual; ++i) {
                    AuditSelection sel = audit_preferred(profile, inst, v, i, envied, enviers);
                    if (sel.value > v.own[i]) actual = false;
                }
            } else if (prop == "nonenvied-preserved") {
                const TraceStage& initial = trace.stages[1];
                StageView v1 = view_of(profile, inst, initial);
                std::vector<char> envied1 = envied_flags(profile, inst, v1, nullptr);
                for (VertexId i = 0; i < inst.n; ++i)
                    if (!envied1[i] && envied[i]) actual = false;
            } else if (prop == "pair-unallocated-bound") {
                std::map<int, int> per_pair;
                for (BundleId b : stage_unallocated(v)) per_pair[v.bundle_pair[b]]++;
                for (const PairPartition& pp : stage.partitions) {
                    const PairClass& pc = inst.pairs[pp.pair];
                    int q = (envied[pc.u] ? 1 : 0) + (envied[pc.v] ? 1 : 0);
                    int size = static_cast<int>(pp.bundles.size());
                    int un = per_pair.count(pp.pair) ? per_pair[pp.pair] : 0;
                    if (un > size + q - 2) actual = false;
                    if (size == 2 && un > 0 && q == 0) actual = false;
                }
            } else if (prop == "nonenvied-holds-per-neighbor") {
                for (VertexId i = 0; i < inst.n && actual; ++i) {
                    if (envied[i]) continue;
                    for (int pr : inst.incident_pairs[i]) {
                        bool has = false;
                        for (BundleId b : stage.holdings[i])
                            if (v.bundle_pair[b] == pr) has = true;
                        if (!has) actual = false;
                    }
                }
            } else if (prop == "complete") {
                EdgeMask covered = 0;
                bool disjoint = true;
                for (VertexId i = 0; i < inst.n; ++i) {
                    if (covered & v.held[i]) disjoint = false;
                    covered |= v.held[i];
                }
                EdgeMask all = 0;
                for (int e = 0; e < inst.total_edges(); ++e) all |= edge_bit(e);
                actual = disjoint && covered == all;
            } else if (prop == "efx") {
                actual = stage_efx_ok(profile, inst, v, witness);
            } else {
                report.add("stage-" + stage.name + "-prop-" + prop, false, "unknown property");
                continue;
            }
            report.add("stage-" + stage.name + "-prop-" + prop, actual == claimed_pass && actual,
                       witness);
        }
    }

    // Required property coverage per stage.
    auto has_prop = [&](int stage_idx, const std::string& name) {
        for (const auto& [prop, pass] : trace.stages[stage_idx].properties)
            if (prop == name && pass) return true;
        return false;
    };
    std::string p3 = trace.regime == "bipartite"     ? "no-adjacent-envied"
                     : trace.regime == "bounded"     ? "envied-at-most-half"
                     : trace.regime == "girth6"      ? "safe-vertex-near-envier"
                                                     : "?";
    report.add("coverage-initial", has_prop(1, "efx-orientation") &&
                                       has_prop(1, "no-preferred-unallocated") && has_prop(1, p3));
    report.add("coverage-reduction",
               has_prop(2, "efx-orientation") && has_prop(2, "no-preferred-unallocated") &&
                   has_prop(2, p3) && has_prop(2, "no-preferred-selection") &&
                   has_prop(2, "pair-unallocated-bound") &&
                   has_prop(2, "nonenvied-holds-per-neighbor"));
    report.add("coverage-final", has_prop(3, "complete") && has_prop(3, "efx"));

    // Replay the final stage's parks from the step-2 holdings.
    {
        const TraceStage& reduced = trace.stages[2];
        const TraceStage& final_stage = trace.stages[3];
        TraceStage replay = final_stage;
        replay.holdings = reduced.holdings;
        bool ok = true;
        std::string witness;
        for (const ParkRecord& park : final_stage.parks) {
            StageView v = view_of(profile, inst, replay);
            std::vector<std::vector<VertexId>> enviers;
            std::vector<char> envied = envied_flags(profile, inst, v, &enviers);
            int pr = v.bundle_pair[park.bundle];
            if (pr < 0) {
                ok = false;
                witness = "parked bundle unknown";
                break;
            }
            const PairClass& pc = inst.pairs[pr];
            if ((park.endpoint_u != pc.u || park.endpoint_v != pc.v) ||
                park.target == pc.u || park.target == pc.v) {
                ok = false;
                witness = "park on an endpoint or endpoints mislabeled";
                break;
            }
            if (v.holder[park.bundle] != -1) {
                ok = false;
                witness = "parked bundle already held";
                break;
            }
            if (envied[park.target]) {
                ok = false;
                witness = "park target is envied";
                break;
            }
            bool parallel = false;
            for (BundleId b : replay.holdings[park.target])
                if (v.bundle_pair[b] == pr) parallel = true;
            if (parallel) {
                ok = false;
                witness = "park target already holds a parallel bundle";
                break;
            }
            EdgeMask grown = v.held[park.target] | v.bundle_mask[park.bundle];
            for (VertexId endpoint : {pc.u, pc.v})
                if (v.own[endpoint] < profile.value(endpoint, grown)) {
                    ok = false;
                    witness = "park would make endpoint " + std::to_string(endpoint) + " envious";
                }
            if (!ok) break;
            replay.holdings[park.target].push_back(park.bundle);
            std::sort(replay.holdings[park.target].begin(), replay.holdings[park.target].end());
        }
        if (ok) {
            for (VertexId i = 0; i < inst.n; ++i)
                if (replay.holdings[i] != final_stage.holdings[i]) {
                    ok = false;
                    witness = "final holdings differ from step-2 holdings plus parks";
                }
        }
        report.add("park-replay", ok, witness);
    }
    return report;
}

}  // namespace efx
