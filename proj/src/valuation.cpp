#include "efx/valuation.hpp"

#include <algorithm>

#include "efx/rng.hpp"

namespace efx {

namespace {

std::vector<EdgeId> support_of(const MultigraphInstance& inst, VertexId i) {
    return edges_of(inst.relevant_real[i]);
}

// Compress a global edge mask onto the vertex's support bit positions.
std::uint32_t local_mask(const VertexValuation& vv, EdgeMask goods) {
    std::uint32_t local = 0;
    for (std::size_t k = 0; k < vv.support.size(); ++k)
        if (goods & edge_bit(vv.support[k])) local |= 1u << k;
    return local;
}

}  // namespace

Value ValuationProfile::value(VertexId i, EdgeMask goods) const {
    if (i < 0 || i >= static_cast<VertexId>(vertex.size()))
        throw InputError("valuation queried for unknown vertex " + std::to_string(i));
    const VertexValuation& vv = vertex[i];
    if (vv.kind == ValuationKind::Additive) {
        Value total = 0;
        for (std::size_t k = 0; k < vv.support.size(); ++k)
            if (goods & edge_bit(vv.support[k])) total += vv.weights[k];
        return total;
    }
    return vv.table[local_mask(vv, goods)];
}

ValuationProfile make_additive(const MultigraphInstance& inst,
                               const std::vector<std::vector<std::pair<EdgeId, Value>>>& weights) {
    ValuationProfile profile;
    profile.vertex.resize(inst.n);
    for (VertexId i = 0; i < inst.n; ++i) {
        VertexValuation& vv = profile.vertex[i];
        vv.kind = ValuationKind::Additive;
        vv.support = support_of(inst, i);
        vv.weights.assign(vv.support.size(), 0);
        if (i < static_cast<VertexId>(weights.size())) {
            for (auto [e, w] : weights[i]) {
                if (w < 0) throw InputError("vertex " + std::to_string(i) + ": negative weight");
                auto it = std::lower_bound(vv.support.begin(), vv.support.end(), e);
                if (it == vv.support.end() || *it != e)
                    throw InputError("vertex " + std::to_string(i) + ": edge " + std::to_string(e) +
                                     " is not a relevant real edge");
                vv.weights[it - vv.support.begin()] = w;
            }
        }
    }
    return profile;
}

ValuationProfile make_table(const MultigraphInstance& inst,
                            const std::vector<std::vector<std::pair<std::vector<EdgeId>, Value>>>& entries,
                            int cap) {
    ValuationProfile profile;
    profile.vertex.resize(inst.n);
    for (VertexId i = 0; i < inst.n; ++i) {
        VertexValuation& vv = profile.vertex[i];
        vv.kind = ValuationKind::Table;
        vv.support = support_of(inst, i);
        int deg = static_cast<int>(vv.support.size());
        if (deg > cap)
            throw InputError("vertex " + std::to_string(i) + ": degree " + std::to_string(deg) +
                             " exceeds the table cap " + std::to_string(cap));
        std::vector<Value> given(std::size_t{1} << deg, -1);
        if (i < static_cast<VertexId>(entries.size())) {
            for (const auto& [set, val] : entries[i]) {
                if (val < 0) throw InputError("vertex " + std::to_string(i) + ": negative value");
                std::uint32_t m = local_mask(vv, mask_of(set));
                if (popcount(mask_of(set) & ~inst.relevant_real[i]) > 0)
                    throw InputError("vertex " + std::to_string(i) + ": set mentions an irrelevant edge");
                if (m == 0 && val != 0)
                    throw InputError("vertex " + std::to_string(i) + ": v(empty) must be 0");
                given[m] = val;
            }
        }
        vv.table.assign(std::size_t{1} << deg, 0);
        for (std::uint32_t m = 1; m < vv.table.size(); ++m) {
            Value inherited = 0;
            for (int k = 0; k < deg; ++k)
                if (m & (1u << k)) inherited = std::max(inherited, vv.table[m ^ (1u << k)]);
            vv.table[m] = given[m] >= 0 ? given[m] : inherited;
        }
    }
    return profile;
}

ValuationProfile make_seeded_monotone(const MultigraphInstance& inst, std::uint64_t seed,
                                      Value scale, int cap) {
    if (scale < 0) throw InputError("scale must be nonnegative");
    ValuationProfile profile;
    profile.vertex.resize(inst.n);
    for (VertexId i = 0; i < inst.n; ++i) {
        VertexValuation& vv = profile.vertex[i];
        vv.kind = ValuationKind::SeededMonotone;
        vv.support = support_of(inst, i);
        int deg = static_cast<int>(vv.support.size());
        if (deg > cap)
            throw InputError("vertex " + std::to_string(i) + ": degree " + std::to_string(deg) +
                             " exceeds the table cap " + std::to_string(cap));
        Rng rng(Rng::mix(seed, 0x76616c75ULL + static_cast<std::uint64_t>(i)));
        vv.table.assign(std::size_t{1} << deg, 0);
        // Ascending mask order visits every one-smaller subset first.
        for (std::uint32_t m = 1; m < vv.table.size(); ++m) {
            Value base = 0;
            for (int k = 0; k < deg; ++k)
                if (m & (1u << k)) base = std::max(base, vv.table[m ^ (1u << k)]);
            vv.table[m] = base + static_cast<Value>(rng.below(static_cast<std::uint64_t>(scale) + 1));
        }
    }
    return profile;
}

ValuationProfile make_seeded_additive(const MultigraphInstance& inst, std::uint64_t seed, Value scale) {
    if (scale < 0) throw InputError("scale must be nonnegative");
    ValuationProfile profile;
    profile.vertex.resize(inst.n);
    for (VertexId i = 0; i < inst.n; ++i) {
        VertexValuation& vv = profile.vertex[i];
        vv.kind = ValuationKind::Additive;
        vv.support = support_of(inst, i);
        Rng rng(Rng::mix(seed, 0x61646474ULL + static_cast<std::uint64_t>(i)));
        vv.weights.resize(vv.support.size());
        for (Value& w : vv.weights)
            w = static_cast<Value>(rng.below(static_cast<std::uint64_t>(scale) + 1));
    }
    return profile;
}

AuditReport audit_monotone(const ValuationProfile& profile, const MultigraphInstance& inst, int cap) {
    AuditReport report;
    for (VertexId i = 0; i < inst.n && i < static_cast<VertexId>(profile.vertex.size()); ++i) {
        const VertexValuation& vv = profile.vertex[i];
        int deg = static_cast<int>(vv.support.size());
        auto eval = [&](std::uint64_t m) {
            EdgeMask g = 0;
            for (int k = 0; k < deg; ++k)
                if (m & (std::uint64_t{1} << k)) g |= edge_bit(vv.support[k]);
            return std::make_pair(g, profile.value(i, g));
        };
        auto record = [&](std::uint64_t sub, std::uint64_t sup) {
            auto [gs, vs] = eval(sub);
            auto [gt, vt] = eval(sup);
            if (vs > vt) report.violations.push_back({i, gs, gt, vs, vt});
        };
        if (profile.value(i, EdgeMask{0}) != 0)
            report.violations.push_back({i, 0, 0, profile.value(i, EdgeMask{0}), 0});
        if (deg <= cap) {
            // Checking covers suffices: monotonicity over one-element steps
            // implies it over arbitrary inclusions.
            for (std::uint64_t m = 1; m < (std::uint64_t{1} << deg); ++m)
                for (int k = 0; k < deg; ++k)
                    if (m & (std::uint64_t{1} << k)) record(m ^ (std::uint64_t{1} << k), m);
        } else {
            report.exhaustive = false;
            Rng rng(Rng::mix(0xa0d17ULL, static_cast<std::uint64_t>(i)));
            for (int trial = 0; trial < 4096; ++trial) {
                std::uint64_t sup = rng.next() & ((std::uint64_t{1} << deg) - 1);
                std::uint64_t sub = sup & rng.next();
                record(sub, sup);
            }
        }
    }
    return report;
}

}  // namespace efx
