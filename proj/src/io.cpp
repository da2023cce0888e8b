#include "efx/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace efx {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

std::vector<std::string> tokens_of(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

long long to_int(const std::string& s, int line_no) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + s + "'", line_no);
    }
}

std::vector<int> parse_id_list(const std::string& s, int line_no) {
    std::vector<int> out;
    if (s == "-") return out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(static_cast<int>(to_int(cur, line_no)));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    return out;
}

std::string join_ids(const std::vector<int>& ids) {
    if (ids.empty()) return "-";
    std::string out;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (k) out += ',';
        out += std::to_string(ids[k]);
    }
    return out;
}

}  // namespace

RawInstance parse_instance(const std::string& text) {
    auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "efx-instance v1")
        throw ParseError("missing 'efx-instance v1' header", 1);
    RawInstance raw;
    bool have_n = false;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        int line_no = static_cast<int>(k + 1);
        auto toks = tokens_of(lines[k]);
        if (toks.empty()) continue;
        if (toks[0] == "n") {
            if (toks.size() != 2) throw ParseError("expected 'n <int>'", line_no);
            raw.n = static_cast<int>(to_int(toks[1], line_no));
            have_n = true;
        } else if (toks[0] == "edge") {
            if (toks.size() != 3) throw ParseError("expected 'edge <a> <b>'", line_no);
            if (!have_n) throw ParseError("'edge' before 'n'", line_no);
            raw.edges.emplace_back(static_cast<int>(to_int(toks[1], line_no)),
                                   static_cast<int>(to_int(toks[2], line_no)));
        } else {
            throw ParseError("unknown directive '" + toks[0] + "'", line_no);
        }
    }
    if (!have_n) throw ParseError("missing 'n' line", static_cast<int>(lines.size()));
    return raw;
}

std::string write_instance(const MultigraphInstance& inst) {
    std::string out = "efx-instance v1\n";
    out += "n " + std::to_string(inst.n) + "\n";
    for (int e = 0; e < inst.real_edge_count; ++e)
        out += "edge " + std::to_string(inst.edges[e].a) + " " + std::to_string(inst.edges[e].b) + "\n";
    return out;
}

ValuationProfile parse_valuation(const std::string& text, const MultigraphInstance& inst) {
    auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "efx-valuation v1")
        throw ParseError("missing 'efx-valuation v1' header", 1);
    std::vector<std::vector<std::pair<EdgeId, Value>>> additive(inst.n);
    std::vector<std::vector<std::pair<std::vector<EdgeId>, Value>>> tables(inst.n);
    std::vector<int> mode(inst.n, 0);  // 0 unset, 1 additive, 2 table
    int current_table_vertex = -1;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        int line_no = static_cast<int>(k + 1);
        auto toks = tokens_of(lines[k]);
        if (toks.empty()) continue;
        if (toks[0] == "additive") {
            if (toks.size() < 2) throw ParseError("expected 'additive <vertex> ...'", line_no);
            int v = static_cast<int>(to_int(toks[1], line_no));
            if (v < 0 || v >= inst.n) throw ParseError("vertex out of range", line_no);
            if (mode[v]) throw ParseError("vertex " + std::to_string(v) + " defined twice", line_no);
            mode[v] = 1;
            current_table_vertex = -1;
            for (std::size_t t = 2; t < toks.size(); ++t) {
                auto eq = toks[t].find('=');
                if (eq == std::string::npos)
                    throw ParseError("expected '<edge>=<value>', got '" + toks[t] + "'", line_no);
                additive[v].emplace_back(
                    static_cast<EdgeId>(to_int(toks[t].substr(0, eq), line_no)),
                    to_int(toks[t].substr(eq + 1), line_no));
            }
        } else if (toks[0] == "table") {
            if (toks.size() != 2) throw ParseError("expected 'table <vertex>'", line_no);
            int v = static_cast<int>(to_int(toks[1], line_no));
            if (v < 0 || v >= inst.n) throw ParseError("vertex out of range", line_no);
            if (mode[v]) throw ParseError("vertex " + std::to_string(v) + " defined twice", line_no);
            mode[v] = 2;
            current_table_vertex = v;
        } else if (toks[0] == "set") {
            if (current_table_vertex == -1)
                throw ParseError("'set' outside a table section", line_no);
            // set <e0,e1,...> = <value>
            if (toks.size() != 4 || toks[2] != "=")
                throw ParseError("expected 'set <edges> = <value>'", line_no);
            std::vector<EdgeId> ids;
            for (int id : parse_id_list(toks[1], line_no)) ids.push_back(id);
            tables[current_table_vertex].emplace_back(ids, to_int(toks[3], line_no));
        } else {
            throw ParseError("unknown directive '" + toks[0] + "'", line_no);
        }
    }
    // Vertices stay additive-all-zero unless declared as tables.
    ValuationProfile add_part = make_additive(inst, additive);
    bool any_table = std::count(mode.begin(), mode.end(), 2) > 0;
    if (!any_table) return add_part;
    ValuationProfile table_part = make_table(inst, tables);
    for (VertexId v = 0; v < inst.n; ++v)
        if (mode[v] == 2) add_part.vertex[v] = table_part.vertex[v];
    return add_part;
}

std::string write_valuation(const ValuationProfile& profile, const MultigraphInstance& inst) {
    std::string out = "efx-valuation v1\n";
    for (VertexId v = 0; v < inst.n; ++v) {
        const VertexValuation& vv = profile.vertex[v];
        if (vv.support.empty()) continue;
        if (vv.kind == ValuationKind::Additive) {
            out += "additive " + std::to_string(v);
            for (std::size_t k = 0; k < vv.support.size(); ++k)
                out += " " + std::to_string(vv.support[k]) + "=" + std::to_string(vv.weights[k]);
            out += "\n";
        } else {
            out += "table " + std::to_string(v) + "\n";
            // Only entries above their monotone closure are written; the
            // parser's closure restores the rest exactly.
            int deg = static_cast<int>(vv.support.size());
            for (std::uint32_t m = 1; m < (1u << deg); ++m) {
                Value inherited = 0;
                for (int k = 0; k < deg; ++k)
                    if (m & (1u << k)) inherited = std::max(inherited, vv.table[m ^ (1u << k)]);
                if (vv.table[m] == inherited) continue;
                std::vector<int> ids;
                for (int k = 0; k < deg; ++k)
                    if (m & (1u << k)) ids.push_back(vv.support[k]);
                out += "set " + join_ids(ids) + " = " + std::to_string(vv.table[m]) + "\n";
            }
        }
    }
    return out;
}

std::vector<std::vector<EdgeId>> parse_allocation(const std::string& text, int n) {
    auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "efx-allocation v1")
        throw ParseError("missing 'efx-allocation v1' header", 1);
    std::vector<std::vector<EdgeId>> alloc(n);
    std::vector<char> seen(n, 0);
    for (std::size_t k = 1; k < lines.size(); ++k) {
        int line_no = static_cast<int>(k + 1);
        auto toks = tokens_of(lines[k]);
        if (toks.empty()) continue;
        if (toks[0] != "vertex") throw ParseError("expected 'vertex <i>: ...'", line_no);
        if (toks.size() < 2 || toks[1].back() != ':')
            throw ParseError("expected 'vertex <i>:'", line_no);
        int v = static_cast<int>(to_int(toks[1].substr(0, toks[1].size() - 1), line_no));
        if (v < 0 || v >= n) throw ParseError("vertex out of range", line_no);
        if (seen[v]) throw ParseError("vertex " + std::to_string(v) + " listed twice", line_no);
        seen[v] = 1;
        for (std::size_t t = 2; t < toks.size(); ++t)
            alloc[v].push_back(static_cast<EdgeId>(to_int(toks[t], line_no)));
        std::sort(alloc[v].begin(), alloc[v].end());
    }
    return alloc;
}

std::string write_allocation(const std::vector<std::vector<EdgeId>>& allocation) {
    std::string out = "efx-allocation v1\n";
    for (std::size_t v = 0; v < allocation.size(); ++v) {
        out += "vertex " + std::to_string(v) + ":";
        for (EdgeId e : allocation[v]) out += " " + std::to_string(e);
        out += "\n";
    }
    return out;
}

std::string write_trace(const PipelineTrace& trace) {
    std::string out = "efx-trace v1\n";
    out += "n " + std::to_string(trace.n) + "\n";
    out += "edges " + std::to_string(trace.total_edges) + "\n";
    out += "regime " + std::string(regime_name(trace.regime)) + "\n";
    for (const std::string& note : trace.notes) out += "note " + note + "\n";
    for (const StageSnapshot& stage : trace.stages) {
        out += "stage " + stage.name + "\n";
        for (const PairPartition& pp : stage.table.partitions) {
            out += "pair " + std::to_string(pp.pair) + " kind " + partition_kind_name(pp.kind) +
                   " cutter " + std::to_string(pp.cutter) + " bundles ";
            out += join_ids(pp.bundles) + "\n";
            for (BundleId b : pp.bundles)
                out += "bundle " + std::to_string(b) + " edges " +
                       join_ids(stage.table.bundles[b].edges) + "\n";
        }
        for (std::size_t v = 0; v < stage.table.family.size(); ++v)
            out += "family " + std::to_string(v) + " " + join_ids(stage.table.family[v]) + "\n";
        for (std::size_t v = 0; v < stage.state.holdings.size(); ++v)
            out += "hold " + std::to_string(v) + " " + join_ids(stage.state.holdings[v]) + "\n";
        for (const auto& [name, pass] : stage.properties)
            out += "prop " + name + " " + (pass ? "pass" : "fail") + "\n";
        for (const ParkRecord& park : stage.parks)
            out += "park " + std::to_string(park.bundle) + " endpoints " +
                   std::to_string(park.endpoint_u) + " " + std::to_string(park.endpoint_v) +
                   " on " + std::to_string(park.target) + " " +
                   (park.constructive ? "constructive" : "fallback") + "\n";
        out += "endstage\n";
    }
    out += "end\n";
    return out;
}

ParsedTrace parse_trace(const std::string& text) {
    auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "efx-trace v1")
        throw ParseError("missing 'efx-trace v1' header", 1);
    ParsedTrace trace;
    TraceStage stage;
    bool in_stage = false;
    bool ended = false;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        int line_no = static_cast<int>(k + 1);
        auto toks = tokens_of(lines[k]);
        if (toks.empty()) continue;
        const std::string& head = toks[0];
        if (head == "n" && toks.size() == 2) {
            trace.n = static_cast<int>(to_int(toks[1], line_no));
        } else if (head == "edges" && toks.size() == 2) {
            trace.total_edges = static_cast<int>(to_int(toks[1], line_no));
        } else if (head == "regime" && toks.size() == 2) {
            trace.regime = toks[1];
        } else if (head == "note") {
            std::string note;
            for (std::size_t t = 1; t < toks.size(); ++t) note += (t > 1 ? " " : "") + toks[t];
            trace.notes.push_back(note);
        } else if (head == "stage" && toks.size() == 2) {
            if (in_stage) throw ParseError("nested stage", line_no);
            in_stage = true;
            stage = TraceStage{};
            stage.name = toks[1];
            stage.family.assign(trace.n, {});
            stage.holdings.assign(trace.n, {});
        } else if (head == "pair") {
            if (!in_stage || toks.size() != 8 || toks[2] != "kind" || toks[4] != "cutter" ||
                toks[6] != "bundles")
                throw ParseError("malformed pair line", line_no);
            PairPartition pp;
            pp.pair = static_cast<int>(to_int(toks[1], line_no));
            if (toks[3] == "oriented2") pp.kind = PartitionKind::Oriented2;
            else if (toks[3] == "common2") pp.kind = PartitionKind::Common2;
            else if (toks[3] == "threepart") pp.kind = PartitionKind::ThreePart;
            else if (toks[3] == "auxboth") pp.kind = PartitionKind::AuxBoth;
            else throw ParseError("unknown partition kind '" + toks[3] + "'", line_no);
            pp.cutter = static_cast<int>(to_int(toks[5], line_no));
            for (int id : parse_id_list(toks[7], line_no)) pp.bundles.push_back(id);
            stage.partitions.push_back(pp);
        } else if (head == "bundle") {
            if (!in_stage || toks.size() != 4 || toks[2] != "edges")
                throw ParseError("malformed bundle line", line_no);
            BundleId id = static_cast<BundleId>(to_int(toks[1], line_no));
            std::vector<EdgeId> edges;
            for (int e : parse_id_list(toks[3], line_no)) edges.push_back(e);
            stage.bundles[id] = edges;
        } else if (head == "family" || head == "hold") {
            if (!in_stage || toks.size() != 3) throw ParseError("malformed " + head + " line", line_no);
            int v = static_cast<int>(to_int(toks[1], line_no));
            if (v < 0 || v >= trace.n) throw ParseError("vertex out of range", line_no);
            auto& dst = head == "family" ? stage.family[v] : stage.holdings[v];
            for (int id : parse_id_list(toks[2], line_no)) dst.push_back(id);
        } else if (head == "prop") {
            if (!in_stage || toks.size() != 3 || (toks[2] != "pass" && toks[2] != "fail"))
                throw ParseError("malformed prop line", line_no);
            stage.properties.emplace_back(toks[1], toks[2] == "pass");
        } else if (head == "park") {
            if (!in_stage || toks.size() != 8 || toks[2] != "endpoints" || toks[5] != "on")
                throw ParseError("malformed park line", line_no);
            ParkRecord park;
            park.bundle = static_cast<BundleId>(to_int(toks[1], line_no));
            park.endpoint_u = static_cast<int>(to_int(toks[3], line_no));
            park.endpoint_v = static_cast<int>(to_int(toks[4], line_no));
            park.target = static_cast<int>(to_int(toks[6], line_no));
            if (toks[7] != "constructive" && toks[7] != "fallback")
                throw ParseError("malformed park branch", line_no);
            park.constructive = toks[7] == "constructive";
            stage.parks.push_back(park);
        } else if (head == "endstage") {
            if (!in_stage) throw ParseError("endstage outside a stage", line_no);
            in_stage = false;
            trace.stages.push_back(std::move(stage));
        } else if (head == "end") {
            if (in_stage) throw ParseError("end inside a stage", line_no);
            ended = true;
        } else {
            throw ParseError("unknown directive '" + head + "'", line_no);
        }
    }
    if (in_stage || !ended)
        throw ParseError("trace truncated", static_cast<int>(lines.size()) + 1);
    return trace;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << content;
}

}  // namespace efx
