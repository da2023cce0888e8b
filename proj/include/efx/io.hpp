#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "efx/pipeline.hpp"

namespace efx {

// Line-oriented text formats, each with a versioned header:
//   efx-instance v1    n <int>, then `edge <a> <b>` per real edge (ids = file order)
//   efx-valuation v1   `additive <v> <e>=<w> ...` or `table <v>` + `set <e,..> = <w>`
//   efx-allocation v1  `vertex <i>: <edge ids>`
//   efx-trace v1       stage blocks, see write_trace

struct RawInstance {
    int n = 0;
    std::vector<std::pair<VertexId, VertexId>> edges;
};

RawInstance parse_instance(const std::string& text);
std::string write_instance(const MultigraphInstance& inst);

ValuationProfile parse_valuation(const std::string& text, const MultigraphInstance& inst);
std::string write_valuation(const ValuationProfile& profile, const MultigraphInstance& inst);

std::vector<std::vector<EdgeId>> parse_allocation(const std::string& text, int n);
std::string write_allocation(const std::vector<std::vector<EdgeId>>& allocation);

std::string write_trace(const PipelineTrace& trace);

// Parsed form of a trace file, consumed by the auditor.
struct TraceStage {
    std::string name;
    std::vector<PairPartition> partitions;              // pair field = index into instance pairs
    std::map<BundleId, std::vector<EdgeId>> bundles;
    std::vector<std::vector<BundleId>> family;
    std::vector<std::vector<BundleId>> holdings;
    std::vector<std::pair<std::string, bool>> properties;
    std::vector<ParkRecord> parks;
};

struct ParsedTrace {
    std::string regime;
    int n = 0;
    int total_edges = 0;
    std::vector<std::string> notes;
    std::vector<TraceStage> stages;
};

ParsedTrace parse_trace(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace efx
