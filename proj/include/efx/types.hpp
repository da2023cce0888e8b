#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace efx {

// Valuations are exact integers; the solver branches on strict comparisons
// and ties, so no floating point anywhere.
using Value = long long;

using VertexId = int;
using EdgeId = int;
using BundleId = int;

// Edge sets are single-word bitmasks. build_instance enforces the limit
// (including inserted dummy edges).
using EdgeMask = std::uint64_t;
constexpr int kMaxEdges = 64;

constexpr EdgeMask edge_bit(EdgeId e) { return EdgeMask{1} << e; }

EdgeMask mask_of(const std::vector<EdgeId>& edges);
std::vector<EdgeId> edges_of(EdgeMask mask);

inline int popcount(EdgeMask m) { return __builtin_popcountll(m); }

// Bad user input: malformed instances, infeasible generator parameters,
// valuations failing preconditions.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file; carries the offending 1-based line number.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line_no)
        : std::runtime_error(what + " (line " + std::to_string(line_no) + ")"),
          line(line_no) {}
    int line;
};

// Instance fits none of the supported structural regimes (or a forced
// regime does not apply).
struct RegimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A solver invariant that the construction guarantees was violated. Never expected
// to fire on accepted instances; indicates a bug, not bad input.
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace efx
