#pragma once

#include <cstdint>

#include "efx/valuation.hpp"

namespace efx {

enum class Family { Bipartite, Bounded, Girth6 };

const char* family_name(Family f);
Family family_from_name(const std::string& name);
Regime regime_of(Family f);

struct GenParams {
    int n = 6;
    int max_multiplicity = 3;  // edges per chosen pair
    int neighbors = 1;         // bounded family only: neighbor cap per vertex
    int max_edges = 14;        // budget for real edges
};

// Deterministic in the seed; the returned instance always satisfies the
// requested family's regime (asserted via detect_regimes).
MultigraphInstance generate_instance(Family family, const GenParams& params, std::uint64_t seed);

enum class ValuationFamily { Additive, Monotone };

ValuationFamily valuation_family_from_name(const std::string& name);
const char* valuation_family_name(ValuationFamily f);

ValuationProfile generate_valuation(const MultigraphInstance& inst, ValuationFamily family,
                                    std::uint64_t seed, Value scale);

}  // namespace efx
