#pragma once

#include "cyclesynth/graph.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cyclesynth {

/// Input symbol: bit b set iff the b-th declared proposition holds.
using Symbol = std::uint32_t;

struct RabinPair {
    StateSet avoid;  // L: visited finitely often
    StateSet visit;  // K: visited infinitely often

    bool operator==(const RabinPair&) const = default;
};

/**
 * Deterministic Rabin automaton over 2^AP. The transition table is total and
 * stored row-major: delta[q * 2^|AP| + symbol].
 */
struct Dra {
    std::size_t numStates = 0;
    std::vector<std::string> ap;
    std::size_t start = 0;
    std::vector<RabinPair> pairs;
    std::vector<std::size_t> delta;

    std::size_t numSymbols() const { return std::size_t{1} << ap.size(); }
    std::size_t next(std::size_t state, Symbol symbol) const {
        return delta[state * numSymbols() + symbol];
    }

    /// Symbol for a set of proposition names; names outside `ap` are ignored.
    Symbol symbolOf(const std::vector<std::string>& props) const;

    /// Sorted proposition names of a symbol, comma-joined ("" for the empty set).
    std::string symbolKey(Symbol symbol) const;

    std::size_t apIndex(std::string_view name) const;  // ap.size() if absent

    bool operator==(const Dra&) const = default;
};

inline constexpr std::size_t kMaxPropositions = 16;

/// Throws InvariantViolation on a non-total table, empty K, empty pair list,
/// or out-of-range indices.
void validateDra(const Dra& dra);

// {"states":int,"ap":[str],"start":int,"pairs":[{"L":[int],"K":[int]}],
//  "trans":{"state":{"symbol":int}}}
Dra parseDraJson(std::string_view text);
std::string toDraJson(const Dra& dra);

/// ltl2dstar "DRA v2 explicit" format.
Dra parseLtl2dstarV2(std::string_view text);

/// Dispatches on the "DRA v" header; anything else is read as JSON.
Dra parseDra(std::string_view text);
Dra loadDraFile(const std::string& path);

struct PairCounters {
    std::size_t countL = 0;
    std::size_t countK = 0;
    long long lastLIndex = -1;  // -1 when L was never visited
};

/// Per-pair visit counts over a finite run. Throws InvalidRun when two
/// consecutive states are not linked by any symbol.
std::vector<PairCounters> acceptanceCounters(const Dra& dra, const std::vector<std::size_t>& run);

}  // namespace cyclesynth
