#pragma once

#include "cyclesynth/dra.hpp"
#include "cyclesynth/mdp.hpp"
#include "cyclesynth/product.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cyclesynth {

inline constexpr const char* kRngName = "mt19937_64";

struct PairEvidence {
    PairCounters counters;
    std::size_t lAfterEntry = 0;
    std::size_t kAfterEntry = 0;
};

/**
 * Outcome of one simulated path s_0 .. s_N. The cost sums the N stage costs
 * g(s_k, u_k), k < N. Every arrival into the cycle set at stages 1..N
 * completes a cycle; the cycle index starts at 1.
 */
struct SimReport {
    std::size_t stages = 0;
    double totalCost = 0.0;
    std::size_t cycles = 1;
    double empiricalAcpc = 0.0;
    std::uint64_t seed = 0;
    std::string rng = kRngName;
    std::vector<PairEvidence> pairs;
    std::optional<std::size_t> entryStage;  // first stage inside the watched set
    std::vector<double> cycleCosts;          // filled when requested
    std::vector<double> stageCosts;          // filled when requested

    double cycleCostStdDev() const;
};

struct SimOptions {
    StateSet watch;  // entry into this set is logged
    bool recordCycleCosts = false;
    bool recordStageCosts = false;
};

SimReport simulate(const LabeledMdp& mdp, const StationaryPolicy& policy, const StateSet& piStates,
                   std::size_t stages, std::uint64_t seed, const SimOptions& options = {});

/// Product-level run with acceptance evidence for every lifted pair.
SimReport simulate(const ProductMdp& product, const StationaryPolicy& policy, std::size_t stages,
                   std::uint64_t seed, const SimOptions& options = {});

/// Run on M under a DRA-tracking controller. Pair evidence comes from the
/// automaton run; `watch` is interpreted as product indices.
SimReport simulate(const LabeledMdp& mdp, const Dra& dra, ExecutablePolicy& controller,
                   const std::string& pi, std::size_t stages, std::uint64_t seed,
                   const SimOptions& options = {});

std::string simReportToJson(const SimReport& report);
std::string cycleCostsCsv(const SimReport& report);

}  // namespace cyclesynth
