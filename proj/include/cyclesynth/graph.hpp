#pragma once

#include <cstddef>
#include <vector>

namespace cyclesynth {

using StateSet = std::vector<std::size_t>;  // sorted, unique
using Adjacency = std::vector<std::vector<std::size_t>>;

/// Strongly connected components (Tarjan, iterative). `component[i]` is the
/// index of the SCC holding vertex i; components come out in reverse
/// topological order (sinks first).
struct SccDecomposition {
    std::vector<std::size_t> component;
    std::vector<std::vector<std::size_t>> members;
};

SccDecomposition stronglyConnectedComponents(const Adjacency& graph);

/// SCCs with no edge leaving them.
std::vector<std::vector<std::size_t>> bottomComponents(const Adjacency& graph);

/// Vertices reachable from any of `sources` (sources included).
std::vector<bool> forwardReachable(const Adjacency& graph, const StateSet& sources);

/// Vertices that can reach any of `targets` (targets included).
std::vector<bool> backwardReachable(const Adjacency& graph, const StateSet& targets);

Adjacency reverseGraph(const Adjacency& graph);

StateSet maskToSet(const std::vector<bool>& mask);
std::vector<bool> setToMask(const StateSet& set, std::size_t n);

}  // namespace cyclesynth
