#pragma once

#include "cyclesynth/graph.hpp"

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace cyclesynth {

using ActionId = std::size_t;
inline constexpr ActionId kNoAction = std::numeric_limits<ActionId>::max();

struct Transition {
    std::size_t target;
    double probability;
};

/// One available action at a state: its transition row and stage cost.
struct Choice {
    ActionId action;
    double cost;
    std::vector<Transition> row;
};

/**
 * Labeled MDP. States are 0..n-1. `actions` is the global alphabet; the
 * actions available at state i are exactly the entries of `choices[i]`.
 * Labels are sorted proposition names.
 */
struct LabeledMdp {
    std::vector<std::string> actions;
    std::vector<std::vector<Choice>> choices;
    std::vector<std::vector<std::string>> labels;
    std::vector<std::string> propositions;
    std::size_t init = 0;

    std::size_t numStates() const { return choices.size(); }

    /// nullptr when `action` is not available at `state`.
    const Choice* find(std::size_t state, ActionId action) const;

    bool hasLabel(std::size_t state, std::string_view prop) const;

    /// States whose label contains `prop`.
    StateSet statesLabeled(std::string_view prop) const;

    std::size_t actionIndex(std::string_view name) const;  // kNoAction if unknown
};

/// Deterministic memoryless policy; kNoAction marks states it is not defined on.
struct StationaryPolicy {
    std::vector<ActionId> choice;

    bool isTotal() const;
};

struct ChainStructure {
    std::vector<StateSet> recurrentClasses;
    StateSet transientStates;
    /// reachability[i] holds every state reachable from i (i included).
    std::vector<StateSet> reachability;
};

struct Violation {
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

inline constexpr double kRowSumTolerance = 1e-9;

ValidationReport validate(const LabeledMdp& mdp);

/// Throws InvariantViolation with the full report when `mdp` is invalid.
void requireValid(const LabeledMdp& mdp);

/// Positive-probability digraph of the chain induced by `policy`.
Adjacency policyGraph(const LabeledMdp& mdp, const StationaryPolicy& policy);

/// Union over all available actions of positive-probability edges.
Adjacency actionGraph(const LabeledMdp& mdp);

ChainStructure inducedChain(const LabeledMdp& mdp, const StationaryPolicy& policy);

/// Every state reaches `target` with positive probability under `policy`.
bool isProper(const LabeledMdp& mdp, const StationaryPolicy& policy, const StateSet& target);

bool isCommunicating(const LabeledMdp& mdp);

/// Row i of the chain matrix and cost vector induced by `policy`.
const Choice& chosen(const LabeledMdp& mdp, const StationaryPolicy& policy, std::size_t state);

// JSON file format:
// {"states":[{"id":int,"label":[str]}], "actions":[str],
//  "available":{state:[action]}, "trans":{"state,action":[[j,prob],...]},
//  "cost":{"state,action":float}, "init":int}
// State objects may also carry an informational "name" string.

/// Parses, renormalizes rows once and validates. Throws ParseError or
/// InvariantViolation.
LabeledMdp parseMdpJson(std::string_view text);
LabeledMdp loadMdpFile(const std::string& path);

/// `stateNames`, when non-empty, is emitted as the "name" of each state.
std::string toMdpJson(const LabeledMdp& mdp, const std::vector<std::string>& stateNames = {});

}  // namespace cyclesynth
