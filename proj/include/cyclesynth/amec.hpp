#pragma once

#include "cyclesynth/mdp.hpp"
#include "cyclesynth/product.hpp"

#include <string>
#include <vector>

namespace cyclesynth {

/// States plus, for each of them (same order), the actions kept inside.
struct EndComponent {
    StateSet states;
    std::vector<std::vector<ActionId>> actions;

    bool operator==(const EndComponent&) const = default;
};

/// Maximal end components of `mdp` restricted to the states in `allowed`
/// (all states when empty). Components are disjoint, sorted by first state.
std::vector<EndComponent> maximalEndComponents(const LabeledMdp& mdp,
                                               const std::vector<bool>& allowed = {});

std::vector<EndComponent> maximalEndComponents(const ProductMdp& product);

/**
 * Accepting maximal end component. `sub` is the component as a standalone
 * MDP over local indices 0..|S_C|-1; `toProduct` maps local to product
 * indices. kStates and piStates are local.
 */
struct Amec {
    EndComponent component;
    std::vector<std::size_t> pairIndices;  // acceptance pairs that produced it
    LabeledMdp sub;
    std::vector<std::size_t> toProduct;
    StateSet kStates;
    StateSet piStates;

    std::size_t localIndex(std::size_t productState) const;  // kNoState if outside
};

std::vector<Amec> acceptingAmecs(const ProductMdp& product);

/// Closure, communication and the K/L condition, checked from scratch.
/// Empty result means all hold.
std::vector<std::string> checkAmec(const ProductMdp& product, const Amec& amec);

/// States from which some policy reaches `target` with probability 1.
std::vector<bool> almostSureReachSet(const LabeledMdp& mdp, const StateSet& target);
std::vector<bool> almostSureReachSet(const ProductMdp& product, const StateSet& target);

/// Memoryless policy reaching `target` almost surely from every state of the
/// almost-sure set; defined only off the target and on that set.
/// Throws NotReachableAlmostSurely when the initial state is outside the set.
StationaryPolicy reachPolicy(const LabeledMdp& mdp, const StateSet& target);
StationaryPolicy reachPolicy(const ProductMdp& product, const Amec& amec);

}  // namespace cyclesynth
