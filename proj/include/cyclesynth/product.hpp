#pragma once

#include "cyclesynth/dra.hpp"
#include "cyclesynth/mdp.hpp"

#include <optional>
#include <string>
#include <unordered_map>

namespace cyclesynth {

struct ProductState {
    std::size_t mdpState;
    std::size_t draState;
};

/**
 * Reachable part of M x R. `mdp` is the product viewed as a labeled MDP:
 * labels and costs are inherited from the M-component, actions keep their
 * global ids. Lifted acceptance sets and the cycle set are restricted to
 * the reachable states.
 */
struct ProductMdp {
    LabeledMdp mdp;
    std::vector<ProductState> states;
    std::vector<RabinPair> liftedPairs;
    StateSet piStates;
    std::string pi;
    std::size_t rawSize = 0;  // |S| * |Q|

    std::size_t numStates() const { return states.size(); }
    std::size_t indexOf(std::size_t mdpState, std::size_t draState) const;  // npos if pruned
    std::string stateName(std::size_t index) const;  // "s:q"

    std::unordered_map<std::size_t, std::size_t> lookup;  // s * |Q| + q -> index
    std::size_t draStates = 0;
};

inline constexpr std::size_t kNoState = static_cast<std::size_t>(-1);

ProductMdp buildProduct(const LabeledMdp& mdp, const Dra& dra, const std::string& pi);

/// Product exported in the MDP JSON format with "s:q" state names.
std::string productToJson(const ProductMdp& product);

/**
 * Controller for M that follows a stationary product policy while tracking
 * the automaton state online: act(s) emits the product action at (s, q) and
 * then advances q <- delta(q, L(s)).
 */
class ExecutablePolicy {
public:
    ExecutablePolicy(const ProductMdp& product, const Dra& dra, StationaryPolicy policy);

    void reset();
    ActionId act(std::size_t mdpState);

    std::size_t draState() const { return draState_; }
    std::size_t productState(std::size_t mdpState) const;  // throws UntrackedState
    const StationaryPolicy& productPolicy() const { return policy_; }

private:
    const ProductMdp* product_;
    const Dra* dra_;
    StationaryPolicy policy_;
    std::vector<Symbol> labelSymbols_;
    std::size_t draState_;
};

ExecutablePolicy projectPolicy(const ProductMdp& product, const Dra& dra,
                               const StationaryPolicy& policyOnProduct);

}  // namespace cyclesynth
