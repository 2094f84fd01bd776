#include "cyclesynth/product.hpp"

#include "cyclesynth/error.hpp"

#include <algorithm>
#include <deque>

namespace cyclesynth {

std::size_t ProductMdp::indexOf(std::size_t mdpState, std::size_t draState) const {
    auto it = lookup.find(mdpState * draStates + draState);
    return it == lookup.end() ? kNoState : it->second;
}

std::string ProductMdp::stateName(std::size_t index) const {
    return std::to_string(states[index].mdpState) + ":" + std::to_string(states[index].draState);
}

ProductMdp buildProduct(const LabeledMdp& mdp, const Dra& dra, const std::string& pi) {
    requireValid(mdp);
    validateDra(dra);
    for (const auto& p : mdp.propositions) {
        if (dra.apIndex(p) >= dra.ap.size()) {
            throw Error(ErrorCode::AlphabetMismatch, "proposition '" + p + "' labels the MDP but is not in the automaton alphabet");
        }
    }
    if (mdp.statesLabeled(pi).empty()) {
        throw Error(ErrorCode::PiUnused, "no state is labeled with '" + pi + "'; every cycle would be infinite");
    }

    const std::size_t nq = dra.numStates;
    std::vector<Symbol> symbols(mdp.numStates());
    for (std::size_t s = 0; s < mdp.numStates(); ++s) symbols[s] = dra.symbolOf(mdp.labels[s]);

    // Forward search from (s0, q0). Every successor of a reached pair is
    // itself reached, so no action is ever left pointing outside.
    std::vector<bool> reached(mdp.numStates() * nq, false);
    std::deque<std::size_t> queue;
    auto visit = [&](std::size_t key) {
        if (!reached[key]) {
            reached[key] = true;
            queue.push_back(key);
        }
    };
    visit(mdp.init * nq + dra.start);
    while (!queue.empty()) {
        std::size_t key = queue.front();
        queue.pop_front();
        std::size_t s = key / nq, q = key % nq;
        std::size_t q2 = dra.next(q, symbols[s]);
        for (const auto& c : mdp.choices[s]) {
            for (const auto& t : c.row) {
                if (t.probability > 0.0) visit(t.target * nq + q2);
            }
        }
    }

    ProductMdp product;
    product.pi = pi;
    product.draStates = nq;
    product.rawSize = mdp.numStates() * nq;
    for (std::size_t key = 0; key < reached.size(); ++key) {
        if (!reached[key]) continue;
        product.lookup[key] = product.states.size();
        product.states.push_back({key / nq, key % nq});
    }

    auto& pm = product.mdp;
    pm.actions = mdp.actions;
    pm.propositions = mdp.propositions;
    pm.choices.resize(product.numStates());
    pm.labels.resize(product.numStates());
    for (std::size_t i = 0; i < product.numStates(); ++i) {
        auto [s, q] = product.states[i];
        std::size_t q2 = dra.next(q, symbols[s]);
        pm.labels[i] = mdp.labels[s];
        for (const auto& c : mdp.choices[s]) {
            Choice lifted{c.action, c.cost, {}};
            for (const auto& t : c.row) {
                // Same order as the M row, so equal seeds sample equal paths.
                std::size_t j = product.indexOf(t.target, q2);
                if (t.probability > 0.0) lifted.row.push_back({j, t.probability});
            }
            pm.choices[i].push_back(std::move(lifted));
        }
    }
    pm.init = product.indexOf(mdp.init, dra.start);

    std::vector<bool> piMask(mdp.numStates(), false);
    for (std::size_t s : mdp.statesLabeled(pi)) piMask[s] = true;
    for (std::size_t i = 0; i < product.numStates(); ++i) {
        if (piMask[product.states[i].mdpState]) product.piStates.push_back(i);
    }
    for (const auto& pair : dra.pairs) {
        auto inL = setToMask(pair.avoid, nq), inK = setToMask(pair.visit, nq);
        RabinPair lifted;
        for (std::size_t i = 0; i < product.numStates(); ++i) {
            if (inL[product.states[i].draState]) lifted.avoid.push_back(i);
            if (inK[product.states[i].draState]) lifted.visit.push_back(i);
        }
        product.liftedPairs.push_back(std::move(lifted));
    }
    return product;
}

std::string productToJson(const ProductMdp& product) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < product.numStates(); ++i) names.push_back(product.stateName(i));
    return toMdpJson(product.mdp, names);
}

ExecutablePolicy::ExecutablePolicy(const ProductMdp& product, const Dra& dra, StationaryPolicy policy)
    : product_(&product), dra_(&dra), policy_(std::move(policy)), draState_(dra.start) {
    if (policy_.choice.size() != product.numStates()) {
        throw Error(ErrorCode::PolicyIncomplete, "product policy covers " + std::to_string(policy_.choice.size()) +
                                                     " of " + std::to_string(product.numStates()) + " states");
    }
    if (dra.numStates != product.draStates) {
        throw Error(ErrorCode::InvalidArgument, "automaton does not match the product");
    }
    std::size_t mdpStates = 0;
    for (const auto& st : product.states) mdpStates = std::max(mdpStates, st.mdpState + 1);
    labelSymbols_.assign(mdpStates, 0);
    for (std::size_t i = 0; i < product.numStates(); ++i) {
        labelSymbols_[product.states[i].mdpState] = dra.symbolOf(product.mdp.labels[i]);
    }
}

void ExecutablePolicy::reset() { draState_ = dra_->start; }

std::size_t ExecutablePolicy::productState(std::size_t mdpState) const {
    std::size_t i = product_->indexOf(mdpState, draState_);
    if (i == kNoState) {
        throw Error(ErrorCode::UntrackedState, "(" + std::to_string(mdpState) + "," + std::to_string(draState_) +
                                                   ") is not a product state");
    }
    return i;
}

ActionId ExecutablePolicy::act(std::size_t mdpState) {
    std::size_t i = productState(mdpState);
    ActionId a = policy_.choice[i];
    if (a == kNoAction) {
        throw Error(ErrorCode::PolicyIncomplete, "no action at product state " + product_->stateName(i));
    }
    draState_ = dra_->next(draState_, labelSymbols_[mdpState]);
    return a;
}

ExecutablePolicy projectPolicy(const ProductMdp& product, const Dra& dra, const StationaryPolicy& policyOnProduct) {
    return ExecutablePolicy(product, dra, policyOnProduct);
}

}  // namespace cyclesynth
