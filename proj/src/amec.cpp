#include "cyclesynth/amec.hpp"

#include "cyclesynth/error.hpp"

#include <algorithm>
#include <deque>

namespace cyclesynth {

std::vector<EndComponent> maximalEndComponents(const LabeledMdp& mdp, const std::vector<bool>& allowedIn) {
    const std::size_t n = mdp.numStates();
    std::vector<bool> alive = allowedIn.empty() ? std::vector<bool>(n, true) : allowedIn;
    std::vector<std::vector<const Choice*>> kept(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        for (const auto& c : mdp.choices[i]) kept[i].push_back(&c);
    }

    SccDecomposition scc;
    bool changed = true;
    while (changed) {
        changed = false;
        Adjacency graph(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            for (const Choice* c : kept[i]) {
                for (const auto& t : c->row) {
                    if (t.probability > 0.0 && alive[t.target]) graph[i].push_back(t.target);
                }
            }
        }
        scc = stronglyConnectedComponents(graph);
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            auto leaves = [&](const Choice* c) {
                return std::any_of(c->row.begin(), c->row.end(), [&](const Transition& t) {
                    return t.probability > 0.0 && (!alive[t.target] || scc.component[t.target] != scc.component[i]);
                });
            };
            auto before = kept[i].size();
            kept[i].erase(std::remove_if(kept[i].begin(), kept[i].end(), leaves), kept[i].end());
            if (kept[i].size() != before) changed = true;
            if (kept[i].empty()) {
                alive[i] = false;
                changed = true;
            }
        }
    }

    std::vector<EndComponent> out;
    std::vector<std::size_t> slot(scc.members.size(), static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        std::size_t c = scc.component[i];
        if (slot[c] == static_cast<std::size_t>(-1)) {
            slot[c] = out.size();
            out.emplace_back();
        }
        auto& ec = out[slot[c]];
        ec.states.push_back(i);
        std::vector<ActionId> acts;
        for (const Choice* ch : kept[i]) acts.push_back(ch->action);
        ec.actions.push_back(std::move(acts));
    }
    return out;
}

std::vector<EndComponent> maximalEndComponents(const ProductMdp& product) {
    return maximalEndComponents(product.mdp);
}

std::size_t Amec::localIndex(std::size_t productState) const {
    auto it = std::lower_bound(toProduct.begin(), toProduct.end(), productState);
    if (it == toProduct.end() || *it != productState) return kNoState;
    return static_cast<std::size_t>(it - toProduct.begin());
}

namespace {

Amec makeAmec(const ProductMdp& product, EndComponent component) {
    Amec amec;
    amec.toProduct = component.states;
    amec.component = std::move(component);
    const auto& pm = product.mdp;
    auto& sub = amec.sub;
    sub.actions = pm.actions;
    sub.propositions = pm.propositions;
    sub.init = 0;
    for (std::size_t k = 0; k < amec.toProduct.size(); ++k) {
        std::size_t i = amec.toProduct[k];
        sub.labels.push_back(pm.labels[i]);
        std::vector<Choice> choices;
        for (ActionId a : amec.component.actions[k]) {
            const Choice* c = pm.find(i, a);
            Choice local{a, c->cost, {}};
            for (const auto& t : c->row) local.row.push_back({amec.localIndex(t.target), t.probability});
            choices.push_back(std::move(local));
        }
        sub.choices.push_back(std::move(choices));
    }
    auto piMask = setToMask(product.piStates, product.numStates());
    for (std::size_t k = 0; k < amec.toProduct.size(); ++k) {
        if (piMask[amec.toProduct[k]]) amec.piStates.push_back(k);
    }
    return amec;
}

}  // namespace

std::vector<Amec> acceptingAmecs(const ProductMdp& product) {
    std::vector<Amec> out;
    const std::size_t n = product.numStates();
    for (std::size_t p = 0; p < product.liftedPairs.size(); ++p) {
        const auto& pair = product.liftedPairs[p];
        std::vector<bool> allowed(n, true);
        for (std::size_t i : pair.avoid) allowed[i] = false;
        auto inK = setToMask(pair.visit, n);
        for (auto& ec : maximalEndComponents(product.mdp, allowed)) {
            if (std::none_of(ec.states.begin(), ec.states.end(), [&](std::size_t i) { return inK[i]; })) continue;
            auto same = std::find_if(out.begin(), out.end(), [&](const Amec& a) { return a.component == ec; });
            Amec* amec = nullptr;
            if (same == out.end()) {
                out.push_back(makeAmec(product, std::move(ec)));
                amec = &out.back();
            } else {
                amec = &*same;
            }
            amec->pairIndices.push_back(p);
            // A component shared by several pairs may recur through the K set of any of them.
            for (std::size_t k = 0; k < amec->toProduct.size(); ++k) {
                if (inK[amec->toProduct[k]]) amec->kStates.push_back(k);
            }
            std::sort(amec->kStates.begin(), amec->kStates.end());
            amec->kStates.erase(std::unique(amec->kStates.begin(), amec->kStates.end()), amec->kStates.end());
        }
    }
    return out;
}

std::vector<std::string> checkAmec(const ProductMdp& product, const Amec& amec) {
    std::vector<std::string> problems;
    const std::size_t n = product.numStates();
    auto inC = setToMask(amec.component.states, n);
    for (std::size_t k = 0; k < amec.component.states.size(); ++k) {
        std::size_t i = amec.component.states[k];
        if (amec.component.actions[k].empty()) problems.push_back("state " + product.stateName(i) + " keeps no action");
        for (ActionId a : amec.component.actions[k]) {
            const Choice* c = product.mdp.find(i, a);
            if (!c) {
                problems.push_back("action " + std::to_string(a) + " unavailable at " + product.stateName(i));
                continue;
            }
            for (const auto& t : c->row) {
                if (t.probability > 0.0 && !inC[t.target]) {
                    problems.push_back("action " + product.mdp.actions[a] + " at " + product.stateName(i) +
                                       " leaves the component");
                }
            }
        }
    }
    if (!isCommunicating(amec.sub)) problems.push_back("component is not communicating");

    std::vector<bool> inAnyK(n, false);
    for (std::size_t p : amec.pairIndices) {
        const auto& pair = product.liftedPairs[p];
        for (std::size_t i : pair.avoid) {
            if (inC[i]) problems.push_back("component meets L of pair " + std::to_string(p) + " at " + product.stateName(i));
        }
        for (std::size_t i : pair.visit) inAnyK[i] = true;
    }
    StateSet expectedK;
    for (std::size_t k = 0; k < amec.toProduct.size(); ++k) {
        if (inAnyK[amec.toProduct[k]]) expectedK.push_back(k);
    }
    if (expectedK.empty()) problems.push_back("component has no K state");
    if (expectedK != amec.kStates) problems.push_back("recorded K states disagree with the pairs");
    return problems;
}

std::vector<bool> almostSureReachSet(const LabeledMdp& mdp, const StateSet& target) {
    if (target.empty()) throw Error(ErrorCode::EmptyTarget, "almost-sure reachability needs a nonempty target");
    const std::size_t n = mdp.numStates();
    auto isTarget = setToMask(target, n);
    std::vector<bool> region(n, true);
    while (true) {
        // Least fixpoint: states with an action that stays in `region`
        // and moves into the growing set with positive probability.
        std::vector<bool> good = isTarget;
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (good[i] || !region[i]) continue;
                for (const auto& c : mdp.choices[i]) {
                    bool stays = true, advances = false;
                    for (const auto& t : c.row) {
                        if (t.probability <= 0.0) continue;
                        stays = stays && region[t.target];
                        advances = advances || good[t.target];
                    }
                    if (stays && advances) {
                        good[i] = true;
                        grew = true;
                        break;
                    }
                }
            }
        }
        if (good == region) return region;
        region = std::move(good);
    }
}

std::vector<bool> almostSureReachSet(const ProductMdp& product, const StateSet& target) {
    return almostSureReachSet(product.mdp, target);
}

StationaryPolicy reachPolicy(const LabeledMdp& mdp, const StateSet& target) {
    auto region = almostSureReachSet(mdp, target);
    if (!region[mdp.init]) {
        throw Error(ErrorCode::NotReachableAlmostSurely,
                    "the initial state cannot reach the target with probability 1");
    }
    const std::size_t n = mdp.numStates();
    auto isTarget = setToMask(target, n);
    std::vector<std::vector<std::pair<std::size_t, const Choice*>>> rev(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!region[i] || isTarget[i]) continue;
        for (const auto& c : mdp.choices[i]) {
            bool stays = std::all_of(c.row.begin(), c.row.end(),
                                     [&](const Transition& t) { return t.probability <= 0.0 || region[t.target]; });
            if (!stays) continue;
            for (const auto& t : c.row) {
                if (t.probability > 0.0) rev[t.target].push_back({i, &c});
            }
        }
    }
    StationaryPolicy policy{std::vector<ActionId>(n, kNoAction)};
    std::vector<bool> done = isTarget;
    std::deque<std::size_t> queue(target.begin(), target.end());
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (auto [u, c] : rev[v]) {
            if (done[u]) continue;
            done[u] = true;
            policy.choice[u] = c->action;
            queue.push_back(u);
        }
    }
    return policy;
}

StationaryPolicy reachPolicy(const ProductMdp& product, const Amec& amec) {
    return reachPolicy(product.mdp, amec.toProduct);
}

}  // namespace cyclesynth
