#include "cyclesynth/mdp.hpp"

#include "cyclesynth/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace cyclesynth {

const Choice* LabeledMdp::find(std::size_t state, ActionId action) const {
    for (const auto& c : choices[state]) {
        if (c.action == action) return &c;
    }
    return nullptr;
}

bool LabeledMdp::hasLabel(std::size_t state, std::string_view prop) const {
    const auto& l = labels[state];
    return std::find(l.begin(), l.end(), prop) != l.end();
}

StateSet LabeledMdp::statesLabeled(std::string_view prop) const {
    StateSet out;
    for (std::size_t i = 0; i < numStates(); ++i) {
        if (hasLabel(i, prop)) out.push_back(i);
    }
    return out;
}

std::size_t LabeledMdp::actionIndex(std::string_view name) const {
    auto it = std::find(actions.begin(), actions.end(), name);
    return it == actions.end() ? kNoAction : static_cast<std::size_t>(it - actions.begin());
}

bool StationaryPolicy::isTotal() const {
    return std::none_of(choice.begin(), choice.end(), [](ActionId a) { return a == kNoAction; });
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i].message;
    }
    return os.str();
}

namespace {

std::string actionName(const LabeledMdp& mdp, ActionId a) {
    return a < mdp.actions.size() ? mdp.actions[a] : "#" + std::to_string(a);
}

}  // namespace

ValidationReport validate(const LabeledMdp& mdp) {
    ValidationReport report;
    auto add = [&](std::string msg) { report.violations.push_back({std::move(msg)}); };
    const std::size_t n = mdp.numStates();

    if (n == 0) add("MDP has no states");
    if (mdp.init >= n) add("initial state " + std::to_string(mdp.init) + " out of range");
    if (mdp.labels.size() != n) {
        add("label table has " + std::to_string(mdp.labels.size()) + " entries for " +
            std::to_string(n) + " states");
    }

    std::set<std::string> props(mdp.propositions.begin(), mdp.propositions.end());
    for (std::size_t i = 0; i < std::min(n, mdp.labels.size()); ++i) {
        for (const auto& p : mdp.labels[i]) {
            if (!props.count(p)) add("label '" + p + "' of state " + std::to_string(i) + " is not a declared proposition");
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (mdp.choices[i].empty()) add("no available action at state " + std::to_string(i));
        std::set<ActionId> seen;
        for (const auto& c : mdp.choices[i]) {
            std::string where = "(" + std::to_string(i) + "," + actionName(mdp, c.action) + ")";
            if (c.action >= mdp.actions.size()) add("unknown action at " + where);
            if (!seen.insert(c.action).second) add("duplicate action at " + where);
            if (!(c.cost > 0.0) || !std::isfinite(c.cost)) {
                std::ostringstream os;
                os << "non-positive cost " << c.cost << " at " << where;
                add(os.str());
            }
            double sum = 0.0;
            for (const auto& t : c.row) {
                if (t.target >= n) add("successor " + std::to_string(t.target) + " out of range at " + where);
                if (!(t.probability >= 0.0 && t.probability <= 1.0)) {
                    std::ostringstream os;
                    os << "probability " << t.probability << " outside [0,1] at " << where;
                    add(os.str());
                }
                sum += t.probability;
            }
            if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
                std::ostringstream os;
                os << "row sum " << sum << " != 1 at " << where;
                add(os.str());
            }
        }
    }
    return report;
}

void requireValid(const LabeledMdp& mdp) {
    auto report = validate(mdp);
    if (!report.ok()) throw Error(ErrorCode::InvariantViolation, report.summary());
}

const Choice& chosen(const LabeledMdp& mdp, const StationaryPolicy& policy, std::size_t state) {
    if (state >= policy.choice.size() || policy.choice[state] == kNoAction) {
        throw Error(ErrorCode::PolicyIncomplete, "policy undefined at state " + std::to_string(state));
    }
    const Choice* c = mdp.find(state, policy.choice[state]);
    if (!c) {
        throw Error(ErrorCode::InvalidArgument, "policy picks unavailable action " +
                                                    actionName(mdp, policy.choice[state]) + " at state " +
                                                    std::to_string(state));
    }
    return *c;
}

Adjacency policyGraph(const LabeledMdp& mdp, const StationaryPolicy& policy) {
    const std::size_t n = mdp.numStates();
    if (policy.choice.size() != n) {
        throw Error(ErrorCode::PolicyIncomplete, "policy covers " + std::to_string(policy.choice.size()) +
                                                     " of " + std::to_string(n) + " states");
    }
    Adjacency graph(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& t : chosen(mdp, policy, i).row) {
            if (t.probability > 0.0) graph[i].push_back(t.target);
        }
    }
    return graph;
}

Adjacency actionGraph(const LabeledMdp& mdp) {
    Adjacency graph(mdp.numStates());
    for (std::size_t i = 0; i < mdp.numStates(); ++i) {
        for (const auto& c : mdp.choices[i]) {
            for (const auto& t : c.row) {
                if (t.probability > 0.0) graph[i].push_back(t.target);
            }
        }
        std::sort(graph[i].begin(), graph[i].end());
        graph[i].erase(std::unique(graph[i].begin(), graph[i].end()), graph[i].end());
    }
    return graph;
}

ChainStructure inducedChain(const LabeledMdp& mdp, const StationaryPolicy& policy) {
    auto graph = policyGraph(mdp, policy);
    ChainStructure chain;
    chain.recurrentClasses = bottomComponents(graph);

    std::vector<bool> recurrent(mdp.numStates(), false);
    for (const auto& cls : chain.recurrentClasses) {
        for (std::size_t i : cls) recurrent[i] = true;
    }
    for (std::size_t i = 0; i < mdp.numStates(); ++i) {
        if (!recurrent[i]) chain.transientStates.push_back(i);
    }
    chain.reachability.reserve(mdp.numStates());
    for (std::size_t i = 0; i < mdp.numStates(); ++i) {
        chain.reachability.push_back(maskToSet(forwardReachable(graph, {i})));
    }
    return chain;
}

bool isProper(const LabeledMdp& mdp, const StationaryPolicy& policy, const StateSet& target) {
    if (target.empty()) throw Error(ErrorCode::EmptyTarget, "properness needs a nonempty target");
    auto reach = backwardReachable(policyGraph(mdp, policy), target);
    return std::all_of(reach.begin(), reach.end(), [](bool b) { return b; });
}

bool isCommunicating(const LabeledMdp& mdp) {
    if (mdp.numStates() == 0) return false;
    return stronglyConnectedComponents(actionGraph(mdp)).members.size() == 1;
}

}  // namespace cyclesynth
