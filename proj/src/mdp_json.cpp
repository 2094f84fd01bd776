#include "cyclesynth/error.hpp"
#include "cyclesynth/mdp.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cyclesynth {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

const json& member(const json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(ctx + ": missing key '" + key + "'");
    return *it;
}

std::size_t asIndex(const json& v, const std::string& ctx) {
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(ctx + ": expected a non-negative integer");
    return v.get<std::size_t>();
}

std::size_t parseStateKey(const std::string& key, std::size_t n, const std::string& ctx) {
    std::size_t pos = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(key, &pos);
    } catch (const std::exception&) {
        fail(ctx + ": '" + key + "' is not a state id");
    }
    if (pos != key.size() || value >= n) fail(ctx + ": '" + key + "' is not a state id");
    return static_cast<std::size_t>(value);
}

std::pair<std::size_t, ActionId> parsePairKey(const std::string& key, const LabeledMdp& mdp,
                                              const std::string& ctx) {
    auto comma = key.find(',');
    if (comma == std::string::npos) fail(ctx + ": key '" + key + "' is not of the form \"state,action\"");
    std::size_t s = parseStateKey(key.substr(0, comma), mdp.numStates(), ctx + " key '" + key + "'");
    ActionId a = mdp.actionIndex(key.substr(comma + 1));
    if (a == kNoAction) fail(ctx + ": key '" + key + "' names an unknown action");
    return {s, a};
}

}  // namespace

LabeledMdp parseMdpJson(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) fail("MDP document must be a JSON object");

    static const std::set<std::string> kKeys{"states", "actions", "available", "trans", "cost", "init"};
    for (const auto& [key, _] : root.items()) {
        if (!kKeys.count(key)) fail("unknown key '" + key + "'");
    }

    LabeledMdp mdp;

    const json& states = member(root, "states", "MDP");
    if (!states.is_array()) fail("'states' must be an array");
    const std::size_t n = states.size();
    mdp.choices.resize(n);
    mdp.labels.resize(n);
    std::vector<bool> idSeen(n, false);
    std::set<std::string> props;
    for (std::size_t k = 0; k < n; ++k) {
        const json& st = states[k];
        std::string ctx = "states[" + std::to_string(k) + "]";
        if (!st.is_object()) fail(ctx + ": expected an object");
        for (const auto& [key, _] : st.items()) {
            if (key != "id" && key != "label" && key != "name") fail(ctx + ": unknown key '" + key + "'");
        }
        std::size_t id = asIndex(member(st, "id", ctx), ctx + ".id");
        if (id >= n || idSeen[id]) fail(ctx + ": state ids must be a permutation of 0.." + std::to_string(n - 1));
        idSeen[id] = true;
        const json& label = member(st, "label", ctx);
        if (!label.is_array()) fail(ctx + ".label: expected an array of strings");
        for (const auto& p : label) {
            if (!p.is_string()) fail(ctx + ".label: expected an array of strings");
            mdp.labels[id].push_back(p.get<std::string>());
            props.insert(p.get<std::string>());
        }
        auto& l = mdp.labels[id];
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
    }
    mdp.propositions.assign(props.begin(), props.end());

    const json& actions = member(root, "actions", "MDP");
    if (!actions.is_array()) fail("'actions' must be an array of strings");
    for (const auto& a : actions) {
        if (!a.is_string()) fail("'actions' must be an array of strings");
        if (mdp.actionIndex(a.get<std::string>()) != kNoAction) fail("duplicate action '" + a.get<std::string>() + "'");
        mdp.actions.push_back(a.get<std::string>());
    }

    const json& available = member(root, "available", "MDP");
    if (!available.is_object()) fail("'available' must be an object");
    for (const auto& [key, list] : available.items()) {
        std::size_t s = parseStateKey(key, n, "available");
        if (!list.is_array()) fail("available['" + key + "']: expected an array of action names");
        for (const auto& a : list) {
            if (!a.is_string()) fail("available['" + key + "']: expected an array of action names");
            ActionId id = mdp.actionIndex(a.get<std::string>());
            if (id == kNoAction) fail("available['" + key + "']: unknown action '" + a.get<std::string>() + "'");
            if (mdp.find(s, id)) fail("available['" + key + "']: duplicate action '" + a.get<std::string>() + "'");
            mdp.choices[s].push_back(Choice{id, 0.0, {}});
        }
        std::sort(mdp.choices[s].begin(), mdp.choices[s].end(),
                  [](const Choice& x, const Choice& y) { return x.action < y.action; });
    }

    auto mutableChoice = [&](std::size_t s, ActionId a) -> Choice& {
        for (auto& c : mdp.choices[s]) {
            if (c.action == a) return c;
        }
        fail("(" + std::to_string(s) + "," + mdp.actions[a] + ") is not an available state-action pair");
    };

    const json& trans = member(root, "trans", "MDP");
    if (!trans.is_object()) fail("'trans' must be an object");
    std::set<std::pair<std::size_t, ActionId>> haveRow, haveCost;
    for (const auto& [key, row] : trans.items()) {
        auto [s, a] = parsePairKey(key, mdp, "trans");
        Choice& c = mutableChoice(s, a);
        haveRow.insert({s, a});
        if (!row.is_array()) fail("trans['" + key + "']: expected [[state, probability], ...]");
        std::map<std::size_t, double> merged;
        for (const auto& entry : row) {
            if (!entry.is_array() || entry.size() != 2 || !entry[1].is_number()) {
                fail("trans['" + key + "']: expected [[state, probability], ...]");
            }
            std::size_t j = asIndex(entry[0], "trans['" + key + "'] successor");
            if (j >= n) fail("trans['" + key + "']: successor " + std::to_string(j) + " out of range");
            merged[j] += entry[1].get<double>();
        }
        for (auto [j, p] : merged) {
            if (p != 0.0) c.row.push_back({j, p});
        }
    }

    const json& cost = member(root, "cost", "MDP");
    if (!cost.is_object()) fail("'cost' must be an object");
    for (const auto& [key, value] : cost.items()) {
        auto [s, a] = parsePairKey(key, mdp, "cost");
        if (!value.is_number()) fail("cost['" + key + "']: expected a number");
        mutableChoice(s, a).cost = value.get<double>();
        haveCost.insert({s, a});
    }

    for (std::size_t s = 0; s < n; ++s) {
        for (const auto& c : mdp.choices[s]) {
            std::string key = std::to_string(s) + "," + mdp.actions[c.action];
            if (!haveRow.count({s, c.action})) fail("missing transition row for '" + key + "'");
            if (!haveCost.count({s, c.action})) fail("missing cost for '" + key + "'");
        }
    }

    mdp.init = asIndex(member(root, "init", "MDP"), "init");

    requireValid(mdp);
    for (auto& state : mdp.choices) {
        for (auto& c : state) {
            double sum = 0.0;
            for (const auto& t : c.row) sum += t.probability;
            for (auto& t : c.row) t.probability /= sum;
        }
    }
    return mdp;
}

LabeledMdp loadMdpFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parseMdpJson(buffer.str());
}

std::string toMdpJson(const LabeledMdp& mdp, const std::vector<std::string>& stateNames) {
    json root;
    json states = json::array();
    for (std::size_t i = 0; i < mdp.numStates(); ++i) {
        json st{{"id", i}, {"label", mdp.labels[i]}};
        if (!stateNames.empty()) st["name"] = stateNames[i];
        states.push_back(std::move(st));
    }
    root["states"] = std::move(states);
    root["actions"] = mdp.actions;

    json available = json::object(), trans = json::object(), cost = json::object();
    for (std::size_t i = 0; i < mdp.numStates(); ++i) {
        json list = json::array();
        for (const auto& c : mdp.choices[i]) {
            list.push_back(mdp.actions[c.action]);
            std::string key = std::to_string(i) + "," + mdp.actions[c.action];
            json row = json::array();
            for (const auto& t : c.row) row.push_back(json::array({t.target, t.probability}));
            trans[key] = std::move(row);
            cost[key] = c.cost;
        }
        available[std::to_string(i)] = std::move(list);
    }
    root["available"] = std::move(available);
    root["trans"] = std::move(trans);
    root["cost"] = std::move(cost);
    root["init"] = mdp.init;
    return root.dump(2);
}

}  // namespace cyclesynth
