#include "cyclesynth/dra.hpp"

#include "cyclesynth/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace cyclesynth {

using nlohmann::json;

Symbol Dra::symbolOf(const std::vector<std::string>& props) const {
    Symbol s = 0;
    for (const auto& p : props) {
        std::size_t b = apIndex(p);
        if (b < ap.size()) s |= Symbol{1} << b;
    }
    return s;
}

std::string Dra::symbolKey(Symbol symbol) const {
    std::vector<std::string> names;
    for (std::size_t b = 0; b < ap.size(); ++b) {
        if (symbol & (Symbol{1} << b)) names.push_back(ap[b]);
    }
    std::sort(names.begin(), names.end());
    std::string key;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) key += ',';
        key += names[i];
    }
    return key;
}

std::size_t Dra::apIndex(std::string_view name) const {
    auto it = std::find(ap.begin(), ap.end(), name);
    return static_cast<std::size_t>(it - ap.begin());
}

void validateDra(const Dra& dra) {
    std::vector<std::string> problems;
    if (dra.numStates == 0) problems.push_back("automaton has no states");
    if (dra.start >= dra.numStates) problems.push_back("start state " + std::to_string(dra.start) + " out of range");
    if (dra.ap.size() > kMaxPropositions) {
        problems.push_back(std::to_string(dra.ap.size()) + " propositions exceed the limit of " +
                           std::to_string(kMaxPropositions));
    } else {
        std::set<std::string> names(dra.ap.begin(), dra.ap.end());
        if (names.size() != dra.ap.size()) problems.push_back("duplicate proposition name");
        if (names.count("")) problems.push_back("empty proposition name");
        for (const auto& n : names) {
            if (n.find(',') != std::string::npos) problems.push_back("proposition '" + n + "' contains a comma");
        }
        if (dra.delta.size() != dra.numStates * dra.numSymbols()) {
            problems.push_back("transition table has " + std::to_string(dra.delta.size()) + " entries, expected " +
                               std::to_string(dra.numStates * dra.numSymbols()));
        }
    }
    for (std::size_t k = 0; k < dra.delta.size(); ++k) {
        if (dra.delta[k] >= dra.numStates) {
            problems.push_back("transition " + std::to_string(k) + " targets missing state " +
                               std::to_string(dra.delta[k]));
            break;
        }
    }
    if (dra.pairs.empty()) problems.push_back("no acceptance pairs");
    for (std::size_t i = 0; i < dra.pairs.size(); ++i) {
        const auto& p = dra.pairs[i];
        if (p.visit.empty()) problems.push_back("pair " + std::to_string(i) + " has an empty K set");
        for (const auto* set : {&p.avoid, &p.visit}) {
            for (std::size_t q : *set) {
                if (q >= dra.numStates) problems.push_back("pair " + std::to_string(i) + " names missing state " +
                                                           std::to_string(q));
            }
        }
    }
    if (!problems.empty()) {
        std::string msg;
        for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
        throw Error(ErrorCode::InvariantViolation, msg);
    }
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

void normalize(StateSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

std::size_t index(const json& v, const std::string& ctx) {
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(ctx + ": expected a non-negative integer");
    return v.get<std::size_t>();
}

StateSet stateList(const json& v, const std::string& ctx) {
    if (!v.is_array()) fail(ctx + ": expected an array of state ids");
    StateSet out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(index(v[k], ctx + "[" + std::to_string(k) + "]"));
    normalize(out);
    return out;
}

}  // namespace

Dra parseDraJson(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) fail("automaton document must be a JSON object");
    static const std::set<std::string> kKeys{"states", "ap", "start", "pairs", "trans"};
    for (const auto& [key, _] : root.items()) {
        if (!kKeys.count(key)) fail("unknown key '" + key + "'");
    }
    auto member = [&](const char* key) -> const json& {
        auto it = root.find(key);
        if (it == root.end()) fail(std::string("missing key '") + key + "'");
        return *it;
    };

    Dra dra;
    dra.numStates = index(member("states"), "states");
    const json& ap = member("ap");
    if (!ap.is_array()) fail("ap: expected an array of strings");
    for (const auto& a : ap) {
        if (!a.is_string()) fail("ap: expected an array of strings");
        dra.ap.push_back(a.get<std::string>());
    }
    if (dra.ap.size() > kMaxPropositions) fail("ap: at most " + std::to_string(kMaxPropositions) + " propositions");
    dra.start = index(member("start"), "start");

    const json& pairs = member("pairs");
    if (!pairs.is_array()) fail("pairs: expected an array");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        std::string ctx = "pairs[" + std::to_string(i) + "]";
        const json& p = pairs[i];
        if (!p.is_object()) fail(ctx + ": expected an object with L and K");
        for (const auto& [key, _] : p.items()) {
            if (key != "L" && key != "K") fail(ctx + ": unknown key '" + key + "'");
        }
        if (!p.contains("L") || !p.contains("K")) fail(ctx + ": expected keys L and K");
        dra.pairs.push_back({stateList(p["L"], ctx + ".L"), stateList(p["K"], ctx + ".K")});
    }

    const json& trans = member("trans");
    if (!trans.is_object()) fail("trans: expected an object");
    const std::size_t symbols = dra.numSymbols();
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    dra.delta.assign(dra.numStates * symbols, kUnset);
    for (const auto& [stateKey, row] : trans.items()) {
        std::size_t q = 0, pos = 0;
        try {
            q = std::stoul(stateKey, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != stateKey.size() || q >= dra.numStates) {
            fail("trans: '" + stateKey + "' is not a state id");
        }
        if (!row.is_object()) fail("trans['" + stateKey + "']: expected an object keyed by symbol");
        for (const auto& [symKey, target] : row.items()) {
            std::string ctx = "trans['" + stateKey + "']['" + symKey + "']";
            Symbol sym = 0;
            if (!symKey.empty()) {
                std::stringstream ss(symKey);
                std::string name;
                while (std::getline(ss, name, ',')) {
                    std::size_t b = dra.apIndex(name);
                    if (b >= dra.ap.size()) fail(ctx + ": unknown proposition '" + name + "'");
                    if (sym & (Symbol{1} << b)) fail(ctx + ": repeated proposition '" + name + "'");
                    sym |= Symbol{1} << b;
                }
                if (symKey.back() == ',') fail(ctx + ": empty proposition name");
            }
            std::size_t& slot = dra.delta[q * symbols + sym];
            if (slot != kUnset) fail(ctx + ": symbol given twice");
            slot = index(target, ctx);
        }
    }
    for (std::size_t q = 0; q < dra.numStates; ++q) {
        for (Symbol s = 0; s < symbols; ++s) {
            if (dra.delta[q * symbols + s] == kUnset) {
                throw Error(ErrorCode::InvariantViolation, "transition from state " + std::to_string(q) +
                                                               " on {" + dra.symbolKey(s) + "} is missing");
            }
        }
    }
    validateDra(dra);
    return dra;
}

std::string toDraJson(const Dra& dra) {
    json root;
    root["states"] = dra.numStates;
    root["ap"] = dra.ap;
    root["start"] = dra.start;
    json pairs = json::array();
    for (const auto& p : dra.pairs) pairs.push_back({{"L", p.avoid}, {"K", p.visit}});
    root["pairs"] = std::move(pairs);
    json trans = json::object();
    for (std::size_t q = 0; q < dra.numStates; ++q) {
        json row = json::object();
        for (Symbol s = 0; s < dra.numSymbols(); ++s) row[dra.symbolKey(s)] = dra.next(q, s);
        trans[std::to_string(q)] = std::move(row);
    }
    root["trans"] = std::move(trans);
    return root.dump(2);
}

namespace {

struct LineReader {
    std::vector<std::string> lines;
    std::size_t pos = 0;

    explicit LineReader(std::string_view text) {
        std::string line;
        std::istringstream in{std::string(text)};
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            lines.push_back(line);
        }
    }

    // Skips blank lines; false at end of input.
    bool next(std::string& out, std::size_t& lineNo) {
        while (pos < lines.size()) {
            std::string t = lines[pos++];
            auto b = t.find_first_not_of(" \t");
            if (b == std::string::npos) continue;
            auto e = t.find_last_not_of(" \t");
            out = t.substr(b, e - b + 1);
            lineNo = pos;
            return true;
        }
        return false;
    }

    bool peek(std::string& out) {
        std::size_t save = pos, dummy = 0;
        bool ok = next(out, dummy);
        pos = save;
        return ok;
    }
};

[[noreturn]] void failAt(std::size_t line, const std::string& msg) {
    fail("line " + std::to_string(line) + ": " + msg);
}

bool startsWith(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

std::string field(const std::string& line, std::string_view key, std::size_t lineNo) {
    if (!startsWith(line, key)) failAt(lineNo, "expected '" + std::string(key) + "'");
    std::string rest = line.substr(key.size());
    auto b = rest.find_first_not_of(" \t");
    return b == std::string::npos ? std::string{} : rest.substr(b);
}

std::size_t number(const std::string& token, std::size_t lineNo, const std::string& what) {
    std::size_t pos = 0;
    unsigned long value = 0;
    try {
        value = std::stoul(token, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != token.size() || token[0] == '-' || token[0] == '+') {
        failAt(lineNo, what + ": '" + token + "' is not a non-negative integer");
    }
    return value;
}

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

std::vector<std::string> quotedNames(const std::string& s, std::size_t lineNo) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == ' ' || s[i] == '\t') {
            ++i;
        } else if (s[i] == '"') {
            auto close = s.find('"', i + 1);
            if (close == std::string::npos) failAt(lineNo, "unterminated quoted proposition");
            out.push_back(s.substr(i + 1, close - i - 1));
            i = close + 1;
        } else {
            auto end = s.find_first_of(" \t", i);
            if (end == std::string::npos) end = s.size();
            out.push_back(s.substr(i, end - i));
            i = end;
        }
    }
    return out;
}

}  // namespace

Dra parseLtl2dstarV2(std::string_view text) {
    LineReader in(text);
    std::string line;
    std::size_t lineNo = 0;

    if (!in.next(line, lineNo)) fail("line 1: empty input");
    auto header = tokens(line);
    if (header.size() < 2 || header[0] != "DRA") failAt(lineNo, "expected 'DRA v2 explicit' header");
    if (header[1] != "v2") failAt(lineNo, "unsupported version '" + header[1] + "'");
    if (header.size() != 3 || header[2] != "explicit") failAt(lineNo, "only the explicit DRA v2 format is supported");

    Dra dra;
    if (!in.next(line, lineNo)) fail("line " + std::to_string(lineNo + 1) + ": truncated header");
    if (startsWith(line, "Comment:")) {
        if (!in.next(line, lineNo)) fail("line " + std::to_string(lineNo + 1) + ": truncated header");
    }
    dra.numStates = number(field(line, "States:", lineNo), lineNo, "States");

    if (!in.next(line, lineNo)) fail("line " + std::to_string(lineNo + 1) + ": truncated header");
    std::size_t pairCount = number(field(line, "Acceptance-Pairs:", lineNo), lineNo, "Acceptance-Pairs");
    dra.pairs.resize(pairCount);

    if (!in.next(line, lineNo)) fail("line " + std::to_string(lineNo + 1) + ": truncated header");
    dra.start = number(field(line, "Start:", lineNo), lineNo, "Start");
    if (dra.start >= dra.numStates) failAt(lineNo, "start state out of range");

    if (!in.next(line, lineNo)) fail("line " + std::to_string(lineNo + 1) + ": truncated header");
    std::string apLine = field(line, "AP:", lineNo);
    auto apTokens = tokens(apLine);
    if (apTokens.empty()) failAt(lineNo, "AP: missing proposition count");
    std::size_t apCount = number(apTokens[0], lineNo, "AP count");
    dra.ap = quotedNames(apLine.substr(apLine.find(apTokens[0]) + apTokens[0].size()), lineNo);
    if (dra.ap.size() != apCount) {
        failAt(lineNo, "AP declares " + std::to_string(apCount) + " propositions but lists " +
                           std::to_string(dra.ap.size()));
    }
    if (apCount > kMaxPropositions) failAt(lineNo, "at most " + std::to_string(kMaxPropositions) + " propositions");

    if (!in.next(line, lineNo) || line != "---") failAt(lineNo + (in.pos >= in.lines.size()), "expected '---'");

    const std::size_t symbols = dra.numSymbols();
    dra.delta.assign(dra.numStates * symbols, 0);
    std::vector<bool> seen(dra.numStates, false);
    std::size_t blocks = 0;
    while (in.next(line, lineNo)) {
        auto head = tokens(field(line, "State:", lineNo));
        if (head.empty()) failAt(lineNo, "State: missing index");
        std::size_t q = number(head[0], lineNo, "State");
        if (q >= dra.numStates) failAt(lineNo, "state " + std::to_string(q) + " out of range");
        if (seen[q]) failAt(lineNo, "state " + std::to_string(q) + " defined twice");
        seen[q] = true;
        ++blocks;
        const std::size_t blockLine = lineNo;

        if (!in.next(line, lineNo)) failAt(blockLine, "truncated state block: missing Acc-Sig");
        for (const auto& mark : tokens(field(line, "Acc-Sig:", lineNo))) {
            if (mark.size() < 2 || (mark[0] != '+' && mark[0] != '-')) {
                failAt(lineNo, "bad acceptance mark '" + mark + "'");
            }
            std::size_t k = number(mark.substr(1), lineNo, "acceptance pair");
            if (k >= pairCount) failAt(lineNo, "acceptance pair " + std::to_string(k) + " out of range");
            (mark[0] == '+' ? dra.pairs[k].visit : dra.pairs[k].avoid).push_back(q);
        }

        std::size_t got = 0;
        std::string peeked;
        while (in.peek(peeked) && !startsWith(peeked, "State:")) {
            in.next(line, lineNo);
            if (got < symbols) dra.delta[q * symbols + got] = number(line, lineNo, "successor");
            ++got;
        }
        if (got < symbols) {
            failAt(blockLine, "truncated state block: " + std::to_string(got) + " successor lines, expected " +
                                  std::to_string(symbols));
        }
        if (got > symbols) {
            failAt(blockLine, "successor count " + std::to_string(got) + " != " + std::to_string(symbols));
        }
        for (std::size_t s = 0; s < symbols; ++s) {
            if (dra.delta[q * symbols + s] >= dra.numStates) {
                failAt(blockLine, "successor " + std::to_string(dra.delta[q * symbols + s]) + " out of range");
            }
        }
    }
    if (blocks != dra.numStates) {
        fail("line " + std::to_string(in.lines.size()) + ": expected " + std::to_string(dra.numStates) +
             " state blocks, found " + std::to_string(blocks));
    }
    for (auto& p : dra.pairs) {
        normalize(p.avoid);
        normalize(p.visit);
    }
    validateDra(dra);
    return dra;
}

Dra parseDra(std::string_view text) {
    auto b = text.find_first_not_of(" \t\r\n");
    if (b != std::string_view::npos && text.substr(b).rfind("DRA", 0) == 0) return parseLtl2dstarV2(text);
    return parseDraJson(text);
}

Dra loadDraFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parseDra(buffer.str());
}

std::vector<PairCounters> acceptanceCounters(const Dra& dra, const std::vector<std::size_t>& run) {
    std::vector<PairCounters> out(dra.pairs.size());
    std::vector<std::vector<bool>> inL, inK;
    for (const auto& p : dra.pairs) {
        inL.push_back(setToMask(p.avoid, dra.numStates));
        inK.push_back(setToMask(p.visit, dra.numStates));
    }
    for (std::size_t t = 0; t < run.size(); ++t) {
        std::size_t q = run[t];
        if (q >= dra.numStates) throw Error(ErrorCode::InvalidRun, "run visits missing state " + std::to_string(q));
        if (t > 0) {
            bool linked = false;
            for (Symbol s = 0; s < dra.numSymbols() && !linked; ++s) linked = dra.next(run[t - 1], s) == q;
            if (!linked) {
                throw Error(ErrorCode::InvalidRun, "no symbol leads from " + std::to_string(run[t - 1]) + " to " +
                                                       std::to_string(q) + " at position " + std::to_string(t));
            }
        }
        for (std::size_t k = 0; k < dra.pairs.size(); ++k) {
            if (inL[k][q]) {
                ++out[k].countL;
                out[k].lastLIndex = static_cast<long long>(t);
            }
            if (inK[k][q]) ++out[k].countK;
        }
    }
    return out;
}

}  // namespace cyclesynth
