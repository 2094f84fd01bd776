#include "cyclesynth/synth.hpp"

#include "cyclesynth/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <future>
#include <set>

namespace cyclesynth {

using nlohmann::json;

namespace {

struct AmecSolution {
    AmecOutcome outcome;
    StationaryPolicy policy;  // local indices
};

AmecSolution solveAmec(const Amec& amec, std::size_t index, const SynthesisOptions& options) {
    AmecSolution best;
    best.outcome.amecIndex = index;
    best.outcome.reachable = true;
    best.outcome.hasPiStates = true;
    CycleProblem problem(amec.sub, amec.piStates);
    for (std::size_t attempt = 0; attempt <= options.retries; ++attempt) {
        AcpcOptions acpc = options.acpc;
        // Attempt 0 uses the deterministic construction, later ones reseed it.
        acpc.initSeed = attempt == 0 ? options.acpc.initSeed : options.acpc.initSeed + attempt;
        ++best.outcome.attempts;
        PolicyIterationResult pi;
        try {
            pi = policyIteration(problem, amec.kStates, std::nullopt, acpc);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoInitialPolicy) throw;
            continue;
        }
        bool better = !best.outcome.lambda || pi.status == PiStatus::Optimal ||
                      (best.outcome.status != PiStatus::Optimal && pi.value.lambda < *best.outcome.lambda);
        if (better) {
            best.outcome.lambda = pi.value.lambda;
            best.outcome.status = pi.status;
            best.outcome.iterations = pi.iterations;
            best.policy = pi.policy;
        }
        if (pi.status == PiStatus::Optimal) break;
    }
    return best;
}

}  // namespace

SynthesisResult synthesize(const ProductMdp& product, const SynthesisOptions& options) {
    SynthesisResult result;
    auto& diag = result.diagnostics;
    diag.productStates = product.numStates();
    diag.rawProductStates = product.rawSize;
    diag.draStates = product.draStates;
    diag.mdpStates = product.draStates ? product.rawSize / product.draStates : 0;

    result.amecs = acceptingAmecs(product);
    diag.amecCount = result.amecs.size();
    std::vector<std::size_t> toSolve;
    for (std::size_t c = 0; c < result.amecs.size(); ++c) {
        const auto& amec = result.amecs[c];
        diag.amecSizes.push_back(amec.toProduct.size());
        AmecOutcome outcome;
        outcome.amecIndex = c;
        outcome.reachable = almostSureReachSet(product, amec.toProduct)[product.mdp.init];
        outcome.hasPiStates = !amec.piStates.empty();
        if (outcome.reachable) ++diag.reachableAmecCount;
        if (outcome.reachable && outcome.hasPiStates) toSolve.push_back(c);
        result.lambdaPerAmec.push_back(outcome);
    }
    if (diag.reachableAmecCount == 0) {
        throw Error(ErrorCode::NoReachableAmec, "no reachable accepting maximal end component");
    }
    if (toSolve.empty()) {
        throw Error(ErrorCode::NoReachableAmec,
                    "no reachable accepting maximal end component contains a state labeled '" + product.pi + "'");
    }

    std::vector<AmecSolution> solutions(toSolve.size());
    const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
    for (std::size_t begin = 0; begin < toSolve.size(); begin += jobs) {
        std::size_t end = std::min(toSolve.size(), begin + jobs);
        if (jobs == 1) {
            solutions[begin] = solveAmec(result.amecs[toSolve[begin]], toSolve[begin], options);
            continue;
        }
        std::vector<std::future<AmecSolution>> batch;
        for (std::size_t k = begin; k < end; ++k) {
            batch.push_back(std::async(std::launch::async, solveAmec, std::cref(result.amecs[toSolve[k]]),
                                       toSolve[k], std::cref(options)));
        }
        for (std::size_t k = begin; k < end; ++k) solutions[k] = batch[k - begin].get();
    }

    std::optional<std::size_t> winner;
    result.optimal = true;
    for (std::size_t k = 0; k < toSolve.size(); ++k) {
        const auto& sol = solutions[k];
        result.lambdaPerAmec[toSolve[k]] = sol.outcome;
        if (!sol.outcome.lambda) {
            result.optimal = false;
            continue;
        }
        if (sol.outcome.status != PiStatus::Optimal) result.optimal = false;
        if (!winner || *sol.outcome.lambda < *solutions[*winner].outcome.lambda) winner = k;
    }
    if (!winner) {
        throw Error(ErrorCode::NoInitialPolicy,
                    "no reachable accepting component admits a proper policy recurring through K");
    }

    const std::size_t w = toSolve[*winner];
    const Amec& amec = result.amecs[w];
    result.winningAmecIndex = w;
    result.optimalCost = *solutions[*winner].outcome.lambda;

    const std::size_t n = product.numStates();
    result.interiorPolicy.choice.assign(n, kNoAction);
    for (std::size_t k = 0; k < amec.toProduct.size(); ++k) {
        result.interiorPolicy.choice[amec.toProduct[k]] = solutions[*winner].policy.choice[k];
    }
    result.reachPolicy = reachPolicy(product, amec);
    result.stitchedPolicy = result.reachPolicy;
    for (std::size_t i : amec.toProduct) result.stitchedPolicy.choice[i] = result.interiorPolicy.choice[i];
    return result;
}

SynthesisResult synthesize(const LabeledMdp& mdp, const Dra& dra, const std::string& pi,
                           const SynthesisOptions& options) {
    return synthesize(buildProduct(mdp, dra, pi), options);
}

std::string policyToJson(const ProductMdp& product, const SynthesisResult& result) {
    json choices = json::object();
    for (std::size_t i = 0; i < product.numStates(); ++i) {
        ActionId a = result.stitchedPolicy.choice[i];
        if (a != kNoAction) choices[product.stateName(i)] = product.mdp.actions[a];
    }
    json root{{"type", "product-stationary"},
              {"tracking", "dra"},
              {"choices", std::move(choices)},
              {"lambda", result.optimalCost},
              {"optimal", result.optimal},
              {"amec", result.winningAmecIndex}};
    return root.dump(2);
}

PolicyFile parsePolicyJson(std::string_view text, const ProductMdp& product) {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::ParseError, msg); };
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) fail("policy document must be a JSON object");
    static const std::set<std::string> kKeys{"type", "tracking", "choices", "lambda", "optimal", "amec"};
    for (const auto& [key, _] : root.items()) {
        if (!kKeys.count(key)) fail("unknown key '" + key + "'");
    }
    for (const auto& key : kKeys) {
        if (!root.contains(key)) fail("missing key '" + key + "'");
    }
    if (root["type"] != "product-stationary") fail("type: expected \"product-stationary\"");
    if (root["tracking"] != "dra") fail("tracking: expected \"dra\"");
    if (!root["lambda"].is_number()) fail("lambda: expected a number");
    if (!root["optimal"].is_boolean()) fail("optimal: expected a boolean");
    if (!root["amec"].is_number_unsigned()) fail("amec: expected a non-negative integer");
    if (!root["choices"].is_object()) fail("choices: expected an object");

    std::unordered_map<std::string, std::size_t> byName;
    for (std::size_t i = 0; i < product.numStates(); ++i) byName[product.stateName(i)] = i;

    PolicyFile out;
    out.lambda = root["lambda"].get<double>();
    out.optimal = root["optimal"].get<bool>();
    out.amec = root["amec"].get<std::size_t>();
    out.policy.choice.assign(product.numStates(), kNoAction);
    for (const auto& [name, action] : root["choices"].items()) {
        auto it = byName.find(name);
        if (it == byName.end()) {
            throw Error(ErrorCode::InvalidArgument, "policy names state '" + name + "' that is not in the product");
        }
        if (!action.is_string()) fail("choices['" + name + "']: expected an action name");
        ActionId a = product.mdp.actionIndex(action.get<std::string>());
        if (a == kNoAction || !product.mdp.find(it->second, a)) {
            throw Error(ErrorCode::InvalidArgument, "action '" + action.get<std::string>() +
                                                        "' is not available at " + name);
        }
        out.policy.choice[it->second] = a;
    }
    return out;
}

std::string synthesisReportJson(const ProductMdp& product, const SynthesisResult& result) {
    auto names = [&](const std::vector<std::size_t>& productStates) {
        json list = json::array();
        for (std::size_t i : productStates) list.push_back(product.stateName(i));
        return list;
    };
    json amecs = json::array();
    for (std::size_t c = 0; c < result.amecs.size(); ++c) {
        const auto& amec = result.amecs[c];
        const auto& outcome = result.lambdaPerAmec[c];
        std::vector<std::size_t> k, p;
        for (std::size_t i : amec.kStates) k.push_back(amec.toProduct[i]);
        for (std::size_t i : amec.piStates) p.push_back(amec.toProduct[i]);
        amecs.push_back({{"index", c},
                         {"states", names(amec.toProduct)},
                         {"pairs", amec.pairIndices},
                         {"kStates", names(k)},
                         {"piStates", names(p)},
                         {"reachable", outcome.reachable},
                         {"lambda", outcome.lambda ? json(*outcome.lambda) : json(nullptr)},
                         {"status", !outcome.lambda                          ? "unsolved"
                                    : outcome.status == PiStatus::Optimal ? "optimal"
                                                                          : "notOptimal"},
                         {"iterations", outcome.iterations},
                         {"attempts", outcome.attempts}});
    }
    const auto& d = result.diagnostics;
    json root{{"winningAmec", result.winningAmecIndex},
              {"optimalCost", result.optimalCost},
              {"optimal", result.optimal},
              {"amecs", std::move(amecs)},
              {"diagnostics",
               {{"mdpStates", d.mdpStates},
                {"draStates", d.draStates},
                {"rawProductStates", d.rawProductStates},
                {"productStates", d.productStates},
                {"amecCount", d.amecCount},
                {"reachableAmecCount", d.reachableAmecCount},
                {"amecSizes", d.amecSizes}}},
              {"policy", json::parse(policyToJson(product, result))}};
    return root.dump(2);
}

}  // namespace cyclesynth
