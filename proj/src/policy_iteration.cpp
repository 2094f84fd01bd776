#include "cyclesynth/acpc.hpp"

#include "cyclesynth/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <set>
#include <string>

namespace cyclesynth {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
constexpr double kExhaustiveInitLimit = 1e5;

struct Edge {
    std::size_t from;
    ActionId action;
};

std::vector<std::vector<Edge>> reverseActionEdges(const LabeledMdp& mdp) {
    std::vector<std::vector<Edge>> rev(mdp.numStates());
    for (std::size_t i = 0; i < mdp.numStates(); ++i) {
        for (const auto& c : mdp.choices[i]) {
            for (const auto& t : c.row) {
                if (t.probability > 0.0) rev[t.target].push_back({i, c.action});
            }
        }
    }
    return rev;
}

// Each state outside `target` gets an action with an edge one BFS layer
// closer to it. Target states and states that cannot reach it stay kNoAction.
std::vector<ActionId> towardTarget(const LabeledMdp& mdp, const StateSet& target, std::mt19937_64* rng) {
    auto rev = reverseActionEdges(mdp);
    if (rng) {
        for (auto& list : rev) std::shuffle(list.begin(), list.end(), *rng);
    }
    std::vector<ActionId> action(mdp.numStates(), kNoAction);
    std::vector<bool> seen(mdp.numStates(), false);
    std::deque<std::size_t> queue;
    for (std::size_t t : target) {
        seen[t] = true;
        queue.push_back(t);
    }
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (const auto& e : rev[v]) {
            if (seen[e.from]) continue;
            seen[e.from] = true;
            action[e.from] = e.action;
            queue.push_back(e.from);
        }
    }
    return action;
}

std::vector<std::size_t> distanceTo(const LabeledMdp& mdp, const StateSet& target) {
    auto rev = reverseActionEdges(mdp);
    std::vector<std::size_t> dist(mdp.numStates(), kUnreached);
    std::deque<std::size_t> queue;
    for (std::size_t t : target) {
        dist[t] = 0;
        queue.push_back(t);
    }
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (const auto& e : rev[v]) {
            if (dist[e.from] != kUnreached) continue;
            dist[e.from] = dist[v] + 1;
            queue.push_back(e.from);
        }
    }
    return dist;
}

// Shortest state/action path from `source` into `target` (source excluded
// from the check when `leaveFirst`). Empty when unreachable.
std::vector<Edge> shortestPath(const LabeledMdp& mdp, std::size_t source, const std::vector<bool>& target,
                               bool leaveFirst) {
    const std::size_t n = mdp.numStates();
    if (!leaveFirst && target[source]) return {};
    std::vector<Edge> parent(n, Edge{kUnreached, kNoAction});
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> queue{source};
    seen[source] = true;
    std::size_t hit = kUnreached;
    while (!queue.empty() && hit == kUnreached) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (const auto& c : mdp.choices[v]) {
            for (const auto& t : c.row) {
                if (t.probability <= 0.0) continue;
                if (target[t.target]) {
                    parent[t.target] = {v, c.action};
                    hit = t.target;
                    break;
                }
                if (seen[t.target]) continue;
                seen[t.target] = true;
                parent[t.target] = {v, c.action};
                queue.push_back(t.target);
            }
            if (hit != kUnreached) break;
        }
    }
    if (hit == kUnreached) return {};
    // Path as (state, action) pairs from source; the final entry's `from`
    // is the hit state with no action.
    std::vector<Edge> path{{hit, kNoAction}};
    std::size_t v = hit;
    do {
        Edge e = parent[v];
        path.push_back(e);
        v = e.from;
    } while (v != source);
    std::reverse(path.begin(), path.end());
    return path;
}

bool admissible(const CycleProblem& problem, const StationaryPolicy& policy, const StateSet& kStates) {
    return policy.isTotal() && isProper(problem.mdp(), policy, problem.piStates()) &&
           recurrentClassesMeet(problem.mdp(), policy, kStates);
}

// Fill undefined states with actions that head toward `anchor`.
StationaryPolicy completeToward(const LabeledMdp& mdp, std::vector<ActionId> fixed, const StateSet& anchor,
                                std::mt19937_64* rng) {
    auto tree = towardTarget(mdp, anchor, rng);
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        if (fixed[i] == kNoAction) fixed[i] = tree[i];
    }
    return StationaryPolicy{std::move(fixed)};
}

std::optional<StationaryPolicy> exhaustiveInitial(const CycleProblem& problem, const StateSet& kStates) {
    const auto& mdp = problem.mdp();
    if (policyCount(mdp) > kExhaustiveInitLimit) return std::nullopt;
    const std::size_t n = mdp.numStates();
    std::vector<std::size_t> digits(n, 0);
    StationaryPolicy policy{std::vector<ActionId>(n)};
    while (true) {
        for (std::size_t i = 0; i < n; ++i) policy.choice[i] = mdp.choices[i][digits[i]].action;
        if (admissible(problem, policy, kStates)) return policy;
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++digits[pos] < mdp.choices[pos].size()) break;
            digits[pos] = 0;
            if (pos == 0) return std::nullopt;
        }
    }
}

void requireKStates(const CycleProblem& problem, const StateSet& kStates) {
    if (kStates.empty()) throw Error(ErrorCode::InvalidArgument, "the recurrence set must be nonempty");
    for (std::size_t k : kStates) {
        if (k >= problem.numStates()) {
            throw Error(ErrorCode::InvalidArgument, "recurrence state " + std::to_string(k) + " out of range");
        }
    }
}

}  // namespace

StationaryPolicy initialPolicy(const CycleProblem& problem, const StateSet& kStatesIn, std::uint64_t seed) {
    StateSet kStates = kStatesIn;
    std::sort(kStates.begin(), kStates.end());
    kStates.erase(std::unique(kStates.begin(), kStates.end()), kStates.end());
    requireKStates(problem, kStates);

    const auto& mdp = problem.mdp();
    const std::size_t n = mdp.numStates();
    std::mt19937_64 engine(seed);
    std::mt19937_64* rng = seed ? &engine : nullptr;

    StateSet inside, outside;
    for (std::size_t k : kStates) (problem.inPi(k) ? inside : outside).push_back(k);
    if (rng) {
        std::shuffle(inside.begin(), inside.end(), engine);
        std::shuffle(outside.begin(), outside.end(), engine);
    }

    // A recurrence state that also closes cycles: everything heads to it.
    for (std::size_t k : inside) {
        std::vector<std::size_t> order(mdp.choices[k].size());
        for (std::size_t a = 0; a < order.size(); ++a) order[a] = a;
        if (rng) std::shuffle(order.begin(), order.end(), engine);
        for (std::size_t a : order) {
            std::vector<ActionId> fixed(n, kNoAction);
            fixed[k] = mdp.choices[k][a].action;
            auto policy = completeToward(mdp, std::move(fixed), {k}, rng);
            if (admissible(problem, policy, kStates)) return policy;
        }
    }

    // Otherwise close a simple loop k -> ... -> pi state -> ... -> k.
    const auto& piMask = setToMask(problem.piStates(), n);
    for (std::size_t k : outside) {
        std::vector<bool> kMask(n, false);
        kMask[k] = true;
        for (const auto& c : mdp.choices[k]) {
            for (const auto& t : c.row) {
                if (t.probability <= 0.0) continue;
                auto toPi = shortestPath(mdp, t.target, piMask, false);
                if (toPi.empty() && !piMask[t.target]) continue;
                std::size_t p = toPi.empty() ? t.target : toPi.back().from;
                auto back = shortestPath(mdp, p, kMask, true);
                if (back.empty()) continue;

                std::vector<ActionId> fixed(n, kNoAction);
                StateSet loop{k};
                fixed[k] = c.action;
                bool simple = true;
                auto place = [&](const std::vector<Edge>& path) {
                    for (const auto& e : path) {
                        if (e.action == kNoAction) continue;
                        if (fixed[e.from] != kNoAction) simple = false;
                        fixed[e.from] = e.action;
                        loop.push_back(e.from);
                    }
                };
                place(toPi);
                place(back);
                if (!simple) continue;
                std::sort(loop.begin(), loop.end());
                auto policy = completeToward(mdp, std::move(fixed), loop, rng);
                if (admissible(problem, policy, kStates)) return policy;
            }
        }
    }

    if (auto policy = exhaustiveInitial(problem, kStates)) return *policy;
    throw Error(ErrorCode::NoInitialPolicy,
                "no proper policy whose recurrent classes meet the recurrence set was found");
}

namespace {

struct Improvement {
    StationaryPolicy candidate;
    std::vector<std::vector<ActionId>> sets;  // minimizing actions per state
};

bool near(double value, double best, double tie) { return value <= best + tie * std::max(1.0, std::abs(best)); }

Improvement improve(const CycleProblem& problem, const StationaryPolicy& mu, const AcpcGainBias& value,
                    double tie) {
    const auto& mdp = problem.mdp();
    const std::size_t n = mdp.numStates();
    Improvement out{mu, std::vector<std::vector<ActionId>>(n)};

    // First stage: minimize the expected next-state gain.
    bool incumbentMinimizesGain = true;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> score;
        for (const auto& c : mdp.choices[i]) {
            double s = 0.0;
            for (const auto& t : c.row) s += t.probability * value.gain(t.target);
            score.push_back(s);
        }
        double best = *std::min_element(score.begin(), score.end());
        for (std::size_t k = 0; k < score.size(); ++k) {
            if (near(score[k], best, tie)) out.sets[i].push_back(mdp.choices[i][k].action);
        }
        if (std::find(out.sets[i].begin(), out.sets[i].end(), mu.choice[i]) == out.sets[i].end()) {
            incumbentMinimizesGain = false;
        }
    }

    // Second stage, only when the first leaves the policy unchanged.
    if (incumbentMinimizesGain) {
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> score;
            for (ActionId a : out.sets[i]) {
                const Choice* c = mdp.find(i, a);
                double s = c->cost;
                for (const auto& t : c->row) {
                    s += t.probability * value.bias(t.target);
                    if (!problem.inPi(t.target)) s += t.probability * value.gain(t.target);
                }
                score.push_back(s);
            }
            double best = *std::min_element(score.begin(), score.end());
            std::vector<ActionId> keep;
            for (std::size_t k = 0; k < score.size(); ++k) {
                if (near(score[k], best, tie)) keep.push_back(out.sets[i][k]);
            }
            out.sets[i] = std::move(keep);
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const auto& set = out.sets[i];
        if (std::find(set.begin(), set.end(), mu.choice[i]) == set.end()) {
            out.candidate.choice[i] = *std::min_element(set.begin(), set.end());
        }
    }
    return out;
}

// One swap per recurrent class that misses the recurrence set or the cycle
// set, moving it toward states that have both.
StationaryPolicy repair(const CycleProblem& problem, StationaryPolicy policy,
                        const std::vector<std::vector<ActionId>>& sets, const StateSet& kStates) {
    const auto& mdp = problem.mdp();
    const std::size_t n = mdp.numStates();
    auto kMask = setToMask(kStates, n);
    StateSet good;
    for (std::size_t k : kStates) {
        if (problem.inPi(k)) good.push_back(k);
    }
    auto dist = distanceTo(mdp, good.empty() ? kStates : good);

    for (const auto& cls : bottomComponents(policyGraph(mdp, policy))) {
        bool hasK = std::any_of(cls.begin(), cls.end(), [&](std::size_t i) { return kMask[i]; });
        bool hasPi = std::any_of(cls.begin(), cls.end(), [&](std::size_t i) { return problem.inPi(i); });
        if (hasK && hasPi) continue;
        auto inClass = setToMask(cls, n);

        std::size_t bestState = kUnreached, bestDist = kUnreached;
        ActionId bestAction = kNoAction;
        auto consider = [&](std::size_t s, ActionId a) {
            const Choice* c = mdp.find(s, a);
            for (const auto& t : c->row) {
                if (t.probability <= 0.0 || inClass[t.target]) continue;
                if (bestState == kUnreached || dist[t.target] < bestDist) {
                    bestState = s;
                    bestAction = a;
                    bestDist = dist[t.target];
                }
            }
        };
        for (std::size_t s : cls) {
            for (ActionId a : sets[s]) consider(s, a);
        }
        if (bestState == kUnreached) {
            for (std::size_t s : cls) {
                for (const auto& c : mdp.choices[s]) consider(s, c.action);
            }
        }
        if (bestState != kUnreached) policy.choice[bestState] = bestAction;
    }
    return policy;
}

}  // namespace

PolicyIterationResult policyIteration(const CycleProblem& problem, const StateSet& kStatesIn,
                                      std::optional<StationaryPolicy> init, const AcpcOptions& options) {
    StateSet kStates = kStatesIn;
    std::sort(kStates.begin(), kStates.end());
    kStates.erase(std::unique(kStates.begin(), kStates.end()), kStates.end());
    requireKStates(problem, kStates);
    if (!isCommunicating(problem.mdp())) {
        throw Error(ErrorCode::NotCommunicating, "the MDP is not communicating");
    }

    StationaryPolicy mu;
    if (init) {
        if (init->choice.size() != problem.numStates() || !init->isTotal()) {
            throw Error(ErrorCode::PolicyIncomplete, "initial policy must be defined on every state");
        }
        for (std::size_t i = 0; i < problem.numStates(); ++i) chosen(problem.mdp(), *init, i);
        if (!admissible(problem, *init, kStates)) {
            throw Error(ErrorCode::InvalidArgument,
                        "initial policy must be proper with the recurrence set in every recurrent class");
        }
        mu = *init;
    } else {
        mu = initialPolicy(problem, kStates, options.initSeed);
    }

    const std::size_t cap = options.maxIterations ? options.maxIterations : 10 * problem.numStates();
    PolicyIterationResult result;
    StationaryPolicy bestPolicy;
    AcpcGainBias bestValue;
    bool haveBest = false;
    // Not optimal: hand back the cheapest policy evaluated so far.
    auto giveUp = [&] {
        result.policy = bestPolicy;
        result.value = bestValue;
        result.status = PiStatus::NotOptimal;
        return result;
    };
    std::set<std::vector<ActionId>> seen;
    while (true) {
        seen.insert(mu.choice);
        AcpcGainBias value = acpcEvaluate(problem, mu, options);
        result.history.push_back({mu, value.gain, value.bias});
        result.policy = mu;
        result.value = value;
        if (!haveBest || value.lambda < bestValue.lambda) {
            bestPolicy = mu;
            bestValue = value;
            haveBest = true;
        }

        bool flat = value.spread() <= options.tolerance * std::max(1.0, std::abs(value.lambda));
        if (flat && acpcOptimalityCheck(problem, value.lambda, value.bias, options.tolerance) &&
            recurrentClassesMeet(problem.mdp(), mu, kStates)) {
            result.status = PiStatus::Optimal;
            return result;
        }

        Improvement step = improve(problem, mu, value, options.tieTolerance);
        if (step.candidate.choice == mu.choice) return giveUp();
        if (result.iterations >= cap) {
            throw Error(ErrorCode::NonConvergence,
                        "policy iteration did not settle within " + std::to_string(cap) + " iterations");
        }

        StationaryPolicy next = std::move(step.candidate);
        if (!admissible(problem, next, kStates)) {
            next = repair(problem, std::move(next), step.sets, kStates);
            if (!admissible(problem, next, kStates)) return giveUp();
        }
        // A repaired step need not improve, so it can lead back to an
        // earlier policy.
        if (seen.count(next.choice)) return giveUp();
        mu = std::move(next);
        ++result.iterations;
    }
}

}  // namespace cyclesynth
