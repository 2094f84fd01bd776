#include "cyclesynth/sim.hpp"

#include "cyclesynth/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace cyclesynth {

double SimReport::cycleCostStdDev() const {
    if (cycleCosts.size() < 2) return 0.0;
    double mean = 0.0;
    for (double c : cycleCosts) mean += c;
    mean /= static_cast<double>(cycleCosts.size());
    double ss = 0.0;
    for (double c : cycleCosts) ss += (c - mean) * (c - mean);
    return std::sqrt(ss / static_cast<double>(cycleCosts.size() - 1));
}

namespace {

std::size_t sample(const std::vector<Transition>& row, std::mt19937_64& rng) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double acc = 0.0;
    std::size_t last = row.front().target;
    for (const auto& t : row) {
        if (t.probability <= 0.0) continue;
        acc += t.probability;
        last = t.target;
        if (u < acc) return t.target;
    }
    return last;
}

// Drives s_0..s_N. `act(t, s)` returns the chosen row at stage t and
// `observe(t, s)` sees every visited state, s_0 included.
template <typename Act, typename Observe>
SimReport run(std::size_t start, std::size_t stages, std::uint64_t seed, const std::vector<bool>& piMask,
              const SimOptions& options, Act act, Observe observe) {
    SimReport report;
    report.stages = stages;
    report.seed = seed;
    std::mt19937_64 rng(seed);
    std::size_t s = start;
    double cycleAcc = 0.0;
    observe(0, s);
    for (std::size_t k = 0; k < stages; ++k) {
        const Choice& c = act(k, s);
        report.totalCost += c.cost;
        cycleAcc += c.cost;
        if (options.recordStageCosts) report.stageCosts.push_back(c.cost);
        s = sample(c.row, rng);
        if (piMask[s]) {
            ++report.cycles;
            if (options.recordCycleCosts) report.cycleCosts.push_back(cycleAcc);
            cycleAcc = 0.0;
        }
        observe(k + 1, s);
    }
    report.empiricalAcpc = report.totalCost / static_cast<double>(report.cycles);
    return report;
}

void fillEvidence(SimReport& report, const std::vector<RabinPair>& pairs, const std::vector<std::size_t>& trace,
                  std::size_t space) {
    report.pairs.assign(pairs.size(), {});
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        auto inL = setToMask(pairs[p].avoid, space), inK = setToMask(pairs[p].visit, space);
        auto& ev = report.pairs[p];
        for (std::size_t t = 0; t < trace.size(); ++t) {
            bool after = report.entryStage && t >= *report.entryStage;
            if (inL[trace[t]]) {
                ++ev.counters.countL;
                ev.counters.lastLIndex = static_cast<long long>(t);
                if (after) ++ev.lAfterEntry;
            }
            if (inK[trace[t]]) {
                ++ev.counters.countK;
                if (after) ++ev.kAfterEntry;
            }
        }
    }
}

}  // namespace

SimReport simulate(const LabeledMdp& mdp, const StationaryPolicy& policy, const StateSet& piStates,
                   std::size_t stages, std::uint64_t seed, const SimOptions& options) {
    const std::size_t n = mdp.numStates();
    auto piMask = setToMask(piStates, n);
    auto watch = setToMask(options.watch, n);
    std::optional<std::size_t> entry;
    auto report = run(
        mdp.init, stages, seed, piMask, options,
        [&](std::size_t, std::size_t s) -> const Choice& { return chosen(mdp, policy, s); },
        [&](std::size_t t, std::size_t s) {
            if (!entry && watch[s]) entry = t;
        });
    report.entryStage = entry;
    return report;
}

SimReport simulate(const ProductMdp& product, const StationaryPolicy& policy, std::size_t stages,
                   std::uint64_t seed, const SimOptions& options) {
    const std::size_t n = product.numStates();
    auto piMask = setToMask(product.piStates, n);
    auto watch = setToMask(options.watch, n);
    std::optional<std::size_t> entry;
    std::vector<std::size_t> trace;
    trace.reserve(stages + 1);
    auto report = run(
        product.mdp.init, stages, seed, piMask, options,
        [&](std::size_t, std::size_t s) -> const Choice& { return chosen(product.mdp, policy, s); },
        [&](std::size_t t, std::size_t s) {
            trace.push_back(s);
            if (!entry && watch[s]) entry = t;
        });
    report.entryStage = entry;
    fillEvidence(report, product.liftedPairs, trace, n);
    return report;
}

SimReport simulate(const LabeledMdp& mdp, const Dra& dra, ExecutablePolicy& controller, const std::string& pi,
                   std::size_t stages, std::uint64_t seed, const SimOptions& options) {
    controller.reset();
    auto piMask = setToMask(mdp.statesLabeled(pi), mdp.numStates());
    StateSet watch = options.watch;
    std::sort(watch.begin(), watch.end());
    std::optional<std::size_t> entry;
    std::vector<std::size_t> draRun;
    draRun.reserve(stages + 1);
    auto report = run(
        mdp.init, stages, seed, piMask, options,
        [&](std::size_t, std::size_t s) -> const Choice& {
            ActionId a = controller.act(s);
            const Choice* c = mdp.find(s, a);
            if (!c) {
                throw Error(ErrorCode::InvalidArgument, "controller picked an action unavailable at state " +
                                                            std::to_string(s));
            }
            return *c;
        },
        [&](std::size_t t, std::size_t s) {
            draRun.push_back(controller.draState());
            std::size_t i = controller.productState(s);
            if (!entry && std::binary_search(watch.begin(), watch.end(), i)) entry = t;
        });
    report.entryStage = entry;
    auto counters = acceptanceCounters(dra, draRun);
    fillEvidence(report, dra.pairs, draRun, dra.numStates);
    for (std::size_t p = 0; p < counters.size(); ++p) report.pairs[p].counters = counters[p];
    return report;
}

std::string simReportToJson(const SimReport& report) {
    using nlohmann::json;
    json root;
    root["stages"] = report.stages;
    root["totalCost"] = report.totalCost;
    root["cycles"] = report.cycles;
    root["empiricalAcpc"] = report.empiricalAcpc;
    root["seed"] = report.seed;
    root["rng"] = report.rng;
    root["entryStage"] = report.entryStage ? json(*report.entryStage) : json(nullptr);
    json pairs = json::array();
    for (const auto& p : report.pairs) {
        pairs.push_back({{"countL", p.counters.countL},
                         {"countK", p.counters.countK},
                         {"lastLIndex", p.counters.lastLIndex},
                         {"lAfterEntry", p.lAfterEntry},
                         {"kAfterEntry", p.kAfterEntry}});
    }
    root["pairs"] = std::move(pairs);
    if (!report.cycleCosts.empty()) root["cycleCostStdDev"] = report.cycleCostStdDev();
    return root.dump(2);
}

std::string cycleCostsCsv(const SimReport& report) {
    std::string out = "cycle,cost\n";
    char buf[64];
    for (std::size_t k = 0; k < report.cycleCosts.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k + 1, report.cycleCosts[k]);
        out += buf;
    }
    return out;
}

}  // namespace cyclesynth
