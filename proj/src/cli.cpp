#include "cyclesynth/cli.hpp"

#include "cyclesynth/acpc.hpp"
#include "cyclesynth/error.hpp"
#include "cyclesynth/sim.hpp"
#include "cyclesynth/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cyclesynth {

namespace {

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string readFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void writeFile(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
    out << text << '\n';
}

AcpcOptions solverOptions(double tol) {
    AcpcOptions opts = optionsFromEnvironment();
    if (tol > 0.0) opts.tolerance = tol;
    return opts;
}

struct Synthesize {
    std::string mdp, dra, pi, out, report;
    std::size_t retries = 0, jobs = 1;
    double tol = 0.0;

    int run(std::ostream& os) const {
        auto m = loadMdpFile(mdp);
        auto r = loadDraFile(dra);
        auto product = buildProduct(m, r, pi);
        SynthesisOptions opts;
        opts.acpc = solverOptions(tol);
        opts.retries = retries;
        opts.jobs = jobs;
        auto result = synthesize(product, opts);

        const auto& d = result.diagnostics;
        os << "product: " << d.productStates << " of " << d.rawProductStates << " states (mdp " << d.mdpStates
           << ", automaton " << d.draStates << ")\n";
        os << "accepting components: " << d.amecCount << " (" << d.reachableAmecCount << " reachable)\n";
        for (const auto& o : result.lambdaPerAmec) {
            os << "  amec " << o.amecIndex << ": " << d.amecSizes[o.amecIndex] << " states, ";
            if (!o.reachable) {
                os << "not reachable\n";
            } else if (!o.hasPiStates) {
                os << "no " << pi << " state\n";
            } else if (!o.lambda) {
                os << "no admissible initial policy\n";
            } else {
                os << "lambda=" << num(*o.lambda) << ", "
                   << (o.status == PiStatus::Optimal ? "optimal" : "not optimal") << ", " << o.iterations
                   << " policy updates\n";
            }
        }
        os << "winner: amec " << result.winningAmecIndex << ", lambda=" << num(result.optimalCost) << '\n';
        os << "status: " << (result.optimal ? "optimal" : "sub-optimal") << '\n';

        if (!out.empty()) writeFile(out, policyToJson(product, result));
        if (!report.empty()) writeFile(report, synthesisReportJson(product, result));
        return result.optimal ? kExitOptimal : kExitSubOptimal;
    }
};

struct Simulate {
    std::string mdp, dra, policy, pi, out, csv;
    std::size_t stages = 0;
    std::uint64_t seed = 0;

    int run(std::ostream& os) const {
        auto m = loadMdpFile(mdp);
        auto r = loadDraFile(dra);
        auto product = buildProduct(m, r, pi);
        auto file = parsePolicyJson(readFile(policy), product);

        SimOptions opts;
        auto amecs = acceptingAmecs(product);
        if (file.amec < amecs.size()) opts.watch = amecs[file.amec].toProduct;
        opts.recordCycleCosts = !csv.empty();
        ExecutablePolicy controller = projectPolicy(product, r, file.policy);
        auto report = simulate(m, r, controller, pi, stages, seed, opts);

        os << "stages: " << report.stages << '\n';
        os << "cycles: " << report.cycles << '\n';
        os << "total cost: " << num(report.totalCost) << '\n';
        os << "empirical acpc: " << num(report.empiricalAcpc) << '\n';
        os << "entry stage: " << (report.entryStage ? std::to_string(*report.entryStage) : "none") << '\n';
        for (std::size_t p = 0; p < report.pairs.size(); ++p) {
            const auto& e = report.pairs[p];
            os << "pair " << p << ": L visits " << e.counters.countL << " (" << e.lAfterEntry
               << " after entry), K visits " << e.counters.countK << " (" << e.kAfterEntry << " after entry)\n";
        }
        if (!out.empty()) writeFile(out, simReportToJson(report));
        if (!csv.empty()) {
            std::ofstream f(csv);
            if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + csv + "'");
            f << cycleCostsCsv(report);
        }
        return kExitOptimal;
    }
};

struct Oracle {
    std::string mdp, pi;
    std::vector<std::size_t> k;

    int run(std::ostream& os) const {
        auto m = loadMdpFile(mdp);
        auto piStates = m.statesLabeled(pi);
        if (piStates.empty()) throw Error(ErrorCode::PiUnused, "no state is labeled with '" + pi + "'");
        CycleProblem problem(m, piStates);
        std::optional<StateSet> kStates;
        if (!k.empty()) {
            StateSet ks = k;
            std::sort(ks.begin(), ks.end());
            ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
            if (ks.back() >= m.numStates()) throw Error(ErrorCode::InvalidArgument, "--k names a missing state");
            kStates = ks;
        }
        auto best = bruteForceAcpc(problem, kStates);
        os << "policies: " << best.enumerated << " enumerated, " << best.admissible << " admissible\n";
        os << "lambda=" << num(best.lambda) << '\n';
        os << "policy:";
        for (std::size_t i = 0; i < m.numStates(); ++i) os << ' ' << i << ':' << m.actions[best.policy.choice[i]];
        os << '\n';
        return kExitOptimal;
    }
};

struct Product {
    std::string mdp, dra, pi, out;

    int run(std::ostream& os) const {
        auto product = buildProduct(loadMdpFile(mdp), loadDraFile(dra), pi);
        os << "product: " << product.numStates() << " of " << product.rawSize << " states\n";
        if (!out.empty()) writeFile(out, productToJson(product));
        return kExitOptimal;
    }
};

}  // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cost-optimal policy synthesis for labeled MDPs under Rabin specifications"};
    app.require_subcommand(1);

    Synthesize syn;
    auto* s = app.add_subcommand("synthesize", "product, accepting components, policy iteration, stitched policy");
    s->add_option("--mdp", syn.mdp, "MDP JSON file")->required();
    s->add_option("--dra", syn.dra, "automaton file (JSON or ltl2dstar v2)")->required();
    s->add_option("--pi", syn.pi, "optimizing proposition")->required();
    s->add_option("--out", syn.out, "policy JSON output");
    s->add_option("--report", syn.report, "full result JSON output");
    s->add_option("--retries", syn.retries, "extra policy-iteration restarts per component");
    s->add_option("--jobs", syn.jobs, "components solved in parallel")->check(CLI::PositiveNumber);
    s->add_option("--tol", syn.tol, "solver tolerance (overrides CYCLESYNTH_TOL)")->check(CLI::PositiveNumber);

    Simulate sim;
    auto* m = app.add_subcommand("simulate", "run a synthesized policy on the MDP");
    m->add_option("--mdp", sim.mdp, "MDP JSON file")->required();
    m->add_option("--dra", sim.dra, "automaton file")->required();
    m->add_option("--policy", sim.policy, "policy JSON from synthesize")->required();
    m->add_option("--pi", sim.pi, "optimizing proposition")->required();
    m->add_option("--stages", sim.stages, "number of stages")->required();
    m->add_option("--seed", sim.seed, "RNG seed")->required();
    m->add_option("--out", sim.out, "report JSON output");
    m->add_option("--csv", sim.csv, "per-cycle cost CSV output");

    Oracle orc;
    auto* o = app.add_subcommand("oracle", "exhaustive search over stationary policies");
    o->add_option("--mdp", orc.mdp, "MDP JSON file")->required();
    o->add_option("--pi", orc.pi, "optimizing proposition")->required();
    o->add_option("--k", orc.k, "states that must recur, comma separated")->delimiter(',');

    Product prod;
    auto* p = app.add_subcommand("product", "export the pruned product MDP");
    p->add_option("--mdp", prod.mdp, "MDP JSON file")->required();
    p->add_option("--dra", prod.dra, "automaton file")->required();
    p->add_option("--pi", prod.pi, "optimizing proposition")->required();
    p->add_option("--out", prod.out, "product JSON output");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOptimal : kExitError;
    }

    try {
        if (s->parsed()) return syn.run(out);
        if (m->parsed()) return sim.run(out);
        if (o->parsed()) return orc.run(out);
        if (p->parsed()) return prod.run(out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace cyclesynth
