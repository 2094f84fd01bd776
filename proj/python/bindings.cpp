#include "cyclesynth/acpc.hpp"
#include "cyclesynth/cli.hpp"
#include "cyclesynth/error.hpp"
#include "cyclesynth/numerics.hpp"
#include "cyclesynth/sim.hpp"
#include "cyclesynth/synth.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace cyclesynth;

namespace {

py::dict synthesizeFiles(const std::string& mdpPath, const std::string& draPath, const std::string& pi,
                         std::size_t retries, std::size_t jobs) {
    auto mdp = loadMdpFile(mdpPath);
    auto dra = loadDraFile(draPath);
    auto product = buildProduct(mdp, dra, pi);
    SynthesisOptions opts;
    opts.acpc = optionsFromEnvironment();
    opts.retries = retries;
    opts.jobs = jobs;
    auto r = synthesize(product, opts);
    py::list per;
    for (const auto& o : r.lambdaPerAmec) {
        py::dict d;
        d["amec"] = o.amecIndex;
        d["reachable"] = o.reachable;
        d["lambda"] = o.lambda ? py::cast(*o.lambda) : py::none();
        d["optimal"] = o.status == PiStatus::Optimal;
        d["iterations"] = o.iterations;
        per.append(d);
    }
    py::dict out;
    out["lambda"] = r.optimalCost;
    out["optimal"] = r.optimal;
    out["winner"] = r.winningAmecIndex;
    out["amecs"] = per;
    out["product_states"] = product.numStates();
    out["policy_json"] = policyToJson(product, r);
    return out;
}

}  // namespace

PYBIND11_MODULE(_cyclesynth, m) {
    m.doc() = "Average-cost-per-cycle policy synthesis for labeled MDPs under Rabin specifications.";

    py::register_exception<Error>(m, "Error");

    py::class_<LabeledMdp>(m, "Mdp")
        .def_static("from_json", [](const std::string& text) { return parseMdpJson(text); })
        .def_static("load", &loadMdpFile)
        .def("to_json", [](const LabeledMdp& mdp) { return toMdpJson(mdp); })
        .def_property_readonly("num_states", &LabeledMdp::numStates)
        .def_readonly("actions", &LabeledMdp::actions)
        .def_readonly("labels", &LabeledMdp::labels)
        .def_readonly("init", &LabeledMdp::init)
        .def("states_labeled", &LabeledMdp::statesLabeled);

    py::class_<Dra>(m, "Dra")
        .def_static("parse", [](const std::string& text) { return parseDra(text); })
        .def_static("load", &loadDraFile)
        .def("to_json", &toDraJson)
        .def_readonly("num_states", &Dra::numStates)
        .def_readonly("ap", &Dra::ap)
        .def_readonly("start", &Dra::start)
        .def("__eq__", [](const Dra& a, const Dra& b) { return a == b; });

    py::class_<AcpcGainBias>(m, "CycleValue")
        .def_readonly("lambda_", &AcpcGainBias::lambda)
        .def_readonly("gain", &AcpcGainBias::gain)
        .def_readonly("bias", &AcpcGainBias::bias)
        .def_readonly("direct_gain", &AcpcGainBias::directGain)
        .def_property_readonly("spread", &AcpcGainBias::spread);

    m.def(
        "evaluate",
        [](const LabeledMdp& mdp, const StateSet& pi, const std::vector<ActionId>& policy) {
            return acpcEvaluate(CycleProblem(mdp, pi), StationaryPolicy{policy});
        },
        py::arg("mdp"), py::arg("pi_states"), py::arg("policy"));

    m.def(
        "policy_iteration",
        [](const LabeledMdp& mdp, const StateSet& pi, const StateSet& k) {
            auto r = policyIteration(CycleProblem(mdp, pi), k, std::nullopt, optionsFromEnvironment());
            return py::make_tuple(r.policy.choice, r.value.lambda, r.status == PiStatus::Optimal, r.iterations);
        },
        py::arg("mdp"), py::arg("pi_states"), py::arg("k_states"));

    m.def(
        "brute_force",
        [](const LabeledMdp& mdp, const StateSet& pi, std::optional<StateSet> k) {
            auto r = bruteForceAcpc(CycleProblem(mdp, pi), k);
            return py::make_tuple(r.policy.choice, r.lambda);
        },
        py::arg("mdp"), py::arg("pi_states"), py::arg("k_states") = py::none());

    m.def("cesaro_limit", &cesaroLimit, py::arg("p"));
    m.def("deviation_matrix", py::overload_cast<const Matrix&>(&deviationMatrix), py::arg("p"));

    m.def("synthesize", &synthesizeFiles, py::arg("mdp_path"), py::arg("dra_path"), py::arg("pi"),
          py::arg("retries") = 0, py::arg("jobs") = 1);

    m.def(
        "simulate",
        [](const LabeledMdp& mdp, const std::vector<ActionId>& policy, const StateSet& pi, std::size_t stages,
           std::uint64_t seed) {
            auto r = simulate(mdp, StationaryPolicy{policy}, pi, stages, seed);
            return py::make_tuple(r.totalCost, r.cycles, r.empiricalAcpc);
        },
        py::arg("mdp"), py::arg("policy"), py::arg("pi_states"), py::arg("stages"), py::arg("seed"));

    // Runs the command-line front end in process; returns (exit code, stdout, stderr).
    m.def("run_cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "cyclesynth");
        std::ostringstream out, err;
        int code = runCli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    });
}
