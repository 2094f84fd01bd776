#pragma once

#include "cyclesynth/acpc.hpp"
#include "cyclesynth/amec.hpp"
#include "cyclesynth/dra.hpp"
#include "cyclesynth/product.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cyclesynth {

struct AmecOutcome {
    std::size_t amecIndex = 0;
    bool reachable = false;
    bool hasPiStates = false;
    std::optional<double> lambda;  // absent when not solved
    PiStatus status = PiStatus::NotOptimal;
    std::size_t iterations = 0;
    std::size_t attempts = 0;
};

struct SynthesisDiagnostics {
    std::size_t mdpStates = 0;
    std::size_t draStates = 0;
    std::size_t rawProductStates = 0;
    std::size_t productStates = 0;
    std::size_t amecCount = 0;
    std::size_t reachableAmecCount = 0;
    std::vector<std::size_t> amecSizes;
};

struct SynthesisResult {
    std::size_t winningAmecIndex = 0;
    std::vector<AmecOutcome> lambdaPerAmec;
    std::vector<Amec> amecs;
    StationaryPolicy stitchedPolicy;  // on product states
    StationaryPolicy interiorPolicy;  // winning AMEC, product indices
    StationaryPolicy reachPolicy;     // off the winning AMEC
    double optimalCost = 0.0;
    bool optimal = false;
    SynthesisDiagnostics diagnostics;
};

struct SynthesisOptions {
    AcpcOptions acpc;
    std::size_t retries = 0;  // extra policy-iteration restarts on "not optimal"
    std::size_t jobs = 1;
};

/// Throws NoReachableAmec when no accepting component is almost-surely
/// reachable (no policy satisfies the formula with probability 1).
SynthesisResult synthesize(const ProductMdp& product, const SynthesisOptions& options = {});
SynthesisResult synthesize(const LabeledMdp& mdp, const Dra& dra, const std::string& pi,
                           const SynthesisOptions& options = {});

// {"type":"product-stationary","tracking":"dra","choices":{"s:q":action},
//  "lambda":float,"optimal":bool,"amec":int}
std::string policyToJson(const ProductMdp& product, const SynthesisResult& result);

struct PolicyFile {
    StationaryPolicy policy;  // on product states
    double lambda = 0.0;
    bool optimal = false;
    std::size_t amec = 0;
};

/// Throws ParseError on malformed input, InvalidArgument when a state or
/// action does not exist in `product`.
PolicyFile parsePolicyJson(std::string_view text, const ProductMdp& product);

/// Full result with per-AMEC values and diagnostics.
std::string synthesisReportJson(const ProductMdp& product, const SynthesisResult& result);

}  // namespace cyclesynth
