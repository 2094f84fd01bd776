#pragma once

#include "cyclesynth/acps.hpp"
#include "cyclesynth/mdp.hpp"
#include "cyclesynth/numerics.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace cyclesynth {

/// An MDP together with the nonempty set of states that complete a cycle.
class CycleProblem {
public:
    CycleProblem(LabeledMdp mdp, StateSet piStates);

    const LabeledMdp& mdp() const { return mdp_; }
    const StateSet& piStates() const { return piStates_; }
    bool inPi(std::size_t state) const { return piMask_[state]; }
    std::size_t numStates() const { return mdp_.numStates(); }

private:
    LabeledMdp mdp_;
    StateSet piStates_;
    std::vector<bool> piMask_;
};

/// P_mu split by destination column: into the cycle set and everywhere else.
struct SplitKernel {
    Matrix intoPi;
    Matrix outsidePi;
};

struct AcpcGainBias {
    double lambda = 0.0;  // max over states of gain
    Vector gain;          // via the first-return chain and its Cesaro limit
    Vector bias;
    Vector auxiliary;
    Vector directGain;    // via the 3n-equation system
    Vector directBias;
    double discrepancy = 0.0;  // |gain - directGain|_inf

    double spread() const { return gain.maxCoeff() - gain.minCoeff(); }
};

struct AcpcOptions {
    double tolerance = 1e-8;
    double tieTolerance = 1e-9;
    std::size_t maxIterations = 0;  // 0 selects 10 * n
    std::uint64_t initSeed = 0;     // 0: deterministic initial policy
};

/// Reads CYCLESYNTH_TOL (when set and positive) into `tolerance`.
AcpcOptions optionsFromEnvironment(AcpcOptions base = {});

SplitKernel splitKernel(const CycleProblem& problem, const StationaryPolicy& policy);

/// P~ = (I - outsidePi)^{-1} intoPi. Throws ImproperPolicy.
Matrix firstReturnKernel(const CycleProblem& problem, const StationaryPolicy& policy);

/// Expected cost until the next arrival in the cycle set. Throws ImproperPolicy.
Vector cycleCost(const CycleProblem& problem, const StationaryPolicy& policy);

AcpcGainBias acpcEvaluate(const CycleProblem& problem, const StationaryPolicy& policy,
                          const AcpcOptions& options = {});

/// Per-state cycle Bellman condition:
/// lambda + h(i) = min_u [g(i,u) + sum_j P(i,u,j) h(j) + lambda * sum_{j not in pi} P(i,u,j)].
bool acpcOptimalityCheck(const CycleProblem& problem, double lambda, const Vector& bias,
                         double tolerance = 1e-8);

/// Every recurrent class of the induced chain meets `kStates`.
bool recurrentClassesMeet(const LabeledMdp& mdp, const StationaryPolicy& policy,
                          const StateSet& kStates);

/// Proper policy with a kState in each recurrent class. Throws NoInitialPolicy
/// if the construction finds none.
StationaryPolicy initialPolicy(const CycleProblem& problem, const StateSet& kStates,
                               std::uint64_t seed = 0);

enum class PiStatus { Optimal, NotOptimal };

struct IterationRecord {
    StationaryPolicy policy;
    Vector gain;
    Vector bias;
};

struct PolicyIterationResult {
    StationaryPolicy policy;
    AcpcGainBias value;
    PiStatus status = PiStatus::NotOptimal;
    std::size_t iterations = 0;  // number of accepted policy updates
    std::vector<IterationRecord> history;
};

PolicyIterationResult policyIteration(const CycleProblem& problem, const StateSet& kStates,
                                      std::optional<StationaryPolicy> init = std::nullopt,
                                      const AcpcOptions& options = {});

struct BruteForceResult {
    StationaryPolicy policy;
    double lambda = 0.0;
    std::size_t enumerated = 0;
    std::size_t admissible = 0;
};

inline constexpr double kBruteForceLimit = 1e6;

/// Number of deterministic stationary policies (as a double to avoid overflow).
double policyCount(const LabeledMdp& mdp);

/**
 * Exhaustive search over stationary policies. Keeps proper policies (and,
 * when `kStates` is given, those whose recurrent classes all meet it) and
 * returns the one minimizing max_i J(i); ties go to the lexicographically
 * smallest action vector. Throws TooLarge beyond 1e6 policies.
 */
BruteForceResult bruteForceAcpc(const CycleProblem& problem,
                                const std::optional<StateSet>& kStates = std::nullopt);

}  // namespace cyclesynth
