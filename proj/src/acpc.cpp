#include "cyclesynth/acpc.hpp"

#include "cyclesynth/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>
#include <string>

namespace cyclesynth {

CycleProblem::CycleProblem(LabeledMdp mdp, StateSet piStates)
    : mdp_(std::move(mdp)), piStates_(std::move(piStates)) {
    requireValid(mdp_);
    std::sort(piStates_.begin(), piStates_.end());
    piStates_.erase(std::unique(piStates_.begin(), piStates_.end()), piStates_.end());
    if (piStates_.empty()) throw Error(ErrorCode::EmptyTarget, "the cycle set must be nonempty");
    if (piStates_.back() >= mdp_.numStates()) {
        throw Error(ErrorCode::InvalidArgument, "cycle state " + std::to_string(piStates_.back()) + " out of range");
    }
    piMask_ = setToMask(piStates_, mdp_.numStates());
}

AcpcOptions optionsFromEnvironment(AcpcOptions base) {
    if (const char* env = std::getenv("CYCLESYNTH_TOL")) {
        char* end = nullptr;
        double value = std::strtod(env, &end);
        if (end != env && *end == '\0' && value > 0.0 && std::isfinite(value)) base.tolerance = value;
    }
    return base;
}

SplitKernel splitKernel(const CycleProblem& problem, const StationaryPolicy& policy) {
    Matrix p = policyMatrix(problem.mdp(), policy);
    SplitKernel split{Matrix::Zero(p.rows(), p.cols()), Matrix::Zero(p.rows(), p.cols())};
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
        if (problem.inPi(static_cast<std::size_t>(j))) {
            split.intoPi.col(j) = p.col(j);
        } else {
            split.outsidePi.col(j) = p.col(j);
        }
    }
    return split;
}

namespace {

void requireProper(const CycleProblem& problem, const StationaryPolicy& policy) {
    if (!policy.isTotal() || policy.choice.size() != problem.numStates()) {
        throw Error(ErrorCode::PolicyIncomplete, "policy must be defined on every state");
    }
    if (!isProper(problem.mdp(), policy, problem.piStates())) {
        throw Error(ErrorCode::ImproperPolicy, "some state cannot reach the cycle set; its cycle cost is infinite");
    }
}

// first[i] lists the cycle states that can be the first cycle-set arrival
// after leaving i: reached through a first step, then only non-cycle states.
std::vector<std::vector<bool>> firstArrivalSupport(const CycleProblem& problem, const StationaryPolicy& policy) {
    const std::size_t n = problem.numStates();
    auto graph = policyGraph(problem.mdp(), policy);
    std::vector<std::vector<bool>> support(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<bool> seen(n, false);
        std::deque<std::size_t> queue;
        for (std::size_t j : graph[i]) {
            if (!seen[j]) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
        while (!queue.empty()) {
            std::size_t v = queue.front();
            queue.pop_front();
            if (problem.inPi(v)) {
                support[i][v] = true;
                continue;
            }
            for (std::size_t w : graph[v]) {
                if (!seen[w]) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    return support;
}

Vector firstReturnGain(const Matrix& kernel, const Vector& cost) { return cesaroLimit(kernel) * cost; }

}  // namespace

Matrix firstReturnKernel(const CycleProblem& problem, const StationaryPolicy& policy) {
    requireProper(problem, policy);
    SplitKernel split = splitKernel(problem, policy);
    Matrix kernel = transientInverse(split.outsidePi) * split.intoPi;

    // Pin the structural zero pattern so roundoff cannot invent edges.
    auto support = firstArrivalSupport(problem, policy);
    for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
        for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
            if (!support[i][j] || kernel(i, j) < 0.0) kernel(i, j) = 0.0;
        }
        double sum = kernel.row(i).sum();
        if (std::abs(sum - 1.0) > 1e-8) {
            throw Error(ErrorCode::NumericalFailure, "first-return row " + std::to_string(i) + " sums to " +
                                                         std::to_string(sum));
        }
        kernel.row(i) /= sum;
    }
    return kernel;
}

Vector cycleCost(const CycleProblem& problem, const StationaryPolicy& policy) {
    requireProper(problem, policy);
    SplitKernel split = splitKernel(problem, policy);
    return transientInverse(split.outsidePi) * policyCost(problem.mdp(), policy);
}

AcpcGainBias acpcEvaluate(const CycleProblem& problem, const StationaryPolicy& policy, const AcpcOptions& options) {
    Matrix kernel = firstReturnKernel(problem, policy);
    Vector cost = cycleCost(problem, policy);

    AcpcGainBias out;
    GainBias mapped = acpsGainBias(kernel, cost);
    out.gain = mapped.gain;
    out.bias = mapped.bias;
    out.auxiliary = mapped.auxiliary;
    out.lambda = out.gain.maxCoeff();

    // Direct route: unknowns (J, h, v) in one 3n system
    //   (I - P) J                         = 0
    //   (I - Pout) J + (I - P) h          = g
    //                  (I - Pout) h + (I - P) v = 0
    // with v pinned to zero at one state of each recurrent class.
    const Eigen::Index n = static_cast<Eigen::Index>(problem.numStates());
    SplitKernel split = splitKernel(problem, policy);
    Matrix p = split.intoPi + split.outsidePi;
    Matrix id = Matrix::Identity(n, n);
    Vector g = policyCost(problem.mdp(), policy);
    auto classes = bottomComponents(policyGraph(problem.mdp(), policy));
    const auto pins = static_cast<Eigen::Index>(classes.size());

    Matrix system = Matrix::Zero(3 * n + pins, 3 * n);
    Vector rhs = Vector::Zero(3 * n + pins);
    system.block(0, 0, n, n) = id - p;
    system.block(n, 0, n, n) = id - split.outsidePi;
    system.block(n, n, n, n) = id - p;
    rhs.segment(n, n) = g;
    system.block(2 * n, n, n, n) = id - split.outsidePi;
    system.block(2 * n, 2 * n, n, n) = id - p;
    for (Eigen::Index c = 0; c < pins; ++c) {
        system(3 * n + c, 2 * n + static_cast<Eigen::Index>(classes[c].front())) = 1.0;
    }
    Vector solution = solveLeastSquares(system, rhs).x;
    out.directGain = solution.segment(0, n);
    out.directBias = solution.segment(n, n);

    out.discrepancy = (out.gain - out.directGain).cwiseAbs().maxCoeff();
    double biasGap = (out.bias - out.directBias).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, out.gain.cwiseAbs().maxCoeff());
    double biasScale = std::max(scale, out.bias.cwiseAbs().maxCoeff());
    if (out.discrepancy > options.tolerance * scale || biasGap > options.tolerance * biasScale) {
        throw Error(ErrorCode::NumericalFailure, "mapped and direct evaluations disagree (gain gap " +
                                                     std::to_string(out.discrepancy) + ", bias gap " +
                                                     std::to_string(biasGap) + ")");
    }
    return out;
}

bool acpcOptimalityCheck(const CycleProblem& problem, double lambda, const Vector& bias, double tolerance) {
    const auto& mdp = problem.mdp();
    const double tol = tolerance * std::max(1.0, std::abs(lambda));
    for (std::size_t i = 0; i < mdp.numStates(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : mdp.choices[i]) {
            double value = c.cost;
            for (const auto& t : c.row) {
                value += t.probability * bias(t.target);
                if (!problem.inPi(t.target)) value += lambda * t.probability;
            }
            best = std::min(best, value);
        }
        if (std::abs(lambda + bias(i) - best) > tol) return false;
    }
    return true;
}

bool recurrentClassesMeet(const LabeledMdp& mdp, const StationaryPolicy& policy, const StateSet& kStates) {
    auto mask = setToMask(kStates, mdp.numStates());
    for (const auto& cls : bottomComponents(policyGraph(mdp, policy))) {
        if (std::none_of(cls.begin(), cls.end(), [&](std::size_t i) { return mask[i]; })) return false;
    }
    return true;
}

double policyCount(const LabeledMdp& mdp) {
    double count = 1.0;
    for (const auto& c : mdp.choices) count *= static_cast<double>(c.size());
    return count;
}

BruteForceResult bruteForceAcpc(const CycleProblem& problem, const std::optional<StateSet>& kStates) {
    const auto& mdp = problem.mdp();
    const double count = policyCount(mdp);
    if (count > kBruteForceLimit) {
        throw Error(ErrorCode::TooLarge, std::to_string(static_cast<long long>(count)) +
                                             " stationary policies exceed the brute-force bound of 1000000");
    }
    const std::size_t n = mdp.numStates();
    std::vector<std::size_t> digits(n, 0);
    StationaryPolicy policy{std::vector<ActionId>(n)};

    BruteForceResult best;
    bool found = false;
    while (true) {
        for (std::size_t i = 0; i < n; ++i) policy.choice[i] = mdp.choices[i][digits[i]].action;
        ++best.enumerated;

        if (isProper(mdp, policy, problem.piStates()) &&
            (!kStates || recurrentClassesMeet(mdp, policy, *kStates))) {
            ++best.admissible;
            double lambda = firstReturnGain(firstReturnKernel(problem, policy), cycleCost(problem, policy)).maxCoeff();
            if (!found || lambda < best.lambda - 1e-10 * std::max(1.0, std::abs(best.lambda))) {
                best.lambda = lambda;
                best.policy = policy;
                found = true;
            }
        }

        // Odometer: last state varies fastest, so the first hit is lexicographically smallest.
        bool rolled = true;
        for (std::size_t pos = n; pos-- > 0;) {
            if (++digits[pos] < mdp.choices[pos].size()) {
                rolled = false;
                break;
            }
            digits[pos] = 0;
        }
        if (rolled) break;
    }
    if (!found) throw Error(ErrorCode::ImproperPolicy, "no admissible stationary policy exists");
    return best;
}

}  // namespace cyclesynth
