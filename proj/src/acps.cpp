#include "cyclesynth/acps.hpp"

#include "cyclesynth/error.hpp"

#include <cmath>
#include <limits>

namespace cyclesynth {

Matrix policyMatrix(const LabeledMdp& mdp, const StationaryPolicy& policy) {
    const auto n = static_cast<Eigen::Index>(mdp.numStates());
    if (policy.choice.size() != mdp.numStates()) {
        throw Error(ErrorCode::PolicyIncomplete, "policy size does not match the state count");
    }
    Matrix p = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < mdp.numStates(); ++i) {
        for (const auto& t : chosen(mdp, policy, i).row) p(i, t.target) += t.probability;
    }
    return p;
}

Vector policyCost(const LabeledMdp& mdp, const StationaryPolicy& policy) {
    Vector g(static_cast<Eigen::Index>(mdp.numStates()));
    for (std::size_t i = 0; i < mdp.numStates(); ++i) g(i) = chosen(mdp, policy, i).cost;
    return g;
}

GainBias acpsGainBias(const Matrix& p, const Vector& g) {
    if (p.rows() != g.size()) throw Error(ErrorCode::DimensionMismatch, "cost vector does not match the chain");
    if (!g.allFinite()) throw Error(ErrorCode::NumericalFailure, "non-finite stage cost");
    Matrix limit = cesaroLimit(p);
    Matrix deviation = deviationMatrix(p, limit);

    GainBias out;
    out.gain = limit * g;
    out.bias = deviation * g;
    // h + v = P v, i.e. (I - P) v = -h; consistent because P* h = 0.
    const Eigen::Index n = p.rows();
    out.auxiliary = solveLinear(Matrix::Identity(n, n) - p, -out.bias).x;
    return out;
}

bool acpsBellmanCheck(const LabeledMdp& mdp, const GainBias& candidate, double tolerance) {
    const Vector& gain = candidate.gain;
    const Vector& bias = candidate.bias;
    const bool constant = gain.size() == 0 || (gain.maxCoeff() - gain.minCoeff()) <= tolerance;

    for (std::size_t i = 0; i < mdp.numStates(); ++i) {
        // Gain minimality (trivial when the gain is constant).
        double bestGain = std::numeric_limits<double>::infinity();
        std::vector<double> expectedGain;
        for (const auto& c : mdp.choices[i]) {
            double value = 0.0;
            for (const auto& t : c.row) value += t.probability * gain(t.target);
            expectedGain.push_back(value);
            bestGain = std::min(bestGain, value);
        }
        if (!constant && std::abs(bestGain - gain(i)) > tolerance) return false;

        double bestBias = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < mdp.choices[i].size(); ++k) {
            if (!constant && expectedGain[k] > bestGain + tolerance) continue;
            const auto& c = mdp.choices[i][k];
            double value = c.cost;
            for (const auto& t : c.row) value += t.probability * bias(t.target);
            bestBias = std::min(bestBias, value);
        }
        double lhs = gain(i) + bias(i);
        if (constant) {
            if (lhs > bestBias + tolerance) return false;
        } else if (std::abs(lhs - bestBias) > tolerance) {
            return false;
        }
    }
    return true;
}

}  // namespace cyclesynth
