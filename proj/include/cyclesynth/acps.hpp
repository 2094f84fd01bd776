#pragma once

#include "cyclesynth/mdp.hpp"
#include "cyclesynth/numerics.hpp"

namespace cyclesynth {

/// Average-cost-per-stage gain, bias and auxiliary vector of one chain.
struct GainBias {
    Vector gain;
    Vector bias;
    Vector auxiliary;
};

GainBias acpsGainBias(const Matrix& p, const Vector& g);

/// Chain matrix P_mu and stage costs g_mu of a total policy.
Matrix policyMatrix(const LabeledMdp& mdp, const StationaryPolicy& policy);
Vector policyCost(const LabeledMdp& mdp, const StationaryPolicy& policy);

/**
 * Average-cost-per-stage optimality check over all stationary policies,
 * expanded state by state. When the candidate gain is constant this is the
 * single-chain condition lambda + h(i) <= g(i,u) + sum_j P(i,u,j) h(j) for
 * every available u; otherwise both multichain equations are checked
 * (gain minimality, then bias minimality over gain-minimizing actions).
 */
bool acpsBellmanCheck(const LabeledMdp& mdp, const GainBias& candidate, double tolerance = 1e-8);

}  // namespace cyclesynth
