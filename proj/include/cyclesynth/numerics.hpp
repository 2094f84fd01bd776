#pragma once

#include <Eigen/Dense>

namespace cyclesynth {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kResidualTolerance = 1e-8;
inline constexpr double kRankTolerance = 1e-10;

struct LinearSolution {
    Vector x;
    bool rankDeficient = false;
    std::ptrdiff_t rank = 0;
};

/// Square solve with partial pivoting. Rank-deficient systems fall back to the
/// minimum-norm least-squares solution. Throws NumericalFailure when the
/// residual exceeds 1e-8 * max(1, |b|_inf).
LinearSolution solveLinear(const Matrix& a, const Vector& b);

/// Minimum-norm least-squares solve of a rectangular system, with the same
/// residual contract as solveLinear.
LinearSolution solveLeastSquares(const Matrix& a, const Vector& b);

bool isRowStochastic(const Matrix& p, double tolerance = 1e-9);

/// Recurrent classes of the chain with transition matrix `p` (edges p > 0).
std::vector<std::vector<std::size_t>> recurrentClassesOf(const Matrix& p);

/// Cesaro limit P* built from recurrent classes, their stationary
/// distributions and absorption probabilities. Exact for periodic chains.
Matrix cesaroLimit(const Matrix& p);

/// H = (I - P + P*)^{-1} - P*.
Matrix deviationMatrix(const Matrix& p);
Matrix deviationMatrix(const Matrix& p, const Matrix& cesaro);

/// (I - Q)^{-1} for a transient substochastic Q.
Matrix transientInverse(const Matrix& q);

double infNorm(const Matrix& a);

}  // namespace cyclesynth
