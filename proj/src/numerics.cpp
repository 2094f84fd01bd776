#include "cyclesynth/numerics.hpp"

#include "cyclesynth/error.hpp"
#include "cyclesynth/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace cyclesynth {

double infNorm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

namespace {

void checkResidual(const Matrix& a, const Vector& x, const Vector& b) {
    double scale = std::max(1.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
    double residual = a.rows() ? (a * x - b).cwiseAbs().maxCoeff() : 0.0;
    if (!(residual <= kResidualTolerance * scale)) {
        std::ostringstream os;
        os << "linear solve residual " << residual << " exceeds " << kResidualTolerance * scale;
        throw Error(ErrorCode::NumericalFailure, os.str());
    }
}

std::string dims(const Matrix& a) {
    return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

}  // namespace

LinearSolution solveLeastSquares(const Matrix& a, const Vector& b) {
    if (a.rows() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "matrix " + dims(a) + " vs rhs " + std::to_string(b.size()));
    }
    LinearSolution out;
    if (a.cols() == 0) {
        out.x = Vector::Zero(0);
        checkResidual(a, out.x, b);
        return out;
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
    cod.setThreshold(kRankTolerance);
    cod.compute(a);
    out.rank = cod.rank();
    out.rankDeficient = out.rank < std::min(a.rows(), a.cols());
    out.x = cod.solve(b);
    checkResidual(a, out.x, b);
    return out;
}

LinearSolution solveLinear(const Matrix& a, const Vector& b) {
    if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix " + dims(a) + " is not square");
    if (a.rows() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "matrix " + dims(a) + " vs rhs " + std::to_string(b.size()));
    }
    if (a.rows() == 0) return {Vector::Zero(0), false, 0};

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
    cod.setThreshold(kRankTolerance);
    cod.compute(a);

    LinearSolution out;
    out.rank = cod.rank();
    if (out.rank == a.rows()) {
        out.x = a.partialPivLu().solve(b);
    } else {
        out.rankDeficient = true;
        out.x = cod.solve(b);
    }
    checkResidual(a, out.x, b);
    return out;
}

bool isRowStochastic(const Matrix& p, double tolerance) {
    if (p.rows() != p.cols()) return false;
    if (!p.allFinite()) return false;
    if (p.size() && p.minCoeff() < -tolerance) return false;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        if (std::abs(p.row(i).sum() - 1.0) > tolerance) return false;
    }
    return true;
}

std::vector<std::vector<std::size_t>> recurrentClassesOf(const Matrix& p) {
    const auto n = static_cast<std::size_t>(p.rows());
    Adjacency graph(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (p(i, j) > 0.0) graph[i].push_back(j);
        }
    }
    return bottomComponents(graph);
}

Matrix cesaroLimit(const Matrix& p) {
    if (!isRowStochastic(p)) throw Error(ErrorCode::NotStochastic, "matrix " + dims(p) + " is not row-stochastic");
    const auto n = static_cast<std::size_t>(p.rows());
    Matrix limit = Matrix::Zero(p.rows(), p.cols());
    if (n == 0) return limit;

    auto classes = recurrentClassesOf(p);
    std::vector<long> classOf(n, -1);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (std::size_t i : classes[c]) classOf[i] = static_cast<long>(c);
    }

    // Stationary distribution of each class: pi (I - P_RR) = 0, sum(pi) = 1.
    std::vector<Vector> stationary;
    for (const auto& cls : classes) {
        const auto m = static_cast<Eigen::Index>(cls.size());
        Matrix a(m, m);
        for (Eigen::Index r = 0; r < m; ++r) {
            for (Eigen::Index c = 0; c < m; ++c) {
                a(r, c) = (r == c ? 1.0 : 0.0) - p(cls[c], cls[r]);
            }
        }
        a.row(m - 1).setOnes();
        Vector rhs = Vector::Zero(m);
        rhs(m - 1) = 1.0;
        stationary.push_back(solveLinear(a, rhs).x);
    }

    std::vector<std::size_t> transient;
    for (std::size_t i = 0; i < n; ++i) {
        if (classOf[i] < 0) transient.push_back(i);
    }

    // Absorption probabilities a(i, R) for transient i.
    Matrix absorb = Matrix::Zero(static_cast<Eigen::Index>(transient.size()),
                                 static_cast<Eigen::Index>(classes.size()));
    if (!transient.empty()) {
        if (classes.size() == 1) {
            absorb.setOnes();
        } else {
            const auto t = static_cast<Eigen::Index>(transient.size());
            Matrix system(t, t);
            Matrix rhs = Matrix::Zero(t, static_cast<Eigen::Index>(classes.size()));
            for (Eigen::Index r = 0; r < t; ++r) {
                for (Eigen::Index c = 0; c < t; ++c) {
                    system(r, c) = (r == c ? 1.0 : 0.0) - p(transient[r], transient[c]);
                }
                for (std::size_t j = 0; j < n; ++j) {
                    if (classOf[j] >= 0) rhs(r, classOf[j]) += p(transient[r], j);
                }
            }
            for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
                absorb.col(c) = solveLinear(system, rhs.col(c)).x;
            }
        }
    }

    for (std::size_t c = 0; c < classes.size(); ++c) {
        const auto& cls = classes[c];
        for (std::size_t k = 0; k < cls.size(); ++k) {
            double weight = stationary[c](static_cast<Eigen::Index>(k));
            for (std::size_t i : cls) limit(i, cls[k]) = weight;
            for (std::size_t t = 0; t < transient.size(); ++t) {
                limit(transient[t], cls[k]) = absorb(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) * weight;
            }
        }
    }
    return limit;
}

Matrix deviationMatrix(const Matrix& p, const Matrix& cesaro) {
    const Eigen::Index n = p.rows();
    Matrix fundamental = Matrix::Identity(n, n) - p + cesaro;
    Eigen::FullPivLU<Matrix> lu(fundamental);
    if (!lu.isInvertible()) throw Error(ErrorCode::NumericalFailure, "I - P + P* is singular");
    Matrix inverse = lu.inverse();
    if (n && ((fundamental * inverse - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() >
                   kResidualTolerance * std::max(1.0, infNorm(inverse)))) {
        throw Error(ErrorCode::NumericalFailure, "I - P + P* inverse is inaccurate");
    }
    return inverse - cesaro;
}

Matrix deviationMatrix(const Matrix& p) { return deviationMatrix(p, cesaroLimit(p)); }

Matrix transientInverse(const Matrix& q) {
    if (q.rows() != q.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix " + dims(q) + " is not square");
    const Eigen::Index n = q.rows();
    if (n == 0) return Matrix(0, 0);
    Matrix system = Matrix::Identity(n, n) - q;
    Eigen::FullPivLU<Matrix> lu(system);
    lu.setThreshold(kRankTolerance);
    if (!lu.isInvertible()) throw Error(ErrorCode::NotTransient, "I - Q is singular");
    Matrix inverse = lu.inverse();
    if ((system * inverse - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() >
        kResidualTolerance * std::max(1.0, infNorm(inverse))) {
        throw Error(ErrorCode::NotTransient, "I - Q is numerically singular");
    }
    if (inverse.minCoeff() < -1e-10) {
        throw Error(ErrorCode::NotTransient, "(I - Q)^{-1} has negative entries");
    }
    return inverse;
}

}  // namespace cyclesynth
