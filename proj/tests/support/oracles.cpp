#include "oracles.hpp"

#include <algorithm>
#include <limits>

namespace oracle {

Matrix lazyLimit(const Matrix& p, int squarings) {
    const auto n = p.rows();
    Matrix m = 0.5 * (Matrix::Identity(n, n) + p);
    for (int k = 0; k < squarings; ++k) {
        m = m * m;
        // Keep rows stochastic against drift.
        for (Eigen::Index i = 0; i < n; ++i) m.row(i) /= m.row(i).sum();
    }
    return m;
}

Matrix powerAverage(const Matrix& p, int n) {
    Matrix acc = Matrix::Zero(p.rows(), p.cols());
    Matrix pk = Matrix::Identity(p.rows(), p.cols());
    for (int k = 0; k < n; ++k) {
        acc += pk;
        pk = pk * p;
    }
    return acc / n;
}

Matrix neumann(const Matrix& q) {
    const auto n = q.rows();
    Matrix acc = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 0; k < 1000000; ++k) {
        term = term * q;
        acc += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    return acc;
}

std::vector<std::vector<bool>> closure(const Matrix& p) {
    const auto n = static_cast<std::size_t>(p.rows());
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        r[i][i] = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (p(i, j) > 0.0) r[i][j] = true;
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!r[i][k]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (r[k][j]) r[i][j] = true;
            }
        }
    }
    return r;
}

std::vector<StateSet> recurrentClasses(const Matrix& p) {
    const auto n = static_cast<std::size_t>(p.rows());
    auto r = closure(p);
    std::vector<bool> used(n, false);
    std::vector<StateSet> out;
    for (std::size_t i = 0; i < n; ++i) {
        bool recurrent = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (r[i][j] && !r[j][i]) recurrent = false;
        }
        if (!recurrent || used[i]) continue;
        StateSet cls;
        for (std::size_t j = 0; j < n; ++j) {
            if (r[i][j]) {
                cls.push_back(j);
                used[j] = true;
            }
        }
        out.push_back(cls);
    }
    return out;
}

Matrix chain(const LabeledMdp& mdp, const StationaryPolicy& mu) {
    const auto n = static_cast<Eigen::Index>(mdp.numStates());
    Matrix p = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < mdp.numStates(); ++i) {
        for (const auto& t : mdp.find(i, mu.choice[i])->row) p(i, t.target) += t.probability;
    }
    return p;
}

Vector costs(const LabeledMdp& mdp, const StationaryPolicy& mu) {
    Vector g(static_cast<Eigen::Index>(mdp.numStates()));
    for (std::size_t i = 0; i < mdp.numStates(); ++i) g(i) = mdp.find(i, mu.choice[i])->cost;
    return g;
}

std::optional<Vector> cycleGain(const Matrix& p, const Vector& g, const std::vector<bool>& piMask) {
    const auto n = p.rows();
    Vector r = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (piMask[j]) r(i) += p(i, j);
        }
    }
    Matrix limit = lazyLimit(p);
    Vector out = Vector::Zero(n);
    for (const auto& cls : recurrentClasses(p)) {
        auto rep = static_cast<Eigen::Index>(cls.front());
        double num = 0.0, den = 0.0;
        for (std::size_t j : cls) {
            num += limit(rep, j) * g(j);
            den += limit(rep, j) * r(j);
        }
        if (den <= 1e-12) return std::nullopt;
        double lambda = num / den;
        for (Eigen::Index i = 0; i < n; ++i) {
            double mass = 0.0;
            for (std::size_t j : cls) mass += limit(i, j);
            out(i) += mass * lambda;
        }
    }
    return out;
}

bool proper(const Matrix& p, const std::vector<bool>& piMask) {
    auto r = closure(p);
    const auto n = static_cast<std::size_t>(p.rows());
    for (std::size_t i = 0; i < n; ++i) {
        bool hits = false;
        for (std::size_t j = 0; j < n; ++j) hits = hits || (r[i][j] && piMask[j]);
        if (!hits) return false;
    }
    return true;
}

bool classesMeet(const Matrix& p, const std::vector<bool>& mask) {
    for (const auto& cls : recurrentClasses(p)) {
        if (std::none_of(cls.begin(), cls.end(), [&](std::size_t j) { return mask[j]; })) return false;
    }
    return true;
}

std::optional<Best> enumerate(const LabeledMdp& mdp, const StateSet& pi, const std::optional<StateSet>& k) {
    const std::size_t n = mdp.numStates();
    std::vector<bool> piMask(n, false), kMask(n, false);
    for (std::size_t i : pi) piMask[i] = true;
    if (k) {
        for (std::size_t i : *k) kMask[i] = true;
    }
    std::optional<Best> best;
    std::size_t admissible = 0;
    forEachPolicy(mdp, [&](const StationaryPolicy& mu) {
        Matrix p = chain(mdp, mu);
        if (!proper(p, piMask)) return;
        if (k && !classesMeet(p, kMask)) return;
        ++admissible;
        auto j = cycleGain(p, costs(mdp, mu), piMask);
        if (!j) return;
        double lambda = j->maxCoeff();
        if (!best || lambda < best->lambda - 1e-10 * std::max(1.0, std::abs(best->lambda))) {
            best = Best{mu, lambda, 0};
        }
    });
    if (best) best->admissible = admissible;
    return best;
}

bool unichain(const LabeledMdp& mdp) {
    bool ok = true;
    forEachPolicy(mdp, [&](const StationaryPolicy& mu) {
        if (ok && recurrentClasses(chain(mdp, mu)).size() != 1) ok = false;
    });
    return ok;
}

Vector maxReachProbability(const LabeledMdp& mdp, const StateSet& target, int iterations) {
    const auto n = static_cast<Eigen::Index>(mdp.numStates());
    std::vector<bool> isTarget(mdp.numStates(), false);
    for (std::size_t t : target) isTarget[t] = true;
    Vector x = Vector::Zero(n);
    for (std::size_t t : target) x(t) = 1.0;
    for (int it = 0; it < iterations; ++it) {
        Vector y = x;
        for (std::size_t i = 0; i < mdp.numStates(); ++i) {
            if (isTarget[i]) continue;
            double best = 0.0;
            for (const auto& c : mdp.choices[i]) {
                double v = 0.0;
                for (const auto& t : c.row) v += t.probability * x(t.target);
                best = std::max(best, v);
            }
            y(i) = best;
        }
        x = y;
    }
    return x;
}

}  // namespace oracle
