#include "cyclemix/chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cyclemix/error.hpp"

namespace cyclemix {

TransitionMatrix TransitionMatrix::from_rows(
    uint32_t n, const std::vector<std::vector<std::pair<uint32_t, double>>>& offdiag) {
    if (n == 0 || offdiag.size() != n)
        raise(ErrorKind::InvalidParameter, "row count does not match dimension");

    TransitionMatrix P;
    P.n_ = n;
    P.offsets_.assign(n + 1, 0);
    P.hold_.resize(n);
    for (uint32_t i = 0; i < n; ++i) {
        std::vector<std::pair<uint32_t, double>> row = offdiag[i];
        std::sort(row.begin(), row.end());
        double sum = 0.0;
        uint32_t prev = UINT32_MAX;
        for (const auto& [j, p] : row) {
            if (j >= n) raise(ErrorKind::InvalidParameter, "column index out of range");
            if (j == i) raise(ErrorKind::InvalidParameter, "diagonal entries are implicit");
            if (j == prev) raise(ErrorKind::InvalidParameter, "duplicate column in row");
            if (p < 0.0 || p > 1.0)
                raise(ErrorKind::InvalidParameter, "probability outside [0,1]");
            prev = j;
            sum += p;
            if (p > 0.0) {
                P.cols_.push_back(j);
                P.probs_.push_back(p);
            }
        }
        double hold = 1.0 - sum;
        if (hold < -kStochasticTol)
            raise(ErrorKind::InfeasibleParams,
                  "row " + std::to_string(i) + " exceeds total probability 1");
        P.hold_[i] = std::max(hold, 0.0);
        P.offsets_[i + 1] = static_cast<uint32_t>(P.cols_.size());
    }
    return P;
}

double TransitionMatrix::prob(uint32_t i, uint32_t j) const {
    if (i == j) return hold_[i];
    auto targets = row_targets(i);
    auto it = std::lower_bound(targets.begin(), targets.end(), j);
    if (it == targets.end() || *it != j) return 0.0;
    return probs_[offsets_[i] + static_cast<uint32_t>(it - targets.begin())];
}

namespace {

void check_params(const ChainParams& p) {
    if (p.q_c < 0.0) raise(ErrorKind::InvalidParameter, "q_c must be nonnegative");
    if (p.q_l < 0.0) raise(ErrorKind::InvalidParameter, "q_l must be nonnegative");
    if (p.r < 0.0 || p.r > p.q_c) raise(ErrorKind::InvalidParameter, "drift r must satisfy 0 <= r <= q_c");
    if (p.d < 1) raise(ErrorKind::InvalidParameter, "long-range divisor d must be at least 1");
}

}  // namespace

bool is_feasible(const LongRangeGraph& g, const ChainParams& params) {
    check_params(params);
    double chord = params.q_l / params.d;
    double worst = 2.0 * params.q_c + chord * max_long_range_degree(g);
    return worst <= 1.0 + kStochasticTol;
}

TransitionMatrix build_homogeneous(const LongRangeGraph& g, const ChainParams& params) {
    if (!is_feasible(g, params))
        raise(ErrorKind::InfeasibleParams,
              "row mass exceeds 1: 2*q_c + deg_max*q_l/d > 1 for this graph");

    uint32_t n = g.n();
    double cw = params.q_c + params.r;
    double ccw = params.q_c - params.r;
    double chord = params.q_l / params.d;

    std::vector<std::vector<std::pair<uint32_t, double>>> rows(n);
    for (uint32_t i = 0; i < n; ++i) {
        auto& row = rows[i];
        auto add = [&row](uint32_t j, double p) {
            for (auto& [t, q] : row)
                if (t == j) {
                    q += p;  // chord on a cycle edge, or n=2 where both neighbors coincide
                    return;
                }
            row.emplace_back(j, p);
        };
        if (n >= 2) {
            add((i + 1) % n, cw);
            if ((i + n - 1) % n != (i + 1) % n)
                add((i + n - 1) % n, ccw);
            else
                add((i + 1) % n, ccw);
        }
        for (uint32_t w : g.neighbors(i)) add(w, chord);
    }
    TransitionMatrix P = TransitionMatrix::from_rows(n, rows);
    if (params.require_lazy && !is_lazy(P))
        raise(ErrorKind::InfeasibleParams, "chain is not lazy: some hold probability is below 1/2");
    return P;
}

bool is_lazy(const TransitionMatrix& P) {
    for (uint32_t i = 0; i < P.n(); ++i)
        if (P.hold(i) < 0.5 - kStochasticTol) return false;
    return true;
}

bool is_doubly_stochastic(const TransitionMatrix& P, double tol) {
    uint32_t n = P.n();
    std::vector<double> col_sum(n, 0.0);
    for (uint32_t i = 0; i < n; ++i) {
        double row_sum = P.hold(i);
        col_sum[i] += P.hold(i);
        auto targets = P.row_targets(i);
        auto probs = P.row_probs(i);
        for (size_t k = 0; k < targets.size(); ++k) {
            row_sum += probs[k];
            col_sum[targets[k]] += probs[k];
        }
        if (std::abs(row_sum - 1.0) > tol) return false;
    }
    for (uint32_t j = 0; j < n; ++j)
        if (std::abs(col_sum[j] - 1.0) > tol) return false;
    return true;
}

bool is_reversible(const TransitionMatrix& P, double tol) {
    if (!is_doubly_stochastic(P))
        raise(ErrorKind::PreconditionViolated,
              "reversibility test assumes a doubly stochastic matrix (uniform pi)");
    for (uint32_t i = 0; i < P.n(); ++i) {
        auto targets = P.row_targets(i);
        auto probs = P.row_probs(i);
        for (size_t k = 0; k < targets.size(); ++k)
            if (std::abs(probs[k] - P.prob(targets[k], i)) > tol) return false;
    }
    return true;
}

TransitionMatrix reversibilize(const TransitionMatrix& P) {
    if (!is_doubly_stochastic(P))
        raise(ErrorKind::PreconditionViolated,
              "reversibilization assumes a doubly stochastic matrix");
    uint32_t n = P.n();
    std::vector<std::vector<std::pair<uint32_t, double>>> rows(n);
    for (uint32_t i = 0; i < n; ++i) {
        auto targets = P.row_targets(i);
        auto probs = P.row_probs(i);
        for (size_t k = 0; k < targets.size(); ++k) {
            uint32_t j = targets[k];
            double avg = (probs[k] + P.prob(j, i)) / 2.0;
            rows[i].emplace_back(j, avg);
            if (P.prob(j, i) == 0.0) rows[j].emplace_back(i, avg);  // entry only present one way
        }
    }
    return TransitionMatrix::from_rows(n, rows);
}

}  // namespace cyclemix
