#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cyclemix/graph.hpp"

namespace cyclemix {

// Parameters of the homogeneous chain: clockwise steps get q_c + r,
// counterclockwise q_c - r, each chord q_l / d, remainder stays put.
struct ChainParams {
    double q_c = 0.2;
    double q_l = 0.1;
    double r = 0.0;
    uint32_t d = 1;
    bool require_lazy = false;  // reject chains with any hold probability < 1/2
};

// Row-indexed sparse stochastic matrix. Off-diagonal entries are stored in
// CSR form; the diagonal hold probability completes each row to 1.
class TransitionMatrix {
public:
    static TransitionMatrix from_rows(uint32_t n,
                                      const std::vector<std::vector<std::pair<uint32_t, double>>>& offdiag);

    uint32_t n() const noexcept { return n_; }
    double hold(uint32_t i) const { return hold_[i]; }
    uint32_t row_size(uint32_t i) const { return offsets_[i + 1] - offsets_[i]; }
    std::span<const uint32_t> row_targets(uint32_t i) const {
        return {cols_.data() + offsets_[i], cols_.data() + offsets_[i + 1]};
    }
    std::span<const double> row_probs(uint32_t i) const {
        return {probs_.data() + offsets_[i], probs_.data() + offsets_[i + 1]};
    }
    size_t nnz_offdiag() const noexcept { return cols_.size(); }

    // p_ij including the diagonal; 0 for absent entries.
    double prob(uint32_t i, uint32_t j) const;

private:
    TransitionMatrix() = default;

    uint32_t n_ = 0;
    std::vector<uint32_t> offsets_;
    std::vector<uint32_t> cols_;   // ascending within each row
    std::vector<double> probs_;
    std::vector<double> hold_;
};

inline constexpr double kStochasticTol = 1e-12;

TransitionMatrix build_homogeneous(const LongRangeGraph& g, const ChainParams& params);

bool is_feasible(const LongRangeGraph& g, const ChainParams& params);
bool is_lazy(const TransitionMatrix& P);
bool is_doubly_stochastic(const TransitionMatrix& P, double tol = kStochasticTol);
bool is_reversible(const TransitionMatrix& P, double tol = kStochasticTol);

// Additive reversibilization (P + P^T)/2; keeps double stochasticity and the
// whole conductance profile.
TransitionMatrix reversibilize(const TransitionMatrix& P);

}  // namespace cyclemix
