#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyclemix/chain.hpp"
#include "cyclemix/graph.hpp"

namespace cyclemix {

// A vertex cut with its stationary flow and conductance.
struct CutResult {
    std::vector<uint32_t> set;  // sorted node ids, nonempty proper subset
    double flow = 0.0;          // Q(S, S^c)
    double denom = 0.0;         // pi(S) * pi(S^c)
    double phi = 0.0;           // flow / denom
};

enum class PhiKind { Exact, ConnectedExact, ArcUpperBound };

std::string phi_kind_name(PhiKind k);

struct ConductanceEstimate {
    double value = 0.0;
    PhiKind kind = PhiKind::Exact;
    std::optional<CutResult> witness;
};

// Q(A,B) = sum over i in A, j in B of pi_i p_ij with uniform pi = 1/n.
double flow(const TransitionMatrix& P, std::span<const uint32_t> A, std::span<const uint32_t> B);

CutResult phi_of_set(const TransitionMatrix& P, std::span<const uint32_t> S);

// Global minimum over all 2^n - 2 subsets; lexicographically smallest witness
// among values tied within relative 1e-12.
ConductanceEstimate conductance_exact(const TransitionMatrix& P, uint32_t limit = 20);

// Minimum over connected subsets only; equals the global value because the
// minimizing set is connected.
ConductanceEstimate conductance_connected(const TransitionMatrix& P, uint32_t limit = 40,
                                          uint64_t work_budget = 10'000'000);

// Minimum of Phi over the graph's empty arcs; an upper bound on the conductance.
ConductanceEstimate conductance_arc_upper(const TransitionMatrix& P, const LongRangeGraph& g,
                                          ArcMode mode = ArcMode::NoIncident);

// CSV row "phi,flow,denom,set" with the set hyphen-joined.
std::string cut_csv_row(const CutResult& cut);

inline constexpr double kPhiTieRelTol = 1e-12;

}  // namespace cyclemix
