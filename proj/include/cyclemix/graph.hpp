#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cyclemix/rng.hpp"

namespace cyclemix {

enum class Model { M1, M2, M3 };

std::string model_name(Model m);
Model model_from_name(const std::string& name);

// Unordered node pair, stored with u < v.
struct Edge {
    uint32_t u;
    uint32_t v;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Cycle of n nodes plus long-range chords. Immutable after construction.
class LongRangeGraph {
public:
    LongRangeGraph(uint32_t n, double alpha, Model model, uint64_t seed, std::vector<Edge> edges);

    uint32_t n() const noexcept { return n_; }
    double alpha() const noexcept { return alpha_; }
    Model model() const noexcept { return model_; }
    uint64_t seed() const noexcept { return seed_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    uint32_t long_range_degree(uint32_t v) const { return offsets_[v + 1] - offsets_[v]; }
    std::span<const uint32_t> neighbors(uint32_t v) const {
        return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
    }

    // Set if M1 endpoint positions collided and were deduplicated.
    bool degenerate() const noexcept { return degenerate_; }
    void mark_degenerate() noexcept { degenerate_ = true; }

private:
    uint32_t n_;
    double alpha_;
    Model model_;
    uint64_t seed_;
    std::vector<Edge> edges_;        // sorted lexicographically, unique
    std::vector<uint32_t> offsets_;  // CSR adjacency over chords
    std::vector<uint32_t> targets_;
    bool degenerate_ = false;
};

// Run of consecutive cycle nodes start, start+1, ..., start+length-1 (mod n).
struct Arc {
    uint32_t start;
    uint32_t length;

    friend bool operator==(const Arc&, const Arc&) = default;
};

struct ArcScan {
    std::vector<Arc> arcs;  // sorted by length descending, then start ascending
    bool whole_cycle = false;  // set when the edge set is empty and the single arc is the full cycle
};

enum class ArcMode {
    NoIncident,  // arcs of nodes with no incident chord at all
    NoOutgoing,  // maximal arcs with no chord leaving the arc (internal chords allowed)
};

// Reduced cycle used by the conductance lower-bound constructions: every
// reduced node keeps one matching edge, empty arcs collapse to cycle edges.
struct ReducedGraph {
    uint32_t m = 0;
    std::vector<Edge> matching;            // perfect matching on reduced ids 0..m-1
    std::vector<uint32_t> origin;          // reduced id -> original node
};

// Quotient of an exactly-equidistant M1 graph: the cycle wound onto
// n^(alpha-1)/2 nodes, matching edges collapsing to self-loops at node 0.
struct WoundGraph {
    uint32_t m = 0;
    std::vector<uint32_t> loop_edges;              // per quotient node, collapsed chord count per member
    std::vector<std::vector<uint32_t>> origin;     // quotient node -> original nodes
    std::vector<uint32_t> projection;              // original node -> quotient node
};

LongRangeGraph generate_m1(uint32_t n, double alpha, uint64_t seed);
LongRangeGraph generate_m2(uint32_t n, double alpha, uint64_t seed);
LongRangeGraph generate_m3(uint32_t n, double alpha, uint64_t seed);

uint32_t max_long_range_degree(const LongRangeGraph& g);

// Ceiling of 2/(alpha-1), the per-alpha cap on long-range degrees.
uint32_t degree_cap(double alpha);

ArcScan empty_arcs(const LongRangeGraph& g, ArcMode mode = ArcMode::NoIncident);

ReducedGraph reduce_m1(const LongRangeGraph& g);
ReducedGraph reduce_with_splitting(const LongRangeGraph& g, uint64_t seed);

WoundGraph wind_up(const LongRangeGraph& g);

// View a reduced cycle-plus-matching as a graph in its own right, so the
// homogeneous chain machinery can run on it.
LongRangeGraph reduced_as_graph(const ReducedGraph& r, double alpha, uint64_t seed);

// Number of long-range edges / endpoint count the models aim for.
uint64_t target_edge_count(uint32_t n, double alpha);

// ceil(x) with a relative snap-to-integer guard, so values like 6.000000000000001
// coming out of pow() round the way the closed-form arithmetic intends.
uint64_t ceil_snapped(double x);

}  // namespace cyclemix
