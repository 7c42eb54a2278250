#include "cyclemix/conductance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cyclemix/error.hpp"

namespace cyclemix {

std::string phi_kind_name(PhiKind k) {
    switch (k) {
        case PhiKind::Exact: return "exact";
        case PhiKind::ConnectedExact: return "connected-exact";
        case PhiKind::ArcUpperBound: return "arc-upper-bound";
    }
    return "?";
}

double flow(const TransitionMatrix& P, std::span<const uint32_t> A, std::span<const uint32_t> B) {
    uint32_t n = P.n();
    std::vector<char> in_b(n, 0);
    for (uint32_t v : B) {
        if (v >= n) raise(ErrorKind::InvalidParameter, "node out of range");
        in_b[v] = 1;
    }
    for (uint32_t v : A) {
        if (v >= n) raise(ErrorKind::InvalidParameter, "node out of range");
        if (in_b[v]) raise(ErrorKind::OverlappingSets, "flow requires disjoint sets");
    }
    double inv_n = 1.0 / n;
    double q = 0.0;
    for (uint32_t i : A) {
        auto targets = P.row_targets(i);
        auto probs = P.row_probs(i);
        for (size_t k = 0; k < targets.size(); ++k)
            if (in_b[targets[k]]) q += inv_n * probs[k];
    }
    return q;
}

namespace {

// Canonical cut evaluation: ascending source node, entries in row order.
// Both enumerators route through this so tie comparisons see identical floats.
CutResult eval_cut(const TransitionMatrix& P, const std::vector<char>& in_s, uint32_t set_size) {
    uint32_t n = P.n();
    double inv_n = 1.0 / n;
    double q = 0.0;
    for (uint32_t i = 0; i < n; ++i) {
        if (!in_s[i]) continue;
        auto targets = P.row_targets(i);
        auto probs = P.row_probs(i);
        for (size_t k = 0; k < targets.size(); ++k)
            if (!in_s[targets[k]]) q += inv_n * probs[k];
    }
    CutResult cut;
    cut.set.reserve(set_size);
    for (uint32_t i = 0; i < n; ++i)
        if (in_s[i]) cut.set.push_back(i);
    double pi_s = static_cast<double>(set_size) * inv_n;
    cut.flow = q;
    cut.denom = pi_s * (1.0 - pi_s);
    cut.phi = cut.flow / cut.denom;
    return cut;
}

bool lex_less(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

CutResult phi_of_set(const TransitionMatrix& P, std::span<const uint32_t> S) {
    uint32_t n = P.n();
    if (S.empty() || S.size() >= n)
        raise(ErrorKind::EmptyOrFullSet, "Phi(S) needs a nonempty proper subset");
    std::vector<char> in_s(n, 0);
    uint32_t count = 0;
    for (uint32_t v : S) {
        if (v >= n) raise(ErrorKind::InvalidParameter, "node out of range");
        if (!in_s[v]) {
            in_s[v] = 1;
            ++count;
        }
    }
    if (count >= n) raise(ErrorKind::EmptyOrFullSet, "Phi(S) needs a proper subset");
    return eval_cut(P, in_s, count);
}

ConductanceEstimate conductance_exact(const TransitionMatrix& P, uint32_t limit) {
    uint32_t n = P.n();
    if (n < 2) raise(ErrorKind::InvalidParameter, "conductance needs n >= 2");
    if (n > limit)
        raise(ErrorKind::TooLarge, "exhaustive enumeration limited to n <= " + std::to_string(limit) +
                                       "; use conductance_connected or the arc bound");

    uint64_t all = (uint64_t{1} << n) - 1;
    std::vector<char> in_s(n, 0);
    auto fill = [&](uint64_t mask) {
        uint32_t size = 0;
        for (uint32_t i = 0; i < n; ++i) {
            in_s[i] = (mask >> i) & 1 ? 1 : 0;
            size += in_s[i];
        }
        return size;
    };

    // Pass 1: the minimum value.
    double best = std::numeric_limits<double>::infinity();
    for (uint64_t mask = 1; mask < all; ++mask) {
        uint32_t size = fill(mask);
        CutResult cut = eval_cut(P, in_s, size);
        best = std::min(best, cut.phi);
    }
    // Pass 2: lexicographically smallest witness among ties.
    double threshold = best + kPhiTieRelTol * std::max(1.0, std::abs(best));
    std::optional<CutResult> witness;
    for (uint64_t mask = 1; mask < all; ++mask) {
        uint32_t size = fill(mask);
        CutResult cut = eval_cut(P, in_s, size);
        if (cut.phi <= threshold && (!witness || lex_less(cut.set, witness->set)))
            witness = std::move(cut);
    }
    return ConductanceEstimate{witness->phi, PhiKind::Exact, std::move(witness)};
}

namespace {

// Symmetric connectivity graph of P (p_ij > 0 or p_ji > 0).
std::vector<std::vector<uint32_t>> connectivity(const TransitionMatrix& P) {
    uint32_t n = P.n();
    std::vector<std::vector<uint32_t>> adj(n);
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j : P.row_targets(i)) {
            adj[i].push_back(j);
            adj[j].push_back(i);
        }
    for (auto& nb : adj) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return adj;
}

bool graph_connected(const std::vector<std::vector<uint32_t>>& adj) {
    if (adj.empty()) return true;
    std::vector<char> seen(adj.size(), 0);
    std::vector<uint32_t> stack{0};
    seen[0] = 1;
    size_t visited = 1;
    while (!stack.empty()) {
        uint32_t v = stack.back();
        stack.pop_back();
        for (uint32_t w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++visited;
                stack.push_back(w);
            }
    }
    return visited == adj.size();
}

// Enumerates every connected vertex subset exactly once: subsets containing
// root r draw only from nodes > r; extension candidates are processed with a
// forbidden set so each branch yields distinct sets.
class ConnectedEnumerator {
public:
    ConnectedEnumerator(const TransitionMatrix& P, const std::vector<std::vector<uint32_t>>& adj,
                        uint64_t budget)
        : P_(P), adj_(adj), n_(P.n()), budget_(budget), in_s_(n_, 0), banned_(n_, 0) {}

    template <typename Visit>
    void run(Visit&& visit) {
        for (uint32_t root = 0; root < n_; ++root) {
            std::fill(banned_.begin(), banned_.end(), 0);
            for (uint32_t v = 0; v <= root && v < n_; ++v) banned_[v] = 1;
            in_s_[root] = 1;
            size_ = 1;
            std::vector<uint32_t> frontier;
            for (uint32_t w : adj_[root])
                if (!banned_[w]) frontier.push_back(w);
            extend(frontier, visit);
            in_s_[root] = 0;
        }
    }

private:
    template <typename Visit>
    void extend(const std::vector<uint32_t>& frontier, Visit&& visit) {
        if (size_ < n_) {
            if (budget_-- == 0)
                raise(ErrorKind::TooLarge, "connected-subset enumeration exceeded its work budget");
            visit(in_s_, size_);
        }
        std::vector<uint32_t> local_banned;
        for (size_t idx = 0; idx < frontier.size(); ++idx) {
            uint32_t v = frontier[idx];
            if (banned_[v]) continue;
            in_s_[v] = 1;
            ++size_;
            std::vector<uint32_t> next(frontier.begin() + idx + 1, frontier.end());
            for (uint32_t w : adj_[v])
                if (!banned_[w] && !in_s_[w]) next.push_back(w);
            extend(next, visit);
            in_s_[v] = 0;
            --size_;
            banned_[v] = 1;  // later branches must not re-add v
            local_banned.push_back(v);
        }
        for (uint32_t v : local_banned) banned_[v] = 0;
    }

    const TransitionMatrix& P_;
    const std::vector<std::vector<uint32_t>>& adj_;
    uint32_t n_;
    uint64_t budget_;
    std::vector<char> in_s_;
    std::vector<char> banned_;
    uint32_t size_ = 0;
};

}  // namespace

ConductanceEstimate conductance_connected(const TransitionMatrix& P, uint32_t limit,
                                          uint64_t work_budget) {
    uint32_t n = P.n();
    if (n < 2) raise(ErrorKind::InvalidParameter, "conductance needs n >= 2");
    if (n > limit)
        raise(ErrorKind::TooLarge,
              "connected enumeration limited to n <= " + std::to_string(limit));
    auto adj = connectivity(P);
    if (!graph_connected(adj))
        raise(ErrorKind::DisconnectedChain, "connectivity graph of P is not connected");

    double best = std::numeric_limits<double>::infinity();
    {
        ConnectedEnumerator enumerator(P, adj, work_budget);
        enumerator.run([&](const std::vector<char>& in_s, uint32_t size) {
            best = std::min(best, eval_cut(P, in_s, size).phi);
        });
    }
    double threshold = best + kPhiTieRelTol * std::max(1.0, std::abs(best));
    std::optional<CutResult> witness;
    {
        ConnectedEnumerator enumerator(P, adj, work_budget);
        enumerator.run([&](const std::vector<char>& in_s, uint32_t size) {
            CutResult cut = eval_cut(P, in_s, size);
            if (cut.phi <= threshold && (!witness || lex_less(cut.set, witness->set)))
                witness = std::move(cut);
        });
    }
    return ConductanceEstimate{witness->phi, PhiKind::ConnectedExact, std::move(witness)};
}

ConductanceEstimate conductance_arc_upper(const TransitionMatrix& P, const LongRangeGraph& g,
                                          ArcMode mode) {
    if (P.n() != g.n()) raise(ErrorKind::InvalidParameter, "matrix and graph dimensions differ");
    ArcScan scan = empty_arcs(g, mode);
    if (scan.whole_cycle)
        raise(ErrorKind::NoEmptyArc, "graph has no long-range endpoints, so no proper empty arc");
    if (scan.arcs.empty()) raise(ErrorKind::NoEmptyArc, "graph has no empty arc");

    uint32_t n = P.n();
    std::vector<char> in_s(n, 0);
    auto cut_of_arc = [&](const Arc& a) {
        std::fill(in_s.begin(), in_s.end(), 0);
        for (uint32_t t = 0; t < a.length; ++t) in_s[(a.start + t) % n] = 1;
        return eval_cut(P, in_s, a.length);
    };

    double best = std::numeric_limits<double>::infinity();
    for (const Arc& a : scan.arcs) best = std::min(best, cut_of_arc(a).phi);
    double threshold = best + kPhiTieRelTol * std::max(1.0, std::abs(best));
    std::optional<CutResult> witness;
    for (const Arc& a : scan.arcs) {
        CutResult cut = cut_of_arc(a);
        if (cut.phi <= threshold && (!witness || lex_less(cut.set, witness->set)))
            witness = std::move(cut);
    }
    return ConductanceEstimate{witness->phi, PhiKind::ArcUpperBound, std::move(witness)};
}

std::string cut_csv_row(const CutResult& cut) {
    char buf[64];
    std::string out;
    auto append_num = [&](double x) {
        snprintf(buf, sizeof buf, "%.17g", x);
        out += buf;
    };
    append_num(cut.phi);
    out += ',';
    append_num(cut.flow);
    out += ',';
    append_num(cut.denom);
    out += ',';
    for (size_t i = 0; i < cut.set.size(); ++i) {
        if (i) out += '-';
        out += std::to_string(cut.set[i]);
    }
    return out;
}

}  // namespace cyclemix
