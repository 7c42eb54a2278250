#include "cyclemix/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

#include "cyclemix/error.hpp"

namespace cyclemix {

std::string model_name(Model m) {
    switch (m) {
        case Model::M1: return "M1";
        case Model::M2: return "M2";
        case Model::M3: return "M3";
    }
    return "?";
}

Model model_from_name(const std::string& name) {
    std::string up = name;
    for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "M1") return Model::M1;
    if (up == "M2") return Model::M2;
    if (up == "M3") return Model::M3;
    raise(ErrorKind::InvalidParameter, "unknown model '" + name + "' (expected M1, M2 or M3)");
}

uint64_t ceil_snapped(double x) {
    double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(r))) return static_cast<uint64_t>(r);
    return static_cast<uint64_t>(std::ceil(x));
}

namespace {

double snapped(double x) {
    double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(r))) return r;
    return x;
}

void check_model_params(uint32_t n, double alpha) {
    if (n < 4) raise(ErrorKind::InvalidParameter, "n must be at least 4, got " + std::to_string(n));
    if (!(alpha > 1.0 && alpha < 2.0))
        raise(ErrorKind::InvalidParameter, "alpha must lie in (1,2), got " + std::to_string(alpha));
}

Edge make_edge(uint32_t a, uint32_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// Linear index of pair (u,v), u<v, in lexicographic order over all n(n-1)/2 pairs.
uint64_t pair_count(uint32_t n) { return static_cast<uint64_t>(n) * (n - 1) / 2; }

Edge pair_from_index(uint64_t idx, uint32_t n) {
    // Row u owns indices [u*n - u(u+1)/2, ...) of width n-1-u.
    uint64_t nn = n;
    double guess = nn - 0.5 - std::sqrt((nn - 0.5) * (nn - 0.5) - 2.0 * static_cast<double>(idx));
    uint64_t u = guess <= 0.0 ? 0 : static_cast<uint64_t>(guess);
    if (u >= nn - 1) u = nn - 2;
    auto row_start = [nn](uint64_t r) { return r * nn - r * (r + 1) / 2; };
    while (u > 0 && row_start(u) > idx) --u;
    while (row_start(u + 1) <= idx) ++u;
    uint64_t v = u + 1 + (idx - row_start(u));
    return Edge{static_cast<uint32_t>(u), static_cast<uint32_t>(v)};
}

}  // namespace

uint64_t target_edge_count(uint32_t n, double alpha) {
    return ceil_snapped(std::pow(static_cast<double>(n), 2.0 - alpha));
}

LongRangeGraph::LongRangeGraph(uint32_t n, double alpha, Model model, uint64_t seed,
                               std::vector<Edge> edges)
    : n_(n), alpha_(alpha), model_(model), seed_(seed), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    for (const Edge& e : edges_) {
        if (e.u == e.v) raise(ErrorKind::InvalidParameter, "self-loop in edge set");
        if (e.v >= n_) raise(ErrorKind::InvalidParameter, "edge endpoint out of range");
    }
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        raise(ErrorKind::InvalidParameter, "duplicate edge in edge set");

    offsets_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) {
        ++offsets_[e.u + 1];
        ++offsets_[e.v + 1];
    }
    for (uint32_t v = 0; v < n_; ++v) offsets_[v + 1] += offsets_[v];
    targets_.resize(offsets_[n_]);
    std::vector<uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const Edge& e : edges_) {
        targets_[cursor[e.u]++] = e.v;
        targets_[cursor[e.v]++] = e.u;
    }
    for (uint32_t v = 0; v < n_; ++v)
        std::sort(targets_.begin() + offsets_[v], targets_.begin() + offsets_[v + 1]);
}

LongRangeGraph generate_m1(uint32_t n, double alpha, uint64_t seed) {
    check_model_params(n, alpha);
    uint64_t k = target_edge_count(n, alpha);
    if (2 * k > n)
        raise(ErrorKind::InvalidParameter,
              "M1 needs 2*ceil(n^(2-alpha)) <= n; got " + std::to_string(2 * k) + " endpoints on " +
                  std::to_string(n) + " nodes");

    double spacing = std::pow(static_cast<double>(n), alpha - 1.0) / 2.0;
    std::vector<uint32_t> endpoints;
    endpoints.reserve(2 * k);
    std::unordered_set<uint32_t> seen;
    for (uint64_t i = 0; i < 2 * k; ++i) {
        auto pos = static_cast<uint64_t>(std::floor(snapped(static_cast<double>(i) * spacing)));
        auto node = static_cast<uint32_t>(pos % n);
        if (seen.insert(node).second) endpoints.push_back(node);
    }

    bool collided = endpoints.size() != 2 * k;
    if (endpoints.size() % 2 == 1) {
        // Spacing >= 2 leaves room to drop the last endpoint; tighter layouts
        // cannot carry a well-defined matching.
        if (std::pow(static_cast<double>(n), alpha - 1.0) < 4.0 - 1e-9)
            raise(ErrorKind::DegenerateModel,
                  "M1 endpoint collisions left an odd endpoint count at n=" + std::to_string(n));
        endpoints.pop_back();
    }
    if (endpoints.empty())
        raise(ErrorKind::DegenerateModel, "M1 produced no usable endpoints");

    std::sort(endpoints.begin(), endpoints.end());
    RngStream rng(seed);
    rng.shuffle(endpoints);
    std::vector<Edge> edges;
    edges.reserve(endpoints.size() / 2);
    for (size_t i = 0; i + 1 < endpoints.size(); i += 2)
        edges.push_back(make_edge(endpoints[i], endpoints[i + 1]));

    LongRangeGraph g(n, alpha, Model::M1, seed, std::move(edges));
    if (collided) g.mark_degenerate();
    return g;
}

LongRangeGraph generate_m2(uint32_t n, double alpha, uint64_t seed) {
    check_model_params(n, alpha);
    uint64_t k = target_edge_count(n, alpha);
    uint64_t total = pair_count(n);
    if (k > total)
        raise(ErrorKind::InvalidParameter, "M2 needs ceil(n^(2-alpha)) <= n(n-1)/2");

    // Floyd's uniform k-subset of [0, total).
    RngStream rng(seed);
    std::unordered_set<uint64_t> chosen;
    chosen.reserve(2 * k);
    for (uint64_t j = total - k; j < total; ++j) {
        uint64_t t = rng.below(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }

    std::vector<Edge> edges;
    edges.reserve(chosen.size());
    for (uint64_t idx : chosen) edges.push_back(pair_from_index(idx, n));
    return LongRangeGraph(n, alpha, Model::M2, seed, std::move(edges));
}

LongRangeGraph generate_m3(uint32_t n, double alpha, uint64_t seed) {
    check_model_params(n, alpha);
    double p = 2.0 * std::pow(static_cast<double>(n), -alpha);
    uint64_t total = pair_count(n);

    // Geometric gap skipping: visits only the included pairs.
    RngStream rng(seed);
    std::vector<Edge> edges;
    double log1mp = std::log1p(-p);
    uint64_t idx = 0;
    while (idx < total) {
        double u = rng.next_double();
        double skip = std::floor(std::log1p(-u) / log1mp);
        if (skip >= static_cast<double>(total)) break;
        idx += static_cast<uint64_t>(skip);
        if (idx >= total) break;
        edges.push_back(pair_from_index(idx, n));
        ++idx;
    }
    return LongRangeGraph(n, alpha, Model::M3, seed, std::move(edges));
}

uint32_t max_long_range_degree(const LongRangeGraph& g) {
    uint32_t best = 0;
    for (uint32_t v = 0; v < g.n(); ++v) best = std::max(best, g.long_range_degree(v));
    return best;
}

uint32_t degree_cap(double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0))
        raise(ErrorKind::InvalidParameter, "alpha must lie in (1,2)");
    return static_cast<uint32_t>(ceil_snapped(2.0 / (alpha - 1.0)));
}

namespace {

std::vector<uint32_t> endpoint_nodes(const LongRangeGraph& g) {
    std::vector<uint32_t> eps;
    for (uint32_t v = 0; v < g.n(); ++v)
        if (g.long_range_degree(v) > 0) eps.push_back(v);
    return eps;
}

void sort_arcs(std::vector<Arc>& arcs) {
    std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
        if (a.length != b.length) return a.length > b.length;
        return a.start < b.start;
    });
}

// Arcs of non-endpoint nodes between consecutive endpoints.
std::vector<Arc> gap_arcs(const LongRangeGraph& g, const std::vector<uint32_t>& eps) {
    std::vector<Arc> arcs;
    uint32_t n = g.n();
    size_t m = eps.size();
    for (size_t i = 0; i < m; ++i) {
        uint32_t cur = eps[i];
        uint32_t next = eps[(i + 1) % m];
        uint32_t gap = (next + n - cur) % n;
        if (m == 1) gap = n;  // single endpoint: the rest of the cycle is one arc
        if (gap > 1) arcs.push_back(Arc{(cur + 1) % n, gap - 1});
    }
    return arcs;
}

}  // namespace

ArcScan empty_arcs(const LongRangeGraph& g, ArcMode mode) {
    std::vector<uint32_t> eps = endpoint_nodes(g);
    if (eps.empty()) return ArcScan{{Arc{0, g.n()}}, true};

    ArcScan out;
    if (mode == ArcMode::NoIncident) {
        out.arcs = gap_arcs(g, eps);
        sort_arcs(out.arcs);
        return out;
    }

    // NoOutgoing: maximal proper arcs with no chord crossing the boundary.
    // A candidate is a cyclic run of endpoints (i..i+count-1) extended to the
    // open interval (eps[i-1], eps[i+count]); gaps are the count=0 runs.
    // Every edge has two distinct endpoints, so m >= 2 here.
    uint32_t n = g.n();
    size_t m = eps.size();

    auto in_open_interval = [&](uint32_t x, uint32_t lo, uint32_t hi) {
        uint32_t width = (hi + n - lo) % n;
        if (width == 0) width = n;  // interval wraps: everything except lo
        uint32_t off = (x + n - lo) % n;
        return off > 0 && off < width;
    };
    auto run_closed = [&](size_t i, size_t count) {
        uint32_t lo = eps[(i + m - 1) % m];
        uint32_t hi = eps[(i + count) % m];
        for (size_t t = 0; t < count; ++t) {
            uint32_t v = eps[(i + t) % m];
            for (uint32_t w : g.neighbors(v))
                if (!in_open_interval(w, lo, hi)) return false;
        }
        return true;
    };
    auto run_arc = [&](size_t i, size_t count) {
        uint32_t lo = eps[(i + m - 1) % m];
        uint32_t hi = eps[(i + count) % m];
        uint32_t start = (lo + 1) % n;
        uint32_t len = (hi + n - start) % n;
        return Arc{start, len};
    };

    std::vector<Arc> closed = gap_arcs(g, eps);
    for (size_t i = 0; i < m; ++i)
        for (size_t count = 1; count < m; ++count) {
            if (!run_closed(i, count)) continue;
            Arc a = run_arc(i, count);
            if (a.length >= 1 && a.length < n) closed.push_back(a);
        }

    auto contains = [n](const Arc& big, const Arc& small) {
        return (small.start + n - big.start) % n + small.length <= big.length;
    };
    std::vector<Arc> arcs;
    for (size_t i = 0; i < closed.size(); ++i) {
        bool maximal = true;
        for (size_t j = 0; j < closed.size() && maximal; ++j)
            if (i != j && contains(closed[j], closed[i]) && !(closed[i] == closed[j] && i < j))
                maximal = false;
        if (maximal) arcs.push_back(closed[i]);
    }
    std::sort(arcs.begin(), arcs.end(),
              [](const Arc& a, const Arc& b) { return a.start < b.start || (a.start == b.start && a.length < b.length); });
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    sort_arcs(arcs);
    out.arcs = std::move(arcs);
    if (out.arcs.empty()) raise(ErrorKind::NoEmptyArc, "no closed proper arc exists");
    return out;
}

ReducedGraph reduce_m1(const LongRangeGraph& g) {
    if (g.model() != Model::M1) raise(ErrorKind::WrongModel, "reduce_m1 requires an M1 graph");
    std::vector<uint32_t> eps = endpoint_nodes(g);
    ReducedGraph r;
    r.m = static_cast<uint32_t>(eps.size());
    r.origin = eps;
    std::vector<uint32_t> idx(g.n(), UINT32_MAX);
    for (uint32_t i = 0; i < r.m; ++i) idx[eps[i]] = i;
    for (const Edge& e : g.edges()) {
        uint32_t a = idx[e.u], b = idx[e.v];
        r.matching.push_back(a < b ? Edge{a, b} : Edge{b, a});
    }
    std::sort(r.matching.begin(), r.matching.end());
    return r;
}

ReducedGraph reduce_with_splitting(const LongRangeGraph& g, uint64_t seed) {
    if (g.model() != Model::M2 && g.model() != Model::M3)
        raise(ErrorKind::WrongModel, "reduce_with_splitting requires an M2 or M3 graph");
    if (g.edges().empty()) raise(ErrorKind::EmptyEdgeSet, "graph has no long-range edges");

    RngStream rng(seed);
    uint32_t n = g.n();
    ReducedGraph r;
    // Copies laid out in cycle order: node v with degree k becomes k consecutive ids.
    std::vector<uint32_t> first_copy(n, UINT32_MAX);
    for (uint32_t v = 0; v < n; ++v) {
        uint32_t deg = g.long_range_degree(v);
        if (deg == 0) continue;
        first_copy[v] = r.m;
        r.m += deg;
        for (uint32_t c = 0; c < deg; ++c) r.origin.push_back(v);
    }

    // Distribute each node's incident edges uniformly among its copies.
    std::vector<uint32_t> next_slot(n, 0);
    std::vector<std::vector<uint32_t>> perm(n);
    for (uint32_t v = 0; v < n; ++v) {
        uint32_t deg = g.long_range_degree(v);
        if (deg == 0) continue;
        perm[v].resize(deg);
        for (uint32_t c = 0; c < deg; ++c) perm[v][c] = c;
        rng.shuffle(perm[v]);
    }
    for (const Edge& e : g.edges()) {
        uint32_t cu = first_copy[e.u] + perm[e.u][next_slot[e.u]++];
        uint32_t cv = first_copy[e.v] + perm[e.v][next_slot[e.v]++];
        r.matching.push_back(cu < cv ? Edge{cu, cv} : Edge{cv, cu});
    }
    std::sort(r.matching.begin(), r.matching.end());
    return r;
}

WoundGraph wind_up(const LongRangeGraph& g) {
    if (g.model() != Model::M1) raise(ErrorKind::WrongModel, "wind_up requires an M1 graph");
    uint32_t n = g.n();
    double sp = snapped(std::pow(static_cast<double>(n), g.alpha() - 1.0) / 2.0);
    if (sp < 1.0 || sp != std::floor(sp))
        raise(ErrorKind::NotDivisible, "spacing n^(alpha-1)/2 is not a positive integer");
    auto s = static_cast<uint32_t>(sp);
    if (n % s != 0) raise(ErrorKind::NotDivisible, "spacing does not divide n");

    std::vector<uint32_t> eps = endpoint_nodes(g);
    if (eps.size() != n / s) raise(ErrorKind::NotEquidistant, "endpoints are not all multiples of the spacing");
    for (uint32_t v : eps)
        if (v % s != 0) raise(ErrorKind::NotEquidistant, "endpoint " + std::to_string(v) + " is off-grid");

    WoundGraph w;
    w.m = s;
    w.loop_edges.assign(s, 0);
    w.loop_edges[0] = 1;  // every class-0 node carries exactly one matching edge
    w.projection.resize(n);
    w.origin.assign(s, {});
    for (uint32_t x = 0; x < n; ++x) {
        w.projection[x] = x % s;
        w.origin[x % s].push_back(x);
    }
    return w;
}

LongRangeGraph reduced_as_graph(const ReducedGraph& r, double alpha, uint64_t seed) {
    return LongRangeGraph(r.m, alpha, Model::M1, seed, r.matching);
}

}  // namespace cyclemix
