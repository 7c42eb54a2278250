#include "cyclemix/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cyclemix/error.hpp"
#include "cyclemix/kernels.hpp"

namespace cyclemix {

Distribution Distribution::point_mass(uint32_t n, uint32_t at) {
    if (at >= n) raise(ErrorKind::InvalidParameter, "point mass position out of range");
    Distribution d;
    d.weights.assign(n, 0.0);
    d.weights[at] = 1.0;
    return d;
}

Distribution Distribution::uniform(uint32_t n) {
    if (n == 0) raise(ErrorKind::InvalidParameter, "empty state space");
    Distribution d;
    d.weights.assign(n, 1.0 / n);
    return d;
}

double tv_distance(const Distribution& mu, const Distribution& nu) {
    if (mu.weights.size() != nu.weights.size())
        raise(ErrorKind::LengthMismatch, "distributions have different lengths");
    double acc = 0.0, comp = 0.0;
    for (size_t i = 0; i < mu.weights.size(); ++i) {
        double dev = std::abs(mu.weights[i] - nu.weights[i]);
        double t = acc + dev;
        comp += std::abs(acc) >= std::abs(dev) ? (acc - t) + dev : (dev - t) + acc;
        acc = t;
    }
    return 0.5 * (acc + comp);
}

namespace {

using kernels::Backend;
using kernels::Plan;

void check_lengths(const Distribution& sigma, const TransitionMatrix& P) {
    if (sigma.weights.size() != P.n())
        raise(ErrorKind::LengthMismatch, "distribution length does not match matrix dimension");
}

}  // namespace

Distribution evolve(const Distribution& sigma, const TransitionMatrix& P, uint64_t steps) {
    check_lengths(sigma, P);
    const Backend& backend = kernels::select_backend();
    Plan plan = Plan::from_matrix(P);
    Distribution cur = sigma;
    Distribution nxt;
    nxt.weights.assign(P.n(), 0.0);
    for (uint64_t k = 0; k < steps; ++k) {
        backend.step(plan, cur.weights.data(), nxt.weights.data(), 1, 1);
        std::swap(cur.weights, nxt.weights);
    }
    return cur;
}

std::vector<double> distance_profile(const TransitionMatrix& P, uint32_t start, uint64_t k_max) {
    if (start >= P.n()) raise(ErrorKind::InvalidParameter, "start node out of range");
    const Backend& backend = kernels::select_backend();
    Plan plan = Plan::from_matrix(P);
    uint32_t n = P.n();
    double inv_n = 1.0 / n;

    std::vector<double> cur(n, 0.0), nxt(n, 0.0);
    cur[start] = 1.0;
    std::vector<double> profile;
    profile.reserve(k_max + 1);
    double tv = 0.0, mass = 0.0;
    backend.tv_mass(cur.data(), n, 1, 1, inv_n, &tv, &mass);
    profile.push_back(0.5 * tv);
    for (uint64_t k = 1; k <= k_max; ++k) {
        backend.step(plan, cur.data(), nxt.data(), 1, 1);
        std::swap(cur, nxt);
        backend.tv_mass(cur.data(), n, 1, 1, inv_n, &tv, &mass);
        profile.push_back(0.5 * tv);
    }
    return profile;
}

namespace {

// One tile of starts evolved together; rows are states, lanes are starts.
// Lane values are independent of tiling and compaction, so t_mix does not
// depend on tile_width or check_interval.
struct Tile {
    uint32_t n;
    size_t stride;        // allocation width, fixed for the tile's lifetime
    size_t width;         // live lanes, packed to the left
    kernels::AlignedVec a, b;
    double* cur;
    double* nxt;
    std::vector<uint32_t> lane_start;

    Tile(uint32_t n_, const std::vector<uint32_t>& starts)
        : n(n_), stride(starts.size()), width(starts.size()),
          a(static_cast<size_t>(n_) * starts.size(), 0.0),
          b(static_cast<size_t>(n_) * starts.size(), 0.0),
          cur(a.data()), nxt(b.data()), lane_start(starts) {
        for (size_t l = 0; l < width; ++l) cur[static_cast<size_t>(starts[l]) * stride + l] = 1.0;
    }

    void steps(const Backend& backend, const Plan& plan, uint64_t count) {
        for (uint64_t k = 0; k < count; ++k) {
            backend.step(plan, cur, nxt, width, stride);
            std::swap(cur, nxt);
        }
    }

    // Drop lanes flagged in `remove` (size = width), packing survivors left.
    void compact(const std::vector<char>& remove) {
        std::vector<uint32_t> new_starts;
        for (size_t l = 0; l < width; ++l)
            if (!remove[l]) new_starts.push_back(lane_start[l]);
        size_t kept = new_starts.size();
        if (kept == width) return;
        for (uint32_t j = 0; j < n; ++j) {
            double* row = cur + static_cast<size_t>(j) * stride;
            size_t w = 0;
            for (size_t l = 0; l < width; ++l)
                if (!remove[l]) row[w++] = row[l];
        }
        lane_start = std::move(new_starts);
        width = kept;
    }
};

// Exact first-crossing steps for the flagged lanes of `snap` (tile state at
// snap_k, before those lanes crossed). Re-runs just those columns one step at
// a time; the narrow recomputation is bit-identical to the wide one.
void refine_crossings(const Backend& backend, const Plan& plan, uint32_t n, const Tile& tile,
                      const double* snap, uint64_t snap_k, uint64_t upto,
                      const std::vector<char>& flagged, double epsilon,
                      std::vector<uint64_t>& cross_step) {
    size_t count = 0;
    for (size_t l = 0; l < tile.width; ++l) count += flagged[l] ? 1 : 0;
    if (count == 0) return;
    kernels::AlignedVec cur(static_cast<size_t>(n) * count), nxt(cur.size());
    std::vector<uint32_t> starts;
    starts.reserve(count);
    for (size_t l = 0; l < tile.width; ++l)
        if (flagged[l]) starts.push_back(tile.lane_start[l]);
    {
        size_t c = 0;
        for (size_t l = 0; l < tile.width; ++l) {
            if (!flagged[l]) continue;
            for (uint32_t j = 0; j < n; ++j)
                cur[static_cast<size_t>(j) * count + c] = snap[static_cast<size_t>(j) * tile.stride + l];
            ++c;
        }
    }
    const double inv_n = 1.0 / n;
    std::vector<double> tv(count), mass(count);
    std::vector<char> done(count, 0);
    size_t open = count;
    double* pc = cur.data();
    double* pn = nxt.data();
    for (uint64_t k = snap_k + 1; k <= upto && open > 0; ++k) {
        backend.step(plan, pc, pn, count, count);
        std::swap(pc, pn);
        backend.tv_mass(pc, n, count, count, inv_n, tv.data(), mass.data());
        for (size_t c = 0; c < count; ++c) {
            if (done[c]) continue;
            if (0.5 * tv[c] <= epsilon) {
                done[c] = 1;
                cross_step[starts[c]] = k;
                --open;
            }
        }
    }
    if (open > 0)
        raise(ErrorKind::NotConverged, "internal refinement mismatch");
}

}  // namespace

MixingResult mixing_time(const TransitionMatrix& P, double epsilon, const MixingOptions& options) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        raise(ErrorKind::InvalidParameter, "epsilon must lie in (0,1)");
    if (!is_doubly_stochastic(P))
        raise(ErrorKind::PreconditionViolated, "mixing_time requires a doubly stochastic matrix");
    const uint32_t n = P.n();
    const double inv_n = 1.0 / n;
    const Backend& backend = kernels::select_backend(options.backend);
    const uint64_t T = std::max<uint64_t>(1, options.check_interval);
    const uint32_t W = std::max<uint32_t>(1, options.tile_width);
    if (options.ceiling == 0) raise(ErrorKind::InvalidParameter, "step ceiling must be positive");

    MixingResult res;
    res.epsilon = epsilon;

    const double d0 = 1.0 - inv_n;
    if (d0 <= epsilon) {
        res.t_mix = 0;
        res.worst_start = 0;
        res.d_at_tmix = d0;
        res.d_before_tmix = 1.0;
        if (options.want_profile) res.profile = {d0};
        return res;
    }

    Plan plan = Plan::from_matrix(P);

    // Coarse sweep: evolve each tile, checking TV every T steps. Lanes that
    // crossed inside a window are refined to their exact step from a snapshot
    // of the previous checkpoint, then dropped from the tile.
    std::vector<uint64_t> cross_step(n, 0);
    std::vector<double> tv(W), mass(W);
    std::vector<char> crossed(W);
    for (uint32_t tile0 = 0; tile0 < n; tile0 += W) {
        uint32_t tw = std::min(W, n - tile0);
        std::vector<uint32_t> starts(tw);
        for (uint32_t l = 0; l < tw; ++l) starts[l] = tile0 + l;
        Tile tile(n, starts);
        kernels::AlignedVec snap(tile.a.size());
        std::copy(tile.cur, tile.cur + static_cast<size_t>(n) * tile.stride, snap.begin());
        uint64_t snap_k = 0;
        uint64_t k = 0;
        while (tile.width > 0) {
            uint64_t next_cp = std::min(k + T, options.ceiling);
            tile.steps(backend, plan, next_cp - k);
            k = next_cp;
            backend.tv_mass(tile.cur, n, tile.width, tile.stride, inv_n, tv.data(), mass.data());
            bool any = false;
            crossed.assign(tile.width, 0);
            for (size_t l = 0; l < tile.width; ++l) {
                res.max_mass_drift = std::max(res.max_mass_drift, std::abs(mass[l] - 1.0));
                if (0.5 * tv[l] <= epsilon) {
                    crossed[l] = 1;
                    any = true;
                }
            }
            if (any) {
                refine_crossings(backend, plan, n, tile, snap.data(), snap_k, k, crossed,
                                 epsilon, cross_step);
                tile.compact(crossed);
            }
            if (tile.width > 0 && k >= options.ceiling)
                raise(ErrorKind::NotConverged,
                      "no mixing within the step ceiling; chain may be periodic or nearly reducible");
            if (tile.width > 0) {
                std::copy(tile.cur, tile.cur + static_cast<size_t>(n) * tile.stride, snap.begin());
                snap_k = k;
            }
        }
    }

    uint64_t t_mix = 0;
    uint32_t worst = 0;
    for (uint32_t s = 0; s < n; ++s) {
        if (cross_step[s] > t_mix) {
            t_mix = cross_step[s];
            worst = s;
        }
    }

    // Phase 3: worst start's full profile, monotonicity and bracketing checks.
    {
        std::vector<double> cur(n, 0.0), nxt(n, 0.0);
        cur[worst] = 1.0;
        double tv1 = 0.0, mass1 = 0.0;
        backend.tv_mass(cur.data(), n, 1, 1, inv_n, &tv1, &mass1);
        double d_prev = 0.5 * tv1;
        if (options.want_profile) {
            res.profile.clear();
            res.profile.reserve(t_mix + 1);
            res.profile.push_back(d_prev);
        }
        double d_before = 1.0, d_at = d_prev;
        for (uint64_t k = 1; k <= t_mix; ++k) {
            backend.step(plan, cur.data(), nxt.data(), 1, 1);
            std::swap(cur, nxt);
            backend.tv_mass(cur.data(), n, 1, 1, inv_n, &tv1, &mass1);
            double d = 0.5 * tv1;
            res.max_mass_drift = std::max(res.max_mass_drift, std::abs(mass1 - 1.0));
            if (d > d_prev + kMonotoneTol) res.monotone_ok = false;
            if (options.want_profile) res.profile.push_back(d);
            if (k == t_mix - 1) d_before = d;
            if (k == t_mix) d_at = d;
            d_prev = d;
        }
        if (t_mix == 1) d_before = d0;
        res.d_at_tmix = d_at;
        res.d_before_tmix = d_before;
    }

    res.t_mix = t_mix;
    res.worst_start = worst;
    return res;
}

double bound_lower_phi(double phi) {
    if (!(phi > 0.0)) raise(ErrorKind::NonpositivePhi, "conductance must be positive");
    return 1.0 / phi;
}

double bound_upper_cheeger(double phi, uint32_t n) {
    if (!(phi > 0.0)) raise(ErrorKind::NonpositivePhi, "conductance must be positive");
    if (n < 2) raise(ErrorKind::InvalidParameter, "bound needs n >= 2");
    return std::log(static_cast<double>(n)) / (phi * phi);
}

GapResult rev_vs_nonrev_gap(const TransitionMatrix& P_nonrev, double epsilon,
                            const MixingOptions& options) {
    GapResult out;
    TransitionMatrix P_rev = reversibilize(P_nonrev);
    out.nonreversible = mixing_time(P_nonrev, epsilon, options);
    out.reversible = mixing_time(P_rev, epsilon, options);
    double logn = std::log(static_cast<double>(P_nonrev.n()));
    double denom = static_cast<double>(out.nonreversible.t_mix) *
                   static_cast<double>(out.nonreversible.t_mix) * logn;
    out.ratio = denom > 0.0 ? static_cast<double>(out.reversible.t_mix) / denom
                            : std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace cyclemix
