#include "cyclemix/lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "cyclemix/error.hpp"
#include "cyclemix/rng.hpp"

namespace cyclemix {

namespace {

void validate(const SweepConfig& c) {
    if (c.sizes.empty()) raise(ErrorKind::ConfigError, "sweep needs at least one size");
    for (size_t i = 1; i < c.sizes.size(); ++i)
        if (c.sizes[i] <= c.sizes[i - 1])
            raise(ErrorKind::ConfigError, "sizes must be strictly increasing");
    if (c.trials_per_size < 1) raise(ErrorKind::ConfigError, "trials_per_size must be >= 1");
    if (!(c.trim_fraction >= 0.0 && c.trim_fraction < 0.5))
        raise(ErrorKind::ConfigError, "trim_fraction must lie in [0, 0.5)");
    if (!(c.epsilon > 0.0 && c.epsilon < 1.0))
        raise(ErrorKind::ConfigError, "epsilon must lie in (0,1)");
    if (c.r_values.empty()) raise(ErrorKind::ConfigError, "at least one r value required");
    for (double r : c.r_values)
        if (r < 0.0 || r > c.params.q_c)
            raise(ErrorKind::ConfigError, "every r must satisfy 0 <= r <= q_c");
}

LongRangeGraph generate(Model model, uint32_t n, double alpha, uint64_t seed) {
    switch (model) {
        case Model::M1: return generate_m1(n, alpha, seed);
        case Model::M2: return generate_m2(n, alpha, seed);
        case Model::M3: return generate_m3(n, alpha, seed);
    }
    raise(ErrorKind::InvalidParameter, "bad model");
}

uint64_t trial_seed(const SweepConfig& c, uint32_t n, uint32_t trial, uint32_t attempt) {
    uint64_t s = RngStream::derive_seed(c.base_seed, static_cast<uint64_t>(c.model));
    s = RngStream::derive_seed(s, n);
    s = RngStream::derive_seed(s, trial);
    return RngStream::derive_seed(s, attempt);
}

// Conductance estimate using the strongest method the size allows. Chordless
// graphs have arcs as their connected minimizers, so the widest arc is exact.
ConductanceEstimate phi_estimate(const SweepConfig& c, const TransitionMatrix& P,
                                 const LongRangeGraph& g) {
    uint32_t n = g.n();
    if (n <= c.exact_limit) return conductance_exact(P, c.exact_limit);
    if (n <= c.connected_limit) return conductance_connected(P, c.connected_limit);
    if (g.edges().empty()) {
        std::vector<uint32_t> arc(n / 2);
        for (uint32_t i = 0; i < n / 2; ++i) arc[i] = i;
        CutResult cut = phi_of_set(P, arc);
        ConductanceEstimate est{cut.phi, PhiKind::ConnectedExact, std::move(cut)};
        return est;
    }
    return conductance_arc_upper(P, g);
}

std::vector<SweepRecord> run_trial(const SweepConfig& c, uint32_t n, uint32_t trial) {
    ChainParams base = c.params;
    if (c.auto_d) base.d = degree_cap(c.alpha);

    std::optional<LongRangeGraph> graph;
    uint32_t attempt = 0;
    uint64_t seed = 0;
    for (; attempt <= c.max_resamples; ++attempt) {
        seed = trial_seed(c, n, trial, attempt);
        LongRangeGraph g = generate(c.model, n, c.alpha, seed);
        if (max_long_range_degree(g) <= base.d) {
            graph = std::move(g);
            break;
        }
    }

    std::vector<SweepRecord> out;
    if (!graph) {
        for (double r : c.r_values) {
            SweepRecord rec;
            rec.model = c.model;
            rec.n = n;
            rec.alpha = c.alpha;
            rec.r = r;
            rec.seed = seed;
            rec.trial = trial;
            rec.skipped = true;
            rec.phi_value = std::numeric_limits<double>::quiet_NaN();
            rec.resamples = attempt;
            out.push_back(rec);
        }
        return out;
    }

    uint32_t max_deg = max_long_range_degree(*graph);
    for (double r : c.r_values) {
        auto t0 = std::chrono::steady_clock::now();
        ChainParams params = base;
        params.r = r;
        SweepRecord rec;
        rec.model = c.model;
        rec.n = n;
        rec.alpha = c.alpha;
        rec.r = r;
        rec.seed = graph->seed();
        rec.trial = trial;
        rec.max_degree = max_deg;
        rec.resamples = attempt;

        TransitionMatrix P = build_homogeneous(*graph, params);
        ConductanceEstimate phi = phi_estimate(c, P, *graph);
        rec.phi_kind = phi.kind;
        rec.phi_value = phi.value;

        if (c.measure_mixing) {
            MixingOptions opts = c.mixing;
            opts.want_profile = false;
            MixingResult m = mixing_time(P, c.epsilon, opts);
            rec.t_mix = m.t_mix;
            rec.mass_drift = m.max_mass_drift;
            bool bracket = m.d_at_tmix <= c.epsilon &&
                           (m.t_mix == 0 || m.d_before_tmix > c.epsilon);
            rec.mixing_checks_ok = m.monotone_ok && bracket;
        }
        if (c.emit_timings) {
            auto t1 = std::chrono::steady_clock::now();
            rec.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
        out.push_back(rec);
    }
    return out;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
    validate(config);
    SweepConfig c = config;
    std::sort(c.r_values.begin(), c.r_values.end());
    c.r_values.erase(std::unique(c.r_values.begin(), c.r_values.end()), c.r_values.end());

    struct Job {
        uint32_t n;
        uint32_t trial;
    };
    std::vector<Job> jobs;
    for (uint32_t n : c.sizes)
        for (uint32_t t = 0; t < c.trials_per_size; ++t) jobs.push_back({n, t});

    std::vector<std::vector<SweepRecord>> slots(jobs.size());
    uint32_t nworkers = c.workers ? c.workers : std::max(1u, std::thread::hardware_concurrency());
    nworkers = std::min<uint32_t>(nworkers, static_cast<uint32_t>(jobs.size()));

    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            size_t idx = next.fetch_add(1);
            if (idx >= jobs.size()) return;
            try {
                slots[idx] = run_trial(c, jobs[idx].n, jobs[idx].trial);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    if (nworkers <= 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        for (uint32_t i = 0; i < nworkers; ++i) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<SweepRecord> records;
    for (auto& slot : slots)
        for (auto& rec : slot) records.push_back(rec);
    return records;  // jobs ordered by (n, trial), variants by r: already sorted
}

std::vector<double> trim_percentiles(std::vector<double> samples, double trim_fraction) {
    if (samples.empty()) raise(ErrorKind::EmptyInput, "no samples to trim");
    if (!(trim_fraction >= 0.0 && trim_fraction < 0.5))
        raise(ErrorKind::InvalidParameter, "trim fraction must lie in [0, 0.5)");
    std::sort(samples.begin(), samples.end());
    size_t drop = static_cast<size_t>(std::floor(trim_fraction * static_cast<double>(samples.size())));
    return std::vector<double>(samples.begin() + drop, samples.end() - drop);
}

FitResult fit_exponent(const std::vector<std::pair<double, double>>& points) {
    std::vector<double> xs, ys;
    for (auto [n, v] : points) {
        if (!(n > 0.0) || !(v > 0.0))
            raise(ErrorKind::DegeneratePoints, "fit needs positive sizes and values");
        xs.push_back(std::log(n));
        ys.push_back(std::log(v));
    }
    std::vector<double> distinct = xs;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3)
        raise(ErrorKind::DegeneratePoints, "fit needs at least 3 distinct sizes");

    double mx = 0.0, my = 0.0;
    size_t m = xs.size();
    for (size_t i = 0; i < m; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (size_t i = 0; i < m; ++i) {
        double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += e * e;
    }
    fit.rms = std::sqrt(ss / static_cast<double>(m));
    return fit;
}

namespace {

double median_of_sorted(const std::vector<double>& v) {
    size_t m = v.size();
    if (m == 0) return 0.0;
    if (m % 2 == 1) return v[m / 2];
    return 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

Summary summarize(const std::vector<SweepRecord>& records, double trim_fraction) {
    // Group by (n, r) preserving numeric order.
    std::vector<std::pair<uint32_t, double>> keys;
    for (const auto& rec : records)
        if (!rec.skipped) keys.emplace_back(rec.n, rec.r);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    Summary out;
    for (auto [n, r] : keys) {
        std::vector<double> ts, phis;
        for (const auto& rec : records)
            if (!rec.skipped && rec.n == n && rec.r == r) {
                ts.push_back(static_cast<double>(rec.t_mix));
                phis.push_back(rec.phi_value);
            }
        SummaryRow row;
        row.n = n;
        row.r = r;
        std::vector<double> tt = trim_percentiles(ts, trim_fraction);
        std::vector<double> pp = trim_percentiles(phis, trim_fraction);
        row.count = static_cast<uint32_t>(tt.size());
        row.t_mix_median = median_of_sorted(tt);
        row.t_mix_mean = mean(tt);
        row.phi_median = median_of_sorted(pp);
        row.phi_mean = mean(pp);
        out.rows.push_back(row);
    }

    std::vector<double> rs;
    for (const auto& row : out.rows) rs.push_back(row.r);
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    for (double r : rs) {
        std::vector<std::pair<double, double>> t_pts, phi_pts;
        for (const auto& row : out.rows)
            if (row.r == r) {
                if (row.t_mix_median > 0.0) t_pts.emplace_back(row.n, row.t_mix_median);
                if (row.phi_median > 0.0) phi_pts.emplace_back(row.n, row.phi_median);
            }
        if (t_pts.size() >= 3) out.t_mix_fits.emplace_back(r, fit_exponent(t_pts));
        if (phi_pts.size() >= 3) out.phi_fits.emplace_back(r, fit_exponent(phi_pts));
    }
    return out;
}

}  // namespace cyclemix
