#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cyclemix/chain.hpp"
#include "cyclemix/conductance.hpp"
#include "cyclemix/graph.hpp"
#include "cyclemix/mixing.hpp"

namespace cyclemix {

// One seeded scaling experiment: per size and trial, generate a graph and run
// every r-variant on that same graph (paired design).
struct SweepConfig {
    Model model = Model::M2;
    double alpha = 1.5;
    std::vector<uint32_t> sizes;
    uint32_t trials_per_size = 1;
    ChainParams params;                 // q_c/q_l template; d used when auto_d is false
    bool auto_d = true;                 // d = degree_cap(alpha)
    std::vector<double> r_values{0.0};
    double epsilon = 0.125;
    uint64_t base_seed = 0;
    double trim_fraction = 0.05;
    uint32_t workers = 0;               // 0 = hardware concurrency
    uint32_t max_resamples = 32;
    bool measure_mixing = true;         // false: conductance estimates only
    MixingOptions mixing;               // profile storage is forced off in sweeps
    bool emit_timings = false;          // measured wall times break byte-reproducibility

    // Exact conductance for n <= exact_limit, connected enumeration up to
    // connected_limit, arc upper bound beyond; kind is always recorded.
    uint32_t exact_limit = 20;
    uint32_t connected_limit = 40;
};

struct SweepRecord {
    Model model = Model::M2;
    uint32_t n = 0;
    double alpha = 0.0;
    double r = 0.0;
    uint64_t seed = 0;
    uint64_t t_mix = 0;            // 0 when mixing was not measured
    PhiKind phi_kind = PhiKind::Exact;
    double phi_value = 0.0;
    uint32_t max_degree = 0;
    double wall_time_ms = 0.0;     // 0 unless emit_timings
    uint32_t trial = 0;
    bool skipped = false;          // trial abandoned after max_resamples
    bool mixing_checks_ok = true;  // profile monotone and bracketing held
    double mass_drift = 0.0;
    uint32_t resamples = 0;
};

std::vector<SweepRecord> run_sweep(const SweepConfig& config);

// Sorted copy with floor(trim * m) samples dropped from each tail.
std::vector<double> trim_percentiles(std::vector<double> samples, double trim_fraction);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

// Least squares on (log n, log value); values must be positive.
FitResult fit_exponent(const std::vector<std::pair<double, double>>& points);

struct SummaryRow {
    uint32_t n = 0;
    double r = 0.0;
    uint32_t count = 0;  // records entering the trimmed stats
    double t_mix_median = 0.0;
    double t_mix_mean = 0.0;
    double phi_median = 0.0;
    double phi_mean = 0.0;
};

struct Summary {
    std::vector<SummaryRow> rows;  // sorted by (n, r)
    std::vector<std::pair<double, FitResult>> t_mix_fits;  // per r, when >= 3 sizes
    std::vector<std::pair<double, FitResult>> phi_fits;
};

Summary summarize(const std::vector<SweepRecord>& records, double trim_fraction);

}  // namespace cyclemix
