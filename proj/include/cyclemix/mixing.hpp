#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cyclemix/chain.hpp"

namespace cyclemix {

// Probability vector on the state space. Mass is never renormalized; drift is
// monitored and reported instead.
struct Distribution {
    std::vector<double> weights;

    static Distribution point_mass(uint32_t n, uint32_t at);
    static Distribution uniform(uint32_t n);
};

double tv_distance(const Distribution& mu, const Distribution& nu);

Distribution evolve(const Distribution& sigma, const TransitionMatrix& P, uint64_t steps);

// d(k) = TV(delta_start P^k, uniform) for k = 0..k_max.
std::vector<double> distance_profile(const TransitionMatrix& P, uint32_t start, uint64_t k_max);

struct MixingOptions {
    uint64_t ceiling = 10'000'000;  // step budget before giving up (not-converged)
    uint32_t check_interval = 64;   // TV checkpoint spacing; result-invariant
    uint32_t tile_width = 128;      // starts evolved per cache tile; result-invariant
    bool want_profile = true;       // keep the worst start's full d(k) sequence
    std::string backend = "auto";   // kernel backend request
};

struct MixingResult {
    uint64_t t_mix = 0;
    double epsilon = 0.0;
    uint32_t worst_start = 0;
    std::vector<double> profile;    // worst start's d(k), k = 0..t_mix (if requested)
    double d_at_tmix = 0.0;
    double d_before_tmix = 1.0;     // d(t_mix - 1); 1 when t_mix == 0
    bool monotone_ok = true;        // profile non-increasing within 1e-10
    double max_mass_drift = 0.0;    // max |sum weights - 1| seen at checkpoints
};

inline constexpr double kMonotoneTol = 1e-10;

MixingResult mixing_time(const TransitionMatrix& P, double epsilon,
                         const MixingOptions& options = {});

// 1/Phi, the shape of the conductance lower bound on the mixing time.
double bound_lower_phi(double phi);

// (1/Phi^2) * log(n), the Cheeger-type upper-bound shape (natural log).
double bound_upper_cheeger(double phi, uint32_t n);

struct GapResult {
    MixingResult nonreversible;
    MixingResult reversible;     // of the additive reversibilization
    double ratio = 0.0;          // t_rev / (t_nonrev^2 * log n)
};

GapResult rev_vs_nonrev_gap(const TransitionMatrix& P_nonrev, double epsilon,
                            const MixingOptions& options = {});

}  // namespace cyclemix
