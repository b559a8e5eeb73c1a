#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtp/pdmp.hpp"
#include "rtp/velocity.hpp"

namespace rtp {

struct MixingOptions {
    double epsilon = 0.25;
    int replicas = 10000;
    /// Replicas per initial pair in the screening pass over the whole grid.
    int pilot_replicas = 64;
    /// Number of worst pairs re-run at the full replica count.
    int worst_pairs = 3;
    std::vector<double> x_fractions{0.0, 0.25, 0.5, 0.75, 1.0};
    /// Coupling runs are abandoned (counted as not coupled) after this many multiples of the scale (1/rate)(1+(rate ell)^2).
    double cap_factor = 200.0;
    /// Samples per initial state for the direct TV estimator; 0 disables it.
    int tv_samples = 2000;
    std::vector<int> tv_bins{10, 25, 50};
    std::vector<double> tv_time_factors{0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    int workers = 1;
};

struct InitPair {
    ContState a;
    ContState b;
};

struct TvPoint {
    double time;
    std::vector<double> tv; ///< one per MixingOptions::tv_bins entry, max over the inits
};

struct MixingEstimate {
    TumbleKind kind;
    double ell;
    double epsilon;
    int replicas;
    std::uint64_t seed;
    std::vector<InitPair> worst;
    /// (1-epsilon)-quantile of the coupling time for each worst pair.
    std::vector<double> pair_quantiles;
    double q50;
    double q90;
    double q_eps;
    /// Binomial 95% interval of q_eps.
    double q_eps_lo;
    double q_eps_hi;
    double t_mix_coupling;
    std::vector<int> tv_bins;
    std::vector<TvPoint> tv_curve;
    /// First grid time with TV <= epsilon at the middle bin count; NaN if none.
    double t_mix_tv;
    std::size_t censored;

    std::string to_json() const;
};

/// Regime scale (1/omega)(1+omega^2 ell^2), resp. (1/alpha+1/beta)(1+alpha^2 ell^2).
double mixing_scale(const TumbleKind& kind, double ell);

std::vector<ContState> mixing_init_grid(const TumbleKind& kind, double ell, const std::vector<double>& x_fractions);

MixingEstimate estimate_mixing_time(const TumbleKind& kind, double ell, const MixingOptions& options,
                                    std::uint64_t seed);

} // namespace rtp
