#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "rtp/lattice.hpp"
#include "rtp/pdmp.hpp"
#include "rtp/random.hpp"
#include "rtp/velocity.hpp"

namespace rtp {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

/// Successive event times of a counting process.
class EventClock {
  public:
    virtual ~EventClock() = default;
    /// Next event time; +inf when exhausted.
    virtual double next() = 0;
};

class PoissonClock final : public EventClock {
  public:
    PoissonClock(double rate, Stream rng) : rate_(rate), rng_(std::move(rng)) {}
    double next() override
    {
        if (!(rate_ > 0.0))
            return kNever;
        t_ += rng_.exponential(rate_);
        return t_;
    }

  private:
    double rate_;
    Stream rng_;
    double t_ = 0.0;
};

class ScriptedClock final : public EventClock {
  public:
    explicit ScriptedClock(std::vector<double> times) : times_(std::move(times)) {}
    double next() override { return i_ < times_.size() ? times_[i_++] : kNever; }

  private:
    std::vector<double> times_;
    std::size_t i_ = 0;
};

struct CouplingTimes {
    double tau1 = kNever;
    double tau2 = kNever;
    double tau_sigma = kNever;
    double tau_coupling = kNever;
};

/// Lattice site coupled to x0: floor((L-1) x0 / ell) + 1.
int coupled_initial_site(double x0, int L, double ell);

struct DiscreteContinuousPair {
    LatticeParams lattice;
    PiecewiseLinearPath continuous;
    DiscreteTrajectory discrete;
    double horizon;
};

/// Shared velocity path and rings. The lattice member moves by the clamp rule off the
/// diagonal and by fold_p_L of the free walk while sigma = +-(1,1).
DiscreteContinuousPair couple_discrete_continuous(int L, const ContParams& params, double x0, VelocityPair sigma0,
                                                  double horizon, std::uint64_t seed, std::uint64_t replica = 0);
DiscreteContinuousPair couple_discrete_continuous(int L, const ContParams& params, double x0, VelocityPair sigma0,
                                                  double horizon, PairVelocitySampler velocity, EventClock& ring1,
                                                  EventClock& ring2);

/// sup_{t<=T} |i_L(y(t)) - x(t)| of a recorded pair.
double sup_deviation(const DiscreteContinuousPair& pair, double T);

/// Same quantity computed while simulating, without recording the paths.
double coupled_sup_deviation(int L, const ContParams& params, double x0, VelocityPair sigma0, double T,
                             std::uint64_t seed, std::uint64_t replica = 0);

struct DeviationBound {
    double value;
    double eta;
};

/// (1/eps)(ell/(L-1) + 8 sqrt(T((eta T)^2 + 3 eta T + 1) ell/(L-1))).
double deviation_bound(double epsilon, double T, int L, double ell, double eta);
DeviationBound deviation_bound(double epsilon, double T, int L, double ell, const TumbleKind& kind);

struct JointLatticeChange {
    double time;
    LatticeState a;
    LatticeState b;
    /// Signed ring displacement accumulated since the velocities matched.
    std::int64_t s_matched;
};

struct DiscreteDiscretePair {
    LatticeParams params;
    LatticeState init_a;
    LatticeState init_b;
    std::vector<JointLatticeChange> changes;
    CouplingTimes times;
    double horizon;

    /// (state a, state b, S) at time t.
    JointLatticeChange at(double t) const;
};

/// Shared rings; member B's velocity coordinate i runs on its own clock until it equals A's, then copies it.
DiscreteDiscretePair couple_discrete_discrete(const LatticeParams& params, const LatticeState& a,
                                              const LatticeState& b, double horizon, std::uint64_t seed,
                                              std::uint64_t replica = 0);

struct ContinuousContinuousPair {
    ContParams params;
    PiecewiseLinearPath a;
    PiecewiseLinearPath b;
    CouplingTimes times;
    double horizon;
};

ContinuousContinuousPair couple_continuous_continuous(const ContParams& params, const ContState& a,
                                                      const ContState& b, double horizon, std::uint64_t seed,
                                                      std::uint64_t replica = 0);

/// Coupling times only; runs until coupled or `cap`.
CouplingTimes continuous_coupling_times(const ContParams& params, const ContState& a, const ContState& b, double cap,
                                        std::uint64_t seed, std::uint64_t replica = 0);

struct ConvergenceRow {
    int L;
    int replicas;
    double median_deviation;
    double q90_deviation;
    double p_exceed; ///< fraction of replicas with sup deviation >= epsilon
    double bound;
    double w1; ///< NaN when not computed
};

struct ConvergenceConfig {
    TumbleKind kind;
    double ell;
    double T;
    double epsilon;
    int replicas;
    std::uint64_t seed;
    bool with_w1;
    int w1_bins = 1000;
    int workers = 1;
};

/// Replicas start from independent draws of the invariant measure.
ConvergenceRow convergence_row(const ConvergenceConfig& cfg, int L);

} // namespace rtp
