#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/SparseCore>

#include "rtp/random.hpp"
#include "rtp/velocity.hpp"

namespace rtp {

struct LatticeParams {
    int L;
    double ell;
    double gamma;
    TumbleKind kind;
    bool scaled;

    /// gamma = (L-1)/ell.
    static LatticeParams scaled_chain(int L, double ell, const TumbleKind& kind);
    static LatticeParams with_rate(int L, double gamma, const TumbleKind& kind, double ell = 1.0);

    int state_count() const noexcept { return L * kind.pair_count(); }
    void validate() const;
};

struct LatticeState {
    int y;
    VelocityPair sigma;
    friend bool operator==(const LatticeState&, const LatticeState&) = default;
};

enum class Clock { first = 1, second = 2 };

constexpr int clamp_site(int y, int L) noexcept { return y < 1 ? 1 : (y > L ? L : y); }

/// Position update when clock 1 (y - s1) or clock 2 (y + s2) rings.
LatticeState step_discrete(const LatticeState& state, Clock which, int L);

/// State index y-major: (y-1) * |Sigma| + pair_index.
int state_index(const LatticeParams& params, const LatticeState& state);
LatticeState state_at_index(const LatticeParams& params, int index);

enum class LatticeEventType { none, velocity, ring1, ring2 };

/// Event-by-event DITP/DFTP simulator. Jammed rings are drawn and discarded.
class DiscreteSimulator {
  public:
    DiscreteSimulator(const LatticeParams& params, const LatticeState& init, std::uint64_t seed,
                      std::uint64_t replica = 0);
    DiscreteSimulator(const LatticeParams& params, const LatticeState& init, Stream particle1, Stream particle2,
                      Stream ring1, Stream ring2);

    double time() const noexcept { return time_; }
    const LatticeState& state() const noexcept { return state_; }
    double next_event_time() const noexcept;

    /// Fires the next event if it is <= horizon; otherwise moves time to horizon and returns none.
    LatticeEventType step(double horizon);

  private:
    LatticeParams params_;
    LatticeState state_;
    double time_ = 0.0;
    PairVelocitySampler velocity_;
    Stream ring1_;
    Stream ring2_;
    double next_ring1_;
    double next_ring2_;
};

struct LatticeChange {
    double time;
    LatticeState state;
};

struct DiscreteTrajectory {
    LatticeState initial;
    std::vector<LatticeChange> changes;
    double horizon;
    std::uint64_t event_count;

    LatticeState state_at(double t) const;
};

/// Changes-only trajectory.
DiscreteTrajectory simulate_discrete(const LatticeParams& params, const LatticeState& init, double horizon,
                                     std::uint64_t seed, std::uint64_t replica = 0);

struct DiscreteOccupation {
    std::vector<double> fraction; ///< indexed by state_index
    std::uint64_t event_count;
};

/// Time fractions from exact holding times.
DiscreteOccupation discrete_occupation(const LatticeParams& params, const LatticeState& init, double horizon,
                                       std::uint64_t seed, std::uint64_t replica = 0);
DiscreteOccupation discrete_occupation_events(const LatticeParams& params, const LatticeState& init,
                                              std::uint64_t events, std::uint64_t seed, std::uint64_t replica = 0);

using SparseGenerator = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Generator over state_index with self-loops collapsed onto the diagonal (i.e. dropped).
SparseGenerator discrete_generator(const LatticeParams& params);

class StationaryVector {
  public:
    StationaryVector(const LatticeParams& params, std::vector<double> prob, double residual);

    const LatticeParams& params() const noexcept { return params_; }
    const std::vector<double>& values() const noexcept { return prob_; }
    double operator()(int y, VelocityPair sigma) const;
    double residual() const noexcept { return residual_; }

  private:
    LatticeParams params_;
    std::vector<double> prob_;
    double residual_;
};

/// Solves pi G = 0, sum pi = 1.
StationaryVector stationary_distribution(const LatticeParams& params);

/// Sup-norm of pi G.
double stationary_residual(const SparseGenerator& g, const std::vector<double>& pi);

/// ell (k-1)/(L-1).
double embed_position(int k, int L, double ell);

/// Reflection of Z onto {1..L}: period 2L, k -> k on 1..L, k -> 2L+1-k on L+1..2L.
int fold_p_L(std::int64_t z, int L);

/// Columns y,s1,s2,prob preceded by a "# residual=" comment line.
void write_stationary_csv(std::ostream& os, const StationaryVector& pi);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

} // namespace rtp
