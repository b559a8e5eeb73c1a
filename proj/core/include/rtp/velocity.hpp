#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rtp/random.hpp"

namespace rtp {

enum class TumbleModel { instantaneous, finite };

/// Single-particle velocity dynamics.
///
/// Instantaneous: +1 <-> -1 at rate omega. Finite: +-1 -> 0 at rate alpha,
/// 0 -> +-1 at rate beta/2 each.
class TumbleKind {
  public:
    static TumbleKind instantaneous(double omega);
    static TumbleKind finite(double alpha, double beta);

    TumbleModel model() const noexcept { return model_; }
    bool is_instantaneous() const noexcept { return model_ == TumbleModel::instantaneous; }

    double omega() const;
    double alpha() const;
    double beta() const;
    /// alpha / beta.
    double ratio() const;
    /// 2*omega, resp. 2*max(alpha, beta).
    double eta() const noexcept;

    /// Velocities in canonical order: (+1,-1) or (+1,0,-1).
    std::span<const int> alphabet() const noexcept;
    int alphabet_size() const noexcept { return is_instantaneous() ? 2 : 3; }
    int pair_count() const noexcept { return alphabet_size() * alphabet_size(); }
    bool contains(int s) const noexcept;
    int index_of(int s) const;

    double exit_rate(int s) const;
    double rate(int from, int to) const;
    /// Largest exit rate of the pair process.
    double max_pair_exit_rate() const;

    /// Post-jump velocity; consumes randomness only for the 0 -> +-1 choice.
    int jump(int s, Stream& rng) const;

    friend bool operator==(const TumbleKind&, const TumbleKind&) = default;

  private:
    TumbleKind(TumbleModel m, double a, double b) : model_(m), a_(a), b_(b) {}
    TumbleModel model_;
    double a_;
    double b_;
};

struct VelocityPair {
    int s1 = 1;
    int s2 = 1;

    constexpr int relative_speed() const noexcept { return s2 - s1; }
    constexpr bool on_diagonal() const noexcept { return s1 == s2; }
    friend constexpr bool operator==(VelocityPair, VelocityPair) = default;
};

int pair_index(const TumbleKind& kind, VelocityPair sigma);
VelocityPair pair_at(const TumbleKind& kind, int index);
/// All pairs, ordered lexicographically over the alphabet order.
std::vector<VelocityPair> pair_alphabet(const TumbleKind& kind);
bool contains(const TumbleKind& kind, VelocityPair sigma) noexcept;

Eigen::MatrixXd single_rate_matrix(const TumbleKind& kind);
/// Kronecker sum of two single-particle generators (particle 1 is the outer index).
Eigen::MatrixXd pair_generator(const TumbleKind& kind);
/// Stationary law of one particle over the alphabet order.
Eigen::VectorXd single_stationary(const TumbleKind& kind);

/// One particle's velocity driven by its own exponential clock.
class SingleVelocitySampler {
  public:
    SingleVelocitySampler(const TumbleKind& kind, int s0, Stream rng, double t0 = 0.0);

    int state() const noexcept { return state_; }
    double next_time() const noexcept { return next_; }
    /// Performs the pending jump and schedules the next one.
    int advance();

  private:
    TumbleKind kind_;
    int state_;
    double next_;
    Stream rng_;
};

struct VelocityEvent {
    double time;
    VelocityPair sigma;
    int particle; ///< 1 or 2: the coordinate that jumped
};

/// Two independent single-particle samplers merged in time.
class PairVelocitySampler {
  public:
    PairVelocitySampler(const TumbleKind& kind, VelocityPair sigma0, Stream rng1, Stream rng2, double t0 = 0.0);

    VelocityPair state() const noexcept { return {p1_.state(), p2_.state()}; }
    double next_time() const noexcept { return std::min(p1_.next_time(), p2_.next_time()); }
    int next_particle() const noexcept { return p1_.next_time() <= p2_.next_time() ? 1 : 2; }
    VelocityEvent advance();

    const SingleVelocitySampler& particle(int i) const { return i == 1 ? p1_ : p2_; }

  private:
    SingleVelocitySampler p1_;
    SingleVelocitySampler p2_;
};

class VelocityPath {
  public:
    VelocityPath(const TumbleKind& kind, VelocityPair sigma0, Stream rng1, Stream rng2);

    VelocityPair initial() const noexcept { return initial_; }
    const std::vector<VelocityEvent>& events() const noexcept { return events_; }
    double horizon() const noexcept { return horizon_; }
    const TumbleKind& kind() const noexcept { return kind_; }

    /// Samples further events up to `horizon` from the retained clocks.
    void extend(double horizon);
    VelocityPair state_at(double t) const;

  private:
    TumbleKind kind_;
    VelocityPair initial_;
    std::vector<VelocityEvent> events_;
    double horizon_ = 0.0;
    PairVelocitySampler sampler_;
};

VelocityPath sample_velocity_path(const TumbleKind& kind, VelocityPair sigma0, double horizon, Stream rng1,
                                  Stream rng2);

/// I(t) = int_0^t (s2 - s1) ds.
double velocity_integral(const VelocityPath& path, double t);

/// E[exp(zeta * I_k(t))] for one instantaneous-tumble particle started at s0.
double mgf_velocity_integral(double omega, int s0, double zeta, double t);

/// Raw moments E[I_k(t)^n], n = 1..4, of one instantaneous-tumble particle.
std::array<double, 4> velocity_integral_moments(double omega, int s0, double t);

} // namespace rtp
