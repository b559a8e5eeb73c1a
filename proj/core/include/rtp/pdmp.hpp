#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rtp/discretized.hpp"
#include "rtp/random.hpp"
#include "rtp/velocity.hpp"

namespace rtp {

struct ContParams {
    double ell;
    TumbleKind kind;

    void validate() const;
};

struct ContState {
    double x;
    VelocityPair sigma;
    friend bool operator==(const ContState&, const ContState&) = default;
};

enum class StateClass { bulk, jammed_at_zero, jammed_at_ell };
enum class Boundary { zero, ell };

/// Jammed at 0 iff x = 0 and s2 - s1 <= 0; jammed at ell iff x = ell and s2 - s1 >= 0.
StateClass classify(const ContState& state, double ell);

struct ClampEvent {
    double time; ///< offset from the segment start
    Boundary boundary;
};

struct FlowResult {
    double x;
    std::optional<ClampEvent> clamp;
};

/// x(dt) = clamp(x0 + (s2 - s1) dt, 0, ell) with the exit time in closed form.
/// A clamp at offset 0 means the segment starts jammed.
FlowResult flow_segment(double x0, VelocityPair sigma, double dt, double ell);

/// One constant-velocity piece of a trajectory.
struct Segment {
    double t0;
    double t1;
    double x0;
    double x1;
    VelocityPair sigma;
    std::optional<ClampEvent> clamp;

    /// Time at which the segment reaches its boundary, t1 if it never does.
    double clamp_time() const noexcept { return clamp ? t0 + clamp->time : t1; }
};

/// Event-driven min-max construction.
class ContinuousSimulator {
  public:
    ContinuousSimulator(const ContParams& params, const ContState& init, Stream particle1, Stream particle2,
                        double t0 = 0.0);
    ContinuousSimulator(const ContParams& params, const ContState& init, std::uint64_t seed,
                        std::uint64_t replica = 0);

    double time() const noexcept { return time_; }
    const ContState& state() const noexcept { return state_; }
    const ContParams& params() const noexcept { return params_; }
    double next_velocity_time() const noexcept { return velocity_.next_time(); }

    /// Flows to min(next velocity event, horizon) and applies the event if reached.
    /// Empty once time() >= horizon.
    std::optional<Segment> next_segment(double horizon);

  private:
    ContParams params_;
    ContState state_;
    double time_;
    PairVelocitySampler velocity_;
};

struct Breakpoint {
    double time;
    double x;
    VelocityPair sigma;
    int slope() const noexcept { return sigma.relative_speed(); }
};

struct ClampAnnotation {
    double time;
    Boundary boundary;
};

class PiecewiseLinearPath {
  public:
    PiecewiseLinearPath(double ell, const ContState& init);

    double ell() const noexcept { return ell_; }
    double horizon() const noexcept { return horizon_; }
    const std::vector<Breakpoint>& breakpoints() const noexcept { return breaks_; }
    const std::vector<ClampAnnotation>& clamps() const noexcept { return clamps_; }

    void append(const Segment& seg);
    double position_at(double t) const;
    ContState state_at(double t) const;
    /// Segments reconstructed from the breakpoints.
    std::vector<Segment> segments() const;

    /// Columns: t_break,x,s1,s2,clamp_flag (1 marks a boundary hit).
    void write_csv(std::ostream& os) const;

  private:
    double ell_;
    double horizon_ = 0.0;
    std::vector<Breakpoint> breaks_;
    std::vector<ClampAnnotation> clamps_;
};

struct ContinuousRun {
    PiecewiseLinearPath path;
    VelocityPath velocities;
};

ContinuousRun simulate_continuous(const ContParams& params, const ContState& init, double horizon, Stream particle1,
                                  Stream particle2);
ContinuousRun simulate_continuous(const ContParams& params, const ContState& init, double horizon,
                                  std::uint64_t seed, std::uint64_t replica = 0);

/// Streaming occupation statistics from exact segment-bin overlaps. Mergeable.
class OccupationAccumulator {
  public:
    OccupationAccumulator(const ContParams& params, int bins);

    void add(const Segment& seg);
    void merge(const OccupationAccumulator& other);
    double elapsed() const noexcept { return elapsed_; }
    /// Normalized by the elapsed time; throws if no time has elapsed.
    DiscretizedMeasure measure() const;
    double jammed_fraction(Boundary b) const;

  private:
    ContParams params_;
    DiscretizedMeasure raw_;
    double elapsed_ = 0.0;
};

DiscretizedMeasure occupation_measure(const ContinuousRun& run, int bins);

/// Streams a run of the given horizon into an accumulator without retaining the path.
OccupationAccumulator stream_occupation(const ContParams& params, const ContState& init, double horizon, int bins,
                                        std::uint64_t seed, std::uint64_t replica = 0);

} // namespace rtp
