#include "rtp/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rtp/measures.hpp"
#include "rtp/parallel.hpp"
#include "rtp/stats.hpp"

namespace rtp {

namespace {

bool folds(VelocityPair s) { return s.s1 == s.s2 && s.s1 != 0; }

struct NullDcObserver {
    void point(double, double, int) {}
    void velocity_segment(const Segment&) {}
    void lattice(double, int, VelocityPair) {}
};

struct SupObserver {
    double ell;
    int L;
    double sup = 0.0;
    void point(double, double x, int y)
    {
        const double d = std::abs(ell * (y - 1) / (L - 1) - x);
        if (d > sup)
            sup = d;
    }
    void velocity_segment(const Segment&) {}
    void lattice(double, int, VelocityPair) {}
};

struct RecordingObserver {
    PiecewiseLinearPath* path;
    DiscreteTrajectory* traj;
    void point(double, double, int) {}
    void velocity_segment(const Segment& s) { path->append(s); }
    void lattice(double t, int y, VelocityPair s) { traj->changes.push_back({t, {y, s}}); }
};

template <class Observer>
void run_discrete_continuous(int L, const ContParams& params, double x0, VelocityPair sigma0, double horizon,
                             PairVelocitySampler& vel, EventClock& ring1, EventClock& ring2, Observer& obs)
{
    const double ell = params.ell;
    int y = coupled_initial_site(x0, L, ell);
    std::int64_t z = y;
    VelocityPair sigma = sigma0;
    double ts = 0.0;
    double xs = x0;
    double n1 = ring1.next();
    double n2 = ring2.next();
    obs.point(0.0, x0, y);
    for (;;) {
        const double tv = vel.next_time();
        const double te = std::min({tv, n1, n2});
        if (te > horizon) {
            const FlowResult f = flow_segment(xs, sigma, horizon - ts, ell);
            obs.velocity_segment({ts, horizon, xs, f.x, sigma, f.clamp});
            obs.point(horizon, f.x, y);
            return;
        }
        const FlowResult f = flow_segment(xs, sigma, te - ts, ell);
        obs.point(te, f.x, y);
        if (te == tv) {
            obs.velocity_segment({ts, te, xs, f.x, sigma, f.clamp});
            vel.advance();
            const VelocityPair next = vel.state();
            ts = te;
            xs = f.x;
            z = y;
            if (!(next == sigma))
                obs.lattice(te, y, next);
            sigma = next;
            continue;
        }
        int step;
        if (te == n1) {
            step = -sigma.s1;
            n1 = ring1.next();
        } else {
            step = sigma.s2;
            n2 = ring2.next();
        }
        if (step == 0)
            continue;
        int ny;
        if (folds(sigma)) {
            z += step;
            ny = fold_p_L(z, L);
        } else {
            ny = clamp_site(y + step, L);
        }
        if (ny != y) {
            y = ny;
            obs.lattice(te, y, sigma);
            obs.point(te, f.x, y);
        }
    }
}

} // namespace

int coupled_initial_site(double x0, int L, double ell)
{
    if (x0 < 0.0 || x0 > ell)
        throw std::out_of_range("x0 outside [0, ell]");
    const int y = static_cast<int>(std::floor((L - 1) * x0 / ell)) + 1;
    return std::clamp(y, 1, L);
}

DiscreteContinuousPair couple_discrete_continuous(int L, const ContParams& params, double x0, VelocityPair sigma0,
                                                  double horizon, PairVelocitySampler velocity, EventClock& ring1,
                                                  EventClock& ring2)
{
    if (!(horizon > 0.0))
        throw std::invalid_argument("horizon must be > 0");
    const LatticeParams lp = LatticeParams::scaled_chain(L, params.ell, params.kind);
    const LatticeState init{coupled_initial_site(x0, L, params.ell), sigma0};
    DiscreteContinuousPair pair{lp, PiecewiseLinearPath(params.ell, {x0, sigma0}), {init, {}, horizon, 0}, horizon};
    RecordingObserver obs{&pair.continuous, &pair.discrete};
    run_discrete_continuous(L, params, x0, sigma0, horizon, velocity, ring1, ring2, obs);
    return pair;
}

DiscreteContinuousPair couple_discrete_continuous(int L, const ContParams& params, double x0, VelocityPair sigma0,
                                                  double horizon, std::uint64_t seed, std::uint64_t replica)
{
    const double gamma = (L - 1) / params.ell;
    PoissonClock r1(gamma, Stream(seed, replica, StreamRole::ring1));
    PoissonClock r2(gamma, Stream(seed, replica, StreamRole::ring2));
    PairVelocitySampler vel(params.kind, sigma0, Stream(seed, replica, StreamRole::particle1),
                            Stream(seed, replica, StreamRole::particle2));
    return couple_discrete_continuous(L, params, x0, sigma0, horizon, std::move(vel), r1, r2);
}

double sup_deviation(const DiscreteContinuousPair& pair, double T)
{
    if (!(T >= 0.0) || T > pair.horizon)
        throw std::out_of_range("T outside the coupled horizon");
    const int L = pair.lattice.L;
    const double ell = pair.lattice.ell;
    std::vector<double> times{0.0, T};
    for (const auto& c : pair.discrete.changes)
        if (c.time <= T)
            times.push_back(c.time);
    for (const auto& b : pair.continuous.breakpoints())
        if (b.time <= T)
            times.push_back(b.time);
    double sup = 0.0;
    auto dev = [&](double t, int y) { return std::abs(embed_position(y, L, ell) - pair.continuous.position_at(t)); };
    const auto& ch = pair.discrete.changes;
    for (double t : times) {
        // y just before and at t.
        auto it = std::lower_bound(ch.begin(), ch.end(), t, [](const LatticeChange& c, double v) { return c.time < v; });
        const int before = it == ch.begin() ? pair.discrete.initial.y : std::prev(it)->state.y;
        sup = std::max({sup, dev(t, before), dev(t, pair.discrete.state_at(t).y)});
    }
    return sup;
}

double coupled_sup_deviation(int L, const ContParams& params, double x0, VelocityPair sigma0, double T,
                             std::uint64_t seed, std::uint64_t replica)
{
    if (!(T > 0.0))
        throw std::invalid_argument("T must be > 0");
    const double gamma = (L - 1) / params.ell;
    PoissonClock r1(gamma, Stream(seed, replica, StreamRole::ring1));
    PoissonClock r2(gamma, Stream(seed, replica, StreamRole::ring2));
    PairVelocitySampler vel(params.kind, sigma0, Stream(seed, replica, StreamRole::particle1),
                            Stream(seed, replica, StreamRole::particle2));
    SupObserver obs{params.ell, L};
    run_discrete_continuous(L, params, x0, sigma0, T, vel, r1, r2, obs);
    return obs.sup;
}

double deviation_bound(double epsilon, double T, int L, double ell, double eta)
{
    if (!(epsilon > 0.0) || !(T > 0.0) || L < 2 || !(ell > 0.0) || !(eta > 0.0))
        throw std::invalid_argument("deviation_bound: invalid arguments");
    const double h = ell / (L - 1);
    const double et = eta * T;
    return (h + 8.0 * std::sqrt(T * (et * et + 3.0 * et + 1.0) * h)) / epsilon;
}

DeviationBound deviation_bound(double epsilon, double T, int L, double ell, const TumbleKind& kind)
{
    return {deviation_bound(epsilon, T, L, ell, kind.eta()), kind.eta()};
}

JointLatticeChange DiscreteDiscretePair::at(double t) const
{
    if (t < 0.0 || t > horizon)
        throw std::out_of_range("time outside the coupled horizon");
    auto it = std::upper_bound(changes.begin(), changes.end(), t,
                               [](double v, const JointLatticeChange& c) { return v < c.time; });
    if (it == changes.begin())
        return {0.0, init_a, init_b, 0};
    return *std::prev(it);
}

namespace {

/// Velocity coordinate i of member B: own clock until it meets member A's, then a copy.
struct SplicedCoordinate {
    SingleVelocitySampler own;
    bool linked;
};

} // namespace

DiscreteDiscretePair couple_discrete_discrete(const LatticeParams& params, const LatticeState& a,
                                              const LatticeState& b, double horizon, std::uint64_t seed,
                                              std::uint64_t replica)
{
    params.validate();
    state_index(params, a);
    state_index(params, b);
    if (!(horizon > 0.0))
        throw std::invalid_argument("horizon must be > 0");
    const TumbleKind& kind = params.kind;
    SingleVelocitySampler a1(kind, a.sigma.s1, Stream(seed, replica, StreamRole::particle1));
    SingleVelocitySampler a2(kind, a.sigma.s2, Stream(seed, replica, StreamRole::particle2));
    SplicedCoordinate b1{SingleVelocitySampler(kind, b.sigma.s1, Stream(seed, replica, StreamRole::particle1_shadow)),
                         a.sigma.s1 == b.sigma.s1};
    SplicedCoordinate b2{SingleVelocitySampler(kind, b.sigma.s2, Stream(seed, replica, StreamRole::particle2_shadow)),
                         a.sigma.s2 == b.sigma.s2};
    PoissonClock r1(params.gamma, Stream(seed, replica, StreamRole::ring1));
    PoissonClock r2(params.gamma, Stream(seed, replica, StreamRole::ring2));

    DiscreteDiscretePair out{params, a, b, {}, {}, horizon};
    LatticeState sa = a;
    LatticeState sb = b;
    std::int64_t s_matched = 0;
    if (b1.linked)
        out.times.tau1 = 0.0;
    if (b2.linked)
        out.times.tau2 = 0.0;
    if (b1.linked && b2.linked)
        out.times.tau_sigma = 0.0;
    if (sa == sb)
        out.times.tau_coupling = 0.0;
    double n1 = r1.next();
    double n2 = r2.next();
    for (;;) {
        const double tb1 = b1.linked ? kNever : b1.own.next_time();
        const double tb2 = b2.linked ? kNever : b2.own.next_time();
        const double t = std::min({a1.next_time(), a2.next_time(), tb1, tb2, n1, n2});
        if (t > horizon)
            break;
        const LatticeState pa = sa;
        const LatticeState pb = sb;
        const std::int64_t ps = s_matched;
        if (t == a1.next_time()) {
            sa.sigma.s1 = a1.advance();
            if (b1.linked)
                sb.sigma.s1 = sa.sigma.s1;
        } else if (t == a2.next_time()) {
            sa.sigma.s2 = a2.advance();
            if (b2.linked)
                sb.sigma.s2 = sa.sigma.s2;
        } else if (t == tb1) {
            sb.sigma.s1 = b1.own.advance();
        } else if (t == tb2) {
            sb.sigma.s2 = b2.own.advance();
        } else if (t == n1) {
            if (out.times.tau_sigma <= t)
                s_matched -= sa.sigma.s1;
            sa = step_discrete(sa, Clock::first, params.L);
            sb = step_discrete(sb, Clock::first, params.L);
            n1 = r1.next();
        } else {
            if (out.times.tau_sigma <= t)
                s_matched += sa.sigma.s2;
            sa = step_discrete(sa, Clock::second, params.L);
            sb = step_discrete(sb, Clock::second, params.L);
            n2 = r2.next();
        }
        if (!b1.linked && sa.sigma.s1 == sb.sigma.s1) {
            b1.linked = true;
            out.times.tau1 = t;
        }
        if (!b2.linked && sa.sigma.s2 == sb.sigma.s2) {
            b2.linked = true;
            out.times.tau2 = t;
        }
        if (b1.linked && b2.linked && out.times.tau_sigma == kNever)
            out.times.tau_sigma = t;
        if (out.times.tau_coupling == kNever && sa == sb)
            out.times.tau_coupling = t;
        if (!(sa == pa) || !(sb == pb) || s_matched != ps)
            out.changes.push_back({t, sa, sb, s_matched});
    }
    return out;
}

namespace {

struct NullPairRecorder {
    void segment(const Segment&, const Segment&) {}
};

struct PairRecorder {
    PiecewiseLinearPath* a;
    PiecewiseLinearPath* b;
    void segment(const Segment& sa, const Segment& sb)
    {
        a->append(sa);
        b->append(sb);
    }
};

/// Runs the continuous-continuous coupling to `horizon`, or until coupled when `stop_when_coupled`.
template <class Recorder>
CouplingTimes run_continuous_pair(const ContParams& params, const ContState& a, const ContState& b, double horizon,
                                  std::uint64_t seed, std::uint64_t replica, bool stop_when_coupled,
                                  Recorder& rec)
{
    params.validate();
    classify(a, params.ell);
    classify(b, params.ell);
    const TumbleKind& kind = params.kind;
    if (!contains(kind, a.sigma) || !contains(kind, b.sigma))
        throw std::invalid_argument("initial velocity pair not in alphabet");
    const double ell = params.ell;
    SingleVelocitySampler a1(kind, a.sigma.s1, Stream(seed, replica, StreamRole::particle1));
    SingleVelocitySampler a2(kind, a.sigma.s2, Stream(seed, replica, StreamRole::particle2));
    SplicedCoordinate b1{SingleVelocitySampler(kind, b.sigma.s1, Stream(seed, replica, StreamRole::particle1_shadow)),
                         a.sigma.s1 == b.sigma.s1};
    SplicedCoordinate b2{SingleVelocitySampler(kind, b.sigma.s2, Stream(seed, replica, StreamRole::particle2_shadow)),
                         a.sigma.s2 == b.sigma.s2};
    CouplingTimes times;
    if (b1.linked)
        times.tau1 = 0.0;
    if (b2.linked)
        times.tau2 = 0.0;
    if (b1.linked && b2.linked)
        times.tau_sigma = 0.0;
    ContState sa = a;
    ContState sb = b;
    if (sa == sb)
        times.tau_coupling = 0.0;
    double t = 0.0;
    while (!(stop_when_coupled && times.tau_coupling < kNever)) {
        const double tb1 = b1.linked ? kNever : b1.own.next_time();
        const double tb2 = b2.linked ? kNever : b2.own.next_time();
        const double tn = std::min({a1.next_time(), a2.next_time(), tb1, tb2});
        const double te = std::min(tn, horizon);
        const FlowResult fa = flow_segment(sa.x, sa.sigma, te - t, ell);
        const FlowResult fb = flow_segment(sb.x, sb.sigma, te - t, ell);
        rec.segment({t, te, sa.x, fa.x, sa.sigma, fa.clamp}, {t, te, sb.x, fb.x, sb.sigma, fb.clamp});
        if (times.tau_coupling == kNever && sa.sigma == sb.sigma && fa.clamp && fb.clamp &&
            fa.clamp->boundary == fb.clamp->boundary)
            times.tau_coupling = t + std::max(fa.clamp->time, fb.clamp->time);
        sa.x = fa.x;
        sb.x = fb.x;
        t = te;
        if (tn > horizon)
            break;
        if (tn == a1.next_time()) {
            sa.sigma.s1 = a1.advance();
            if (b1.linked)
                sb.sigma.s1 = sa.sigma.s1;
        } else if (tn == a2.next_time()) {
            sa.sigma.s2 = a2.advance();
            if (b2.linked)
                sb.sigma.s2 = sa.sigma.s2;
        } else if (tn == tb1) {
            sb.sigma.s1 = b1.own.advance();
        } else {
            sb.sigma.s2 = b2.own.advance();
        }
        if (!b1.linked && sa.sigma.s1 == sb.sigma.s1) {
            b1.linked = true;
            times.tau1 = t;
        }
        if (!b2.linked && sa.sigma.s2 == sb.sigma.s2) {
            b2.linked = true;
            times.tau2 = t;
        }
        if (b1.linked && b2.linked && times.tau_sigma == kNever)
            times.tau_sigma = t;
        if (times.tau_coupling == kNever && sa == sb)
            times.tau_coupling = t;
        if (t >= horizon)
            break;
    }
    return times;
}

} // namespace

ContinuousContinuousPair couple_continuous_continuous(const ContParams& params, const ContState& a,
                                                      const ContState& b, double horizon, std::uint64_t seed,
                                                      std::uint64_t replica)
{
    if (!(horizon > 0.0))
        throw std::invalid_argument("horizon must be > 0");
    ContinuousContinuousPair out{params, PiecewiseLinearPath(params.ell, a), PiecewiseLinearPath(params.ell, b), {},
                                 horizon};
    PairRecorder rec{&out.a, &out.b};
    out.times = run_continuous_pair(params, a, b, horizon, seed, replica, false, rec);
    return out;
}

CouplingTimes continuous_coupling_times(const ContParams& params, const ContState& a, const ContState& b, double cap,
                                        std::uint64_t seed, std::uint64_t replica)
{
    if (!(cap > 0.0))
        throw std::invalid_argument("cap must be > 0");
    NullPairRecorder rec;
    return run_continuous_pair(params, a, b, cap, seed, replica, true, rec);
}

ConvergenceRow convergence_row(const ConvergenceConfig& cfg, int L)
{
    if (cfg.replicas < 1)
        throw std::invalid_argument("replicas must be >= 1");
    const ContParams params{cfg.ell, cfg.kind};
    const AtomicDensityMeasure pi = invariant_measure(cfg.kind, cfg.ell);
    std::vector<double> dev(cfg.replicas);
    parallel_for(cfg.replicas, cfg.workers, [&](std::size_t i) {
        Stream init(cfg.seed, i, StreamRole::init);
        const ContState s = sample_invariant(pi, 1, init).front();
        dev[i] = coupled_sup_deviation(L, params, s.x, s.sigma, cfg.T, cfg.seed, i);
    });
    ConvergenceRow row{};
    row.L = L;
    row.replicas = cfg.replicas;
    row.median_deviation = empirical_quantile(dev, 0.5);
    row.q90_deviation = empirical_quantile(dev, 0.9);
    row.p_exceed = static_cast<double>(std::count_if(dev.begin(), dev.end(), [&](double d) { return d >= cfg.epsilon; })) /
                   cfg.replicas;
    row.bound = deviation_bound(cfg.epsilon, cfg.T, L, cfg.ell, cfg.kind.eta());
    row.w1 = std::nan("");
    if (cfg.with_w1) {
        const StationaryVector piL = stationary_distribution(LatticeParams::scaled_chain(L, cfg.ell, cfg.kind));
        row.w1 = w1_distance(to_points(piL), to_points(pi, cfg.w1_bins));
    }
    return row;
}

} // namespace rtp
