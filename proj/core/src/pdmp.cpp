#include "rtp/pdmp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rtp {

namespace {

VelocityPair checked_pair(const TumbleKind& kind, VelocityPair sigma)
{
    if (!contains(kind, sigma))
        throw std::invalid_argument("initial velocity pair not in alphabet");
    return sigma;
}

constexpr double kSnap = 1e-12;

int bin_of(double x, double width, int bins)
{
    const int b = static_cast<int>(std::floor(x / width));
    return std::clamp(b, 0, bins - 1);
}

} // namespace

void ContParams::validate() const
{
    if (!(ell > 0.0) || !std::isfinite(ell))
        throw std::invalid_argument("ell must be finite and > 0");
}

StateClass classify(const ContState& state, double ell)
{
    if (state.x < 0.0 || state.x > ell)
        throw std::out_of_range("position outside [0, ell]");
    const int v = state.sigma.relative_speed();
    if (state.x == 0.0 && v <= 0)
        return StateClass::jammed_at_zero;
    if (state.x == ell && v >= 0)
        return StateClass::jammed_at_ell;
    return StateClass::bulk;
}

FlowResult flow_segment(double x0, VelocityPair sigma, double dt, double ell)
{
    if (!(dt >= 0.0))
        throw std::invalid_argument("dt must be >= 0");
    if (x0 < 0.0 || x0 > ell)
        throw std::out_of_range("position outside [0, ell]");
    const int v = sigma.relative_speed();
    if (v < 0 && x0 <= kSnap * ell)
        x0 = 0.0;
    if (v > 0 && x0 >= ell - kSnap * ell)
        x0 = ell;
    if (v == 0)
        return {x0, std::nullopt};
    if (v > 0) {
        const double h = (ell - x0) / v;
        if (h <= dt)
            return {ell, ClampEvent{h, Boundary::ell}};
        return {std::min(ell, x0 + v * dt), std::nullopt};
    }
    const double h = x0 / -v;
    if (h <= dt)
        return {0.0, ClampEvent{h, Boundary::zero}};
    return {std::max(0.0, x0 + v * dt), std::nullopt};
}

ContinuousSimulator::ContinuousSimulator(const ContParams& params, const ContState& init, Stream particle1,
                                         Stream particle2, double t0)
    : params_(params), state_(init), time_(t0),
      velocity_(params.kind, checked_pair(params.kind, init.sigma), std::move(particle1), std::move(particle2), t0)
{
    params_.validate();
    if (!(init.x >= 0.0 && init.x <= params_.ell))
        throw std::invalid_argument("initial position outside [0, ell]");
}

ContinuousSimulator::ContinuousSimulator(const ContParams& params, const ContState& init, std::uint64_t seed,
                                         std::uint64_t replica)
    : ContinuousSimulator(params, init, Stream(seed, replica, StreamRole::particle1),
                          Stream(seed, replica, StreamRole::particle2))
{
}

std::optional<Segment> ContinuousSimulator::next_segment(double horizon)
{
    if (time_ >= horizon)
        return std::nullopt;
    const double tv = velocity_.next_time();
    const double te = std::min(tv, horizon);
    const FlowResult f = flow_segment(state_.x, state_.sigma, te - time_, params_.ell);
    Segment seg{time_, te, state_.x, f.x, state_.sigma, f.clamp};
    time_ = te;
    state_.x = f.x;
    if (tv <= horizon) {
        velocity_.advance();
        state_.sigma = velocity_.state();
    }
    return seg;
}

PiecewiseLinearPath::PiecewiseLinearPath(double ell, const ContState& init) : ell_(ell)
{
    breaks_.push_back({0.0, init.x, init.sigma});
}

void PiecewiseLinearPath::append(const Segment& seg)
{
    if (seg.t0 != horizon_)
        throw std::invalid_argument("segment does not continue the path");
    if (seg.t0 > 0.0)
        breaks_.push_back({seg.t0, seg.x0, seg.sigma});
    else
        breaks_.front() = {0.0, seg.x0, seg.sigma};
    if (seg.clamp && seg.clamp->time > 0.0)
        clamps_.push_back({seg.t0 + seg.clamp->time, seg.clamp->boundary});
    horizon_ = seg.t1;
}

double PiecewiseLinearPath::position_at(double t) const { return state_at(t).x; }

ContState PiecewiseLinearPath::state_at(double t) const
{
    if (t < 0.0 || t > horizon_)
        throw std::out_of_range("time outside path horizon");
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t,
                               [](double v, const Breakpoint& b) { return v < b.time; });
    const Breakpoint& b = *std::prev(it);
    return {flow_segment(b.x, b.sigma, t - b.time, ell_).x, b.sigma};
}

std::vector<Segment> PiecewiseLinearPath::segments() const
{
    std::vector<Segment> out;
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
        const Breakpoint& b = breaks_[i];
        const double t1 = i + 1 < breaks_.size() ? breaks_[i + 1].time : horizon_;
        if (t1 <= b.time && i + 1 < breaks_.size())
            continue;
        const FlowResult f = flow_segment(b.x, b.sigma, t1 - b.time, ell_);
        out.push_back({b.time, t1, b.x, f.x, b.sigma, f.clamp});
    }
    return out;
}

void PiecewiseLinearPath::write_csv(std::ostream& os) const
{
    os << "t_break,x,s1,s2,clamp_flag\n";
    os.precision(17);
    std::size_t c = 0;
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
        const Breakpoint& b = breaks_[i];
        while (c < clamps_.size() && clamps_[c].time < b.time) {
            const double x = clamps_[c].boundary == Boundary::zero ? 0.0 : ell_;
            const Breakpoint& prev = breaks_[i - 1];
            os << clamps_[c].time << ',' << x << ',' << prev.sigma.s1 << ',' << prev.sigma.s2 << ",1\n";
            ++c;
        }
        os << b.time << ',' << b.x << ',' << b.sigma.s1 << ',' << b.sigma.s2 << ",0\n";
    }
    const Breakpoint& last = breaks_.back();
    for (; c < clamps_.size(); ++c) {
        const double x = clamps_[c].boundary == Boundary::zero ? 0.0 : ell_;
        os << clamps_[c].time << ',' << x << ',' << last.sigma.s1 << ',' << last.sigma.s2 << ",1\n";
    }
    if (horizon_ > last.time) {
        const ContState end = state_at(horizon_);
        os << horizon_ << ',' << end.x << ',' << end.sigma.s1 << ',' << end.sigma.s2 << ",0\n";
    }
}

ContinuousRun simulate_continuous(const ContParams& params, const ContState& init, double horizon, Stream particle1,
                                  Stream particle2)
{
    if (!(horizon > 0.0))
        throw std::invalid_argument("horizon must be > 0");
    ContinuousSimulator sim(params, init, particle1, particle2);
    ContinuousRun run{PiecewiseLinearPath(params.ell, init),
                      VelocityPath(params.kind, init.sigma, std::move(particle1), std::move(particle2))};
    while (auto seg = sim.next_segment(horizon))
        run.path.append(*seg);
    run.velocities.extend(horizon);
    return run;
}

ContinuousRun simulate_continuous(const ContParams& params, const ContState& init, double horizon,
                                  std::uint64_t seed, std::uint64_t replica)
{
    return simulate_continuous(params, init, horizon, Stream(seed, replica, StreamRole::particle1),
                               Stream(seed, replica, StreamRole::particle2));
}

OccupationAccumulator::OccupationAccumulator(const ContParams& params, int bins)
    : params_(params), raw_(params.kind, params.ell, bins)
{
    params_.validate();
}

void OccupationAccumulator::add(const Segment& seg)
{
    const double dt = seg.t1 - seg.t0;
    if (dt <= 0.0)
        return;
    elapsed_ += dt;
    const int p = pair_index(params_.kind, seg.sigma);
    const double ell = params_.ell;
    const int v = seg.sigma.relative_speed();
    const double moving = seg.clamp ? std::min(seg.clamp->time, dt) : dt;
    if (seg.clamp && dt > moving) {
        if (seg.clamp->boundary == Boundary::zero)
            raw_.atom_zero(p) += dt - moving;
        else
            raw_.atom_ell(p) += dt - moving;
    }
    if (moving <= 0.0)
        return;
    const int bins = raw_.bins();
    const double w = raw_.bin_width();
    if (v == 0) {
        const StateClass c = classify({seg.x0, seg.sigma}, ell);
        if (c == StateClass::jammed_at_zero)
            raw_.atom_zero(p) += moving;
        else if (c == StateClass::jammed_at_ell)
            raw_.atom_ell(p) += moving;
        else
            raw_.bulk(p, bin_of(seg.x0, w, bins)) += moving;
        return;
    }
    const double xa = seg.x0;
    const double xb = std::clamp(xa + v * moving, 0.0, ell);
    const double lo = std::min(xa, xb);
    const double hi = std::max(xa, xb);
    const double speed = std::abs(v);
    if (hi - lo <= 0.0) {
        raw_.bulk(p, bin_of(lo, w, bins)) += moving;
        return;
    }
    // Time in each bin is proportional to the overlap length; rescale so the pieces sum to `moving`.
    const int b0 = bin_of(lo, w, bins);
    const int b1 = bin_of(hi, w, bins);
    const double scale = moving / ((hi - lo) / speed);
    for (int b = b0; b <= b1; ++b) {
        const double a = std::max(lo, b * w);
        const double c = b == bins - 1 ? hi : std::min(hi, (b + 1) * w);
        if (c > a)
            raw_.bulk(p, b) += (c - a) / speed * scale;
    }
}

void OccupationAccumulator::merge(const OccupationAccumulator& other)
{
    if (!raw_.same_layout(other.raw_))
        throw std::invalid_argument("cannot merge accumulators with different layouts");
    for (int p = 0; p < raw_.pair_count(); ++p) {
        raw_.atom_zero(p) += other.raw_.atom_zero(p);
        raw_.atom_ell(p) += other.raw_.atom_ell(p);
        for (int b = 0; b < raw_.bins(); ++b)
            raw_.bulk(p, b) += other.raw_.bulk(p, b);
    }
    elapsed_ += other.elapsed_;
}

DiscretizedMeasure OccupationAccumulator::measure() const
{
    if (!(elapsed_ > 0.0))
        throw std::invalid_argument("occupation measure of a zero-length path");
    DiscretizedMeasure m = raw_;
    m.scale(1.0 / elapsed_);
    return m;
}

double OccupationAccumulator::jammed_fraction(Boundary b) const
{
    if (!(elapsed_ > 0.0))
        throw std::invalid_argument("occupation measure of a zero-length path");
    double s = 0.0;
    for (int p = 0; p < raw_.pair_count(); ++p)
        s += b == Boundary::zero ? raw_.atom_zero(p) : raw_.atom_ell(p);
    return s / elapsed_;
}

DiscretizedMeasure occupation_measure(const ContinuousRun& run, int bins)
{
    OccupationAccumulator acc({run.path.ell(), run.velocities.kind()}, bins);
    for (const Segment& s : run.path.segments())
        acc.add(s);
    return acc.measure();
}

OccupationAccumulator stream_occupation(const ContParams& params, const ContState& init, double horizon, int bins,
                                        std::uint64_t seed, std::uint64_t replica)
{
    if (!(horizon > 0.0))
        throw std::invalid_argument("horizon must be > 0");
    OccupationAccumulator acc(params, bins);
    ContinuousSimulator sim(params, init, seed, replica);
    while (auto seg = sim.next_segment(horizon))
        acc.add(*seg);
    return acc;
}

} // namespace rtp
