#include "rtp/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rtp {

namespace {

constexpr std::array<int, 2> kInstantaneousAlphabet{1, -1};
constexpr std::array<int, 3> kFiniteAlphabet{1, 0, -1};

void require_rate(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("rate ") + name + " must be finite and > 0");
}

} // namespace

TumbleKind TumbleKind::instantaneous(double omega)
{
    require_rate(omega, "omega");
    return TumbleKind(TumbleModel::instantaneous, omega, 0.0);
}

TumbleKind TumbleKind::finite(double alpha, double beta)
{
    require_rate(alpha, "alpha");
    require_rate(beta, "beta");
    return TumbleKind(TumbleModel::finite, alpha, beta);
}

double TumbleKind::omega() const
{
    if (!is_instantaneous())
        throw std::logic_error("omega is only defined for instantaneous tumbles");
    return a_;
}

double TumbleKind::alpha() const
{
    if (is_instantaneous())
        throw std::logic_error("alpha is only defined for finite tumbles");
    return a_;
}

double TumbleKind::beta() const
{
    if (is_instantaneous())
        throw std::logic_error("beta is only defined for finite tumbles");
    return b_;
}

double TumbleKind::ratio() const { return alpha() / beta(); }

double TumbleKind::eta() const noexcept { return is_instantaneous() ? 2.0 * a_ : 2.0 * std::max(a_, b_); }

std::span<const int> TumbleKind::alphabet() const noexcept
{
    if (is_instantaneous())
        return kInstantaneousAlphabet;
    return kFiniteAlphabet;
}

bool TumbleKind::contains(int s) const noexcept
{
    if (is_instantaneous())
        return s == 1 || s == -1;
    return s >= -1 && s <= 1;
}

int TumbleKind::index_of(int s) const
{
    if (!contains(s))
        throw std::out_of_range("velocity " + std::to_string(s) + " not in alphabet");
    return is_instantaneous() ? (s == 1 ? 0 : 1) : 1 - s;
}

double TumbleKind::exit_rate(int s) const
{
    index_of(s);
    if (is_instantaneous())
        return a_;
    return s == 0 ? b_ : a_;
}

double TumbleKind::rate(int from, int to) const
{
    index_of(from);
    index_of(to);
    if (from == to)
        return -exit_rate(from);
    if (is_instantaneous())
        return a_;
    if (from == 0)
        return 0.5 * b_;
    return to == 0 ? a_ : 0.0;
}

double TumbleKind::max_pair_exit_rate() const
{
    double m = 0.0;
    for (int s : alphabet())
        m = std::max(m, exit_rate(s));
    return 2.0 * m;
}

int TumbleKind::jump(int s, Stream& rng) const
{
    if (is_instantaneous())
        return -s;
    if (s != 0)
        return 0;
    return rng.coin() ? 1 : -1;
}

int pair_index(const TumbleKind& kind, VelocityPair sigma)
{
    return kind.index_of(sigma.s1) * kind.alphabet_size() + kind.index_of(sigma.s2);
}

VelocityPair pair_at(const TumbleKind& kind, int index)
{
    const int n = kind.alphabet_size();
    if (index < 0 || index >= n * n)
        throw std::out_of_range("pair index out of range");
    auto a = kind.alphabet();
    return {a[index / n], a[index % n]};
}

std::vector<VelocityPair> pair_alphabet(const TumbleKind& kind)
{
    std::vector<VelocityPair> out;
    for (int i = 0; i < kind.pair_count(); ++i)
        out.push_back(pair_at(kind, i));
    return out;
}

bool contains(const TumbleKind& kind, VelocityPair sigma) noexcept
{
    return kind.contains(sigma.s1) && kind.contains(sigma.s2);
}

Eigen::MatrixXd single_rate_matrix(const TumbleKind& kind)
{
    auto a = kind.alphabet();
    const int n = kind.alphabet_size();
    Eigen::MatrixXd q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            q(i, j) = kind.rate(a[i], a[j]);
    return q;
}

Eigen::MatrixXd pair_generator(const TumbleKind& kind)
{
    const Eigen::MatrixXd q = single_rate_matrix(kind);
    const int n = kind.alphabet_size();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n * n, n * n);
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            for (int j1 = 0; j1 < n; ++j1)
                for (int j2 = 0; j2 < n; ++j2) {
                    double v = 0.0;
                    if (i2 == j2)
                        v += q(i1, j1);
                    if (i1 == j1)
                        v += q(i2, j2);
                    g(i1 * n + i2, j1 * n + j2) = v;
                }
    return g;
}

Eigen::VectorXd single_stationary(const TumbleKind& kind)
{
    if (kind.is_instantaneous())
        return Eigen::Vector2d(0.5, 0.5);
    const double a = kind.alpha();
    const double b = kind.beta();
    const double z = 2.0 * b + 2.0 * a;
    // pi(+-1) * alpha = pi(0) * beta / 2
    return Eigen::Vector3d(b / z, 2.0 * a / z, b / z);
}

SingleVelocitySampler::SingleVelocitySampler(const TumbleKind& kind, int s0, Stream rng, double t0)
    : kind_(kind), state_(s0), next_(0.0), rng_(std::move(rng))
{
    kind_.index_of(s0);
    next_ = t0 + rng_.exponential(kind_.exit_rate(state_));
}

int SingleVelocitySampler::advance()
{
    state_ = kind_.jump(state_, rng_);
    next_ += rng_.exponential(kind_.exit_rate(state_));
    return state_;
}

PairVelocitySampler::PairVelocitySampler(const TumbleKind& kind, VelocityPair sigma0, Stream rng1, Stream rng2,
                                         double t0)
    : p1_(kind, sigma0.s1, std::move(rng1), t0), p2_(kind, sigma0.s2, std::move(rng2), t0)
{
}

VelocityEvent PairVelocitySampler::advance()
{
    VelocityEvent ev{};
    if (p1_.next_time() <= p2_.next_time()) {
        ev.time = p1_.next_time();
        p1_.advance();
        ev.particle = 1;
    } else {
        ev.time = p2_.next_time();
        p2_.advance();
        ev.particle = 2;
    }
    ev.sigma = state();
    return ev;
}

VelocityPath::VelocityPath(const TumbleKind& kind, VelocityPair sigma0, Stream rng1, Stream rng2)
    : kind_(kind), initial_(sigma0), sampler_(kind, sigma0, std::move(rng1), std::move(rng2))
{
}

void VelocityPath::extend(double horizon)
{
    if (!(horizon >= 0.0))
        throw std::invalid_argument("horizon must be >= 0");
    while (sampler_.next_time() <= horizon)
        events_.push_back(sampler_.advance());
    horizon_ = std::max(horizon_, horizon);
}

VelocityPair VelocityPath::state_at(double t) const
{
    if (t < 0.0 || t > horizon_)
        throw std::out_of_range("time outside sampled horizon");
    auto it = std::upper_bound(events_.begin(), events_.end(), t,
                               [](double v, const VelocityEvent& e) { return v < e.time; });
    return it == events_.begin() ? initial_ : std::prev(it)->sigma;
}

VelocityPath sample_velocity_path(const TumbleKind& kind, VelocityPair sigma0, double horizon, Stream rng1,
                                  Stream rng2)
{
    if (!contains(kind, sigma0))
        throw std::invalid_argument("initial velocity pair not in alphabet");
    VelocityPath path(kind, sigma0, std::move(rng1), std::move(rng2));
    path.extend(horizon);
    return path;
}

double velocity_integral(const VelocityPath& path, double t)
{
    if (!(t >= 0.0) || t > path.horizon())
        throw std::out_of_range("time outside sampled horizon");
    double acc = 0.0;
    double last = 0.0;
    VelocityPair sigma = path.initial();
    for (const auto& ev : path.events()) {
        if (ev.time > t)
            break;
        acc += sigma.relative_speed() * (ev.time - last);
        last = ev.time;
        sigma = ev.sigma;
    }
    return acc + sigma.relative_speed() * (t - last);
}

double mgf_velocity_integral(double omega, int s0, double zeta, double t)
{
    if (!(omega > 0.0))
        throw std::invalid_argument("omega must be > 0");
    if (s0 != 1 && s0 != -1)
        throw std::invalid_argument("s0 must be +1 or -1");
    if (!(t >= 0.0))
        throw std::invalid_argument("t must be >= 0");
    const double root = std::sqrt(zeta * zeta + omega * omega);
    const double drift = omega + s0 * zeta;
    return std::exp(-t * omega) * (drift * std::sinh(t * root) / root + std::cosh(t * root));
}

std::array<double, 4> velocity_integral_moments(double omega, int s0, double t)
{
    if (!(omega > 0.0))
        throw std::invalid_argument("omega must be > 0");
    if (s0 != 1 && s0 != -1)
        throw std::invalid_argument("s0 must be +1 or -1");
    const double w = omega;
    const double e = std::exp(-2.0 * w * t);
    const double one_minus_e = -std::expm1(-2.0 * w * t);
    std::array<double, 4> m{};
    m[0] = s0 * one_minus_e / (2.0 * w);
    m[1] = t / w - one_minus_e / (2.0 * w * w);
    m[2] = s0 * 3.0 * (w * t * (1.0 + e) - one_minus_e) / (2.0 * w * w * w);
    m[3] = 3.0 * t * t / (w * w) - 6.0 * t / (w * w * w) - 3.0 * t * e / (w * w * w) +
           9.0 * one_minus_e / (2.0 * w * w * w * w);
    return m;
}

} // namespace rtp
